from dataclasses import dataclass
from typing import List, Optional

from ..model import MultiaffineModel


@dataclass
class ModelViolation:
    """Represents a single structural problem found in a model."""

    check_id: str
    severity: str
    description: str
    factor_index: Optional[int] = None
    term_index: Optional[int] = None
    suggested_fix: Optional[str] = None

    @property
    def location(self) -> str:
        parts = []
        if self.factor_index is not None:
            parts.append(f"factor {self.factor_index}")
        if self.term_index is not None:
            parts.append(f"term {self.term_index}")
        return ", ".join(parts) or "model"


class ModelCheck:
    """Base class for model checks."""

    def __init__(self, check_id: str, description: str):
        self.check_id = check_id
        self.description = description
        self.elements_checked = 0

    def check(self, model: MultiaffineModel) -> List[ModelViolation]:
        """Inspect a model and report violations of this check."""
        raise NotImplementedError("Check classes must implement check method")
