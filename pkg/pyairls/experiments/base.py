"""Suite results and how they are written to disk."""

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence

import numpy as np

from ..reports.generator import write_curve_csv, write_json


@dataclass
class Curve:
    """One plotted line: a CSV with a header row."""

    name: str
    header: List[str]
    rows: List[List[Any]] = field(default_factory=list)

    def add(self, *values: Any) -> None:
        self.rows.append(list(values))


@dataclass
class SuiteResult:
    suite: str
    curves: List[Curve]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def curve(self, name: str) -> Curve:
        for c in self.curves:
            if c.name == name:
                return c
        raise KeyError(name)


class Clock:
    """Wall-clock seconds since construction, or always 0 when disabled."""

    def __init__(self, enabled: bool = True) -> None:
        self.enabled = enabled
        self.start = time.perf_counter()

    def reset(self) -> None:
        self.start = time.perf_counter()

    def __call__(self) -> float:
        return time.perf_counter() - self.start if self.enabled else 0.0


def run_seeds(seed: int, count: int) -> List[int]:
    """Independent per-run seeds derived from the suite seed."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def summarize(values: Sequence[float]) -> List[float]:
    """mean, min, max."""
    arr = np.asarray(values, dtype=float)
    return [float(arr.mean()), float(arr.min()), float(arr.max())]


def write_suite(result: SuiteResult, out_dir: Path) -> List[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for curve in result.curves:
        path = out_dir / f"{curve.name}.csv"
        write_curve_csv(path, curve.header, curve.rows)
        paths.append(path)
    meta = dict(result.metadata)
    meta["suite"] = result.suite
    meta["curves"] = {c.name: c.header for c in result.curves}
    path = out_dir / "metadata.json"
    write_json(path, meta)
    paths.append(path)
    return paths


SuiteFunc = Callable[..., SuiteResult]
