from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ModelError

BlockId = Union[int, str]


@dataclass(frozen=True)
class Block:
    """A named group of scalar unknowns updated jointly."""

    name: str
    size: int


class BlockLayout:
    """Ordered partition of the unknown vector x into contiguous blocks."""

    def __init__(
        self, blocks: Sequence[Union[Block, Tuple[str, int]]]
    ) -> None:
        parsed: List[Block] = []
        for item in blocks:
            block = item if isinstance(item, Block) else Block(*item)
            if not isinstance(block.size, (int, np.integer)) or block.size < 1:
                raise ModelError(
                    f"block '{block.name}' must have a positive integer size, "
                    f"got {block.size}"
                )
            parsed.append(Block(str(block.name), int(block.size)))
        if not parsed:
            raise ModelError("a layout needs at least one block")

        names = [b.name for b in parsed]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ModelError(f"duplicate block names: {', '.join(duplicates)}")

        self.blocks: Tuple[Block, ...] = tuple(parsed)
        self._index: Dict[str, int] = {b.name: i for i, b in enumerate(parsed)}
        sizes = np.array([b.size for b in parsed], dtype=int)
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.offsets.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.offsets[-1])

    @property
    def names(self) -> List[str]:
        return [b.name for b in self.blocks]

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BlockLayout) and self.blocks == other.blocks

    def __repr__(self) -> str:
        inner = ", ".join(f"{b.name}:{b.size}" for b in self.blocks)
        return f"BlockLayout({inner})"

    def index(self, block: BlockId) -> int:
        """Resolve a block name or position to its position."""
        if isinstance(block, (int, np.integer)) and not isinstance(block, bool):
            if 0 <= block < len(self.blocks):
                return int(block)
            raise ModelError(f"unknown block index {block}")
        if isinstance(block, str) and block in self._index:
            return self._index[block]
        raise ModelError(f"unknown block {block!r}")

    def size(self, block: BlockId) -> int:
        return self.blocks[self.index(block)].size

    def name(self, block: BlockId) -> str:
        return self.blocks[self.index(block)].name

    def slice(self, block: BlockId) -> slice:
        i = self.index(block)
        return slice(int(self.offsets[i]), int(self.offsets[i + 1]))

    def flat_index(self, block: BlockId, offset: int) -> int:
        i = self.index(block)
        if not 0 <= offset < self.blocks[i].size:
            raise ModelError(
                f"offset {offset} out of range for block '{self.blocks[i].name}'"
            )
        return int(self.offsets[i]) + offset

    def complement(self, block: BlockId) -> np.ndarray:
        """Flat indices of every coordinate outside the block."""
        mask = np.ones(self.n, dtype=bool)
        mask[self.slice(block)] = False
        return np.flatnonzero(mask)

    def check_vector(self, x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.ndim != 1 or arr.shape[0] != self.n:
            raise ModelError(
                f"x must have length {self.n}, got shape {arr.shape}"
            )
        return arr

    def split(self, x: Union[Sequence[float], np.ndarray]) -> Dict[str, np.ndarray]:
        arr = self.check_vector(x)
        return {b.name: arr[self.slice(i)].copy() for i, b in enumerate(self.blocks)}

    def join(self, parts: Mapping[str, Union[Sequence[float], np.ndarray]]) -> np.ndarray:
        x = np.zeros(self.n)
        for name, values in parts.items():
            sl = self.slice(name)
            arr = np.asarray(values, dtype=float).ravel()
            if arr.shape[0] != sl.stop - sl.start:
                raise ModelError(
                    f"block '{name}' expects {sl.stop - sl.start} values, "
                    f"got {arr.shape[0]}"
                )
            x[sl] = arr
        return x

    def to_list(self) -> List[Dict[str, Union[str, int]]]:
        return [{"name": b.name, "size": b.size} for b in self.blocks]
