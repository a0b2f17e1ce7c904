"""Seen/unseen class splits by annotation budget."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigError


@dataclass(frozen=True)
class SplitSpec:
    seen: tuple
    unseen: tuple

    @property
    def k(self) -> int:
        return len(self.seen)


def make_split(pixel_counts: dict, k: int) -> SplitSpec:
    """The k classes with the fewest annotated pixels become the seen set;
    ties break toward the smaller class id."""
    classes = sorted(pixel_counts)
    if not 0 < k < len(classes):
        raise ConfigError(f"split k={k} out of range for {len(classes)} classes")
    ordered = sorted(classes, key=lambda cid: (pixel_counts[cid], cid))
    return SplitSpec(seen=tuple(sorted(ordered[:k])),
                     unseen=tuple(sorted(ordered[k:])))
