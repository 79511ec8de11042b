"""Cluster record shared by the feature, scheduling and pipeline layers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Cluster:
    """A target geometry and the source geometries whose MBRs touch it.

    ``cid`` is the target's position in the target dataset and doubles as
    the cluster id; ``members`` are source positions in ascending order.
    """

    cid: int
    members: tuple[int, ...]

    @property
    def target(self) -> int:
        return self.cid

    def __len__(self) -> int:
        return len(self.members)
