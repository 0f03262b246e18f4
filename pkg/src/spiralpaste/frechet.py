"""Exact isometric embedding of a finite metric space into sup-norm space.

Every point goes to its vector of distances to all points of the space
(anchors in ascending id order), shifted so the basepoint lands at the
origin.  With the full point set as anchors this is an exact isometry
into R^n under the sup norm, and the image norm of x equals its distance
to the basepoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import PointedMetricSpace

__all__ = ["FrechetMap", "frechet_embed"]


@dataclass(frozen=True)
class FrechetMap:
    """Distance-vector embedding: anchor order plus per-point images."""

    anchor_order: tuple
    images: dict
    basepoint: object

    @property
    def dimension(self) -> int:
        return len(self.anchor_order)

    def __getitem__(self, point) -> np.ndarray:
        return self.images[point]


def frechet_embed(space: PointedMetricSpace) -> FrechetMap:
    """Embed ``space`` isometrically into sup-norm R^n, basepoint at 0."""
    anchors = sorted(space.ids)
    D = space.distance_matrix()
    rows = [space.index(a) for a in anchors]
    base_col = D[np.ix_(rows, [space.index(space.basepoint)])].ravel()
    images = {}
    for pid in space.ids:
        col = D[rows, space.index(pid)]
        images[pid] = col - base_col
    return FrechetMap(tuple(anchors), images, space.basepoint)
