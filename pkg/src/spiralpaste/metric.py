"""Pointed metric spaces and brute-force distortion measurement.

A space is a finite list of opaque point ids with a metric given either
as an explicit symmetric matrix or induced by per-point coordinates under
the sup or Euclidean norm, plus a distinguished basepoint.  Distortion of
a map into a block sum is measured by scanning every unordered pair.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import sumspace
from .errors import SchemaError
from .sumspace import BlockVector, SumSpaceSpec

__all__ = [
    "PointedMetricSpace",
    "DistortionReport",
    "ball",
    "distortion",
    "max_separated_subset",
    "packing_bound",
    "load_space",
    "space_to_doc",
]

# All distance comparisons share one absolute tolerance, applied to
# distances rescaled by the space diameter (see rel_tol below).
TOL = 1e-9

_KINDS = ("matrix", "linf", "l2")


def _max_workers() -> int:
    raw = os.environ.get("SPIRALPASTE_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError as exc:
            raise SchemaError(f"SPIRALPASTE_THREADS must be an integer, got {raw!r}") from exc
        return max(1, n)
    return os.cpu_count() or 1


def _pairwise_rows(X: np.ndarray, reducer: str) -> np.ndarray:
    """Pairwise distances of rows of X: Chebyshev ('linf') or Euclidean ('l2').

    Chunked over rows; chunks run on a thread pool sized by
    SPIRALPASTE_THREADS (disjoint output rows, order-independent).
    """
    n = X.shape[0]
    out = np.empty((n, n))
    chunk = 64

    def fill(i0: int) -> None:
        i1 = min(i0 + chunk, n)
        diff = np.abs(X[i0:i1, None, :] - X[None, :, :])
        out[i0:i1] = np.max(diff, axis=2) if reducer == "linf" else np.sqrt(np.sum(diff**2, axis=2))

    starts = range(0, n, chunk)
    workers = min(_max_workers(), max(1, len(starts)))
    if workers > 1 and n > chunk:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    else:
        for i0 in starts:
            fill(i0)
    return out


@dataclass
class PointedMetricSpace:
    """Finite pointed metric space.

    ids: opaque, mutually sortable point identifiers (construction order
    is preserved; deterministic operations sort by id).
    kind: 'matrix' for an explicit distance matrix, 'linf'/'l2' for a
    coordinate-induced metric.
    """

    ids: tuple
    basepoint: object
    kind: str
    coords: np.ndarray | None = None
    matrix: np.ndarray | None = None
    _dmat: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.ids = tuple(self.ids)
        if len(self.ids) != len(set(self.ids)):
            raise ValueError("point ids must be unique")
        if self.basepoint not in self.ids:
            raise ValueError(f"basepoint {self.basepoint!r} is not a point of the space")
        if self.kind not in _KINDS:
            raise ValueError(f"metric kind must be one of {_KINDS}, got {self.kind!r}")
        n = len(self.ids)
        if self.kind == "matrix":
            if self.matrix is None:
                raise ValueError("matrix metric requires a distance matrix")
            D = np.asarray(self.matrix, dtype=float)
            if D.shape != (n, n):
                raise ValueError(f"distance matrix shape {D.shape} does not match {n} points")
            self.matrix = D
            self._validate_matrix(D)
            self._dmat = D
        else:
            if self.coords is None:
                raise ValueError(f"{self.kind} metric requires point coordinates")
            C = np.asarray(self.coords, dtype=float)
            if C.ndim != 2 or C.shape[0] != n:
                raise ValueError(f"coords shape {C.shape} does not match {n} points")
            if not np.all(np.isfinite(C)):
                raise ValueError("coordinates must be finite")
            self.coords = C
            # distinctness; the induced triangle inequality is automatic
            if len({tuple(row) for row in C}) != n:
                raise ValueError("coordinate rows must be distinct points")

    def _validate_matrix(self, D: np.ndarray) -> None:
        if not np.all(np.isfinite(D)):
            raise ValueError("distances must be finite")
        tol = self.rel_tol()
        if float(np.max(np.abs(D - D.T))) > tol:
            raise ValueError("distance matrix asymmetry exceeds tolerance")
        if float(np.max(np.abs(np.diag(D)))) > tol:
            raise ValueError("self-distances must vanish")
        # Positivity is judged at machine resolution, not at the report
        # tolerance: doubles near the diameter still resolve much finer
        # separations than TOL * diameter.
        resolvable = 64.0 * np.finfo(float).eps * max(1.0, float(np.max(D)))
        off = D + np.eye(len(D)) * (np.max(D) + 1.0)
        if float(np.min(off)) <= resolvable:
            raise ValueError("distinct points must be at positive distance")
        for y in range(len(D)):
            if np.any(D > D[:, y : y + 1] + D[y : y + 1, :] + tol):
                raise ValueError(f"triangle inequality fails through point {self.ids[y]!r}")

    def __len__(self) -> int:
        return len(self.ids)

    def index(self, point) -> int:
        try:
            return self.ids.index(point)
        except ValueError as exc:
            raise KeyError(f"unknown point {point!r}") from exc

    def rel_tol(self) -> float:
        """Absolute tolerance for distances scaled to the space diameter."""
        scale = 1.0
        if self._dmat is not None:
            scale = max(1.0, float(np.max(self._dmat)))
        elif self.kind == "matrix" and self.matrix is not None:
            scale = max(1.0, float(np.max(self.matrix)))
        elif self.coords is not None and self.coords.size:
            spread = float(np.max(self.coords) - np.min(self.coords))
            scale = max(1.0, 2.0 * spread)
        return TOL * scale

    def dist(self, u, v) -> float:
        i, j = self.index(u), self.index(v)
        if self._dmat is not None:
            return float(self._dmat[i, j])
        a, b = self.coords[i], self.coords[j]
        if self.kind == "linf":
            return float(np.max(np.abs(a - b)))
        return float(np.sqrt(np.sum((a - b) ** 2)))

    def distance_matrix(self) -> np.ndarray:
        if self._dmat is None:
            self._dmat = _pairwise_rows(self.coords, self.kind)
        return self._dmat

    def rho(self) -> np.ndarray:
        """Distances to the basepoint, in id construction order."""
        return self.distance_matrix()[self.index(self.basepoint)].copy()


@dataclass(frozen=True)
class DistortionReport:
    """Outcome of a brute-force pair scan.

    distortion = (max pair ratio) / (min pair ratio) where a pair's ratio
    is d_target(f u, f v) / d_source(u, v); scale_r is the min ratio, so
    scale_r * d <= d_target <= scale_r * distortion * d on every pair.
    A non-injective map is reported with the +inf sentinel.
    """

    distortion: float
    scale_r: float
    max_pair: tuple
    min_pair: tuple
    analytic_bound: float | None = None
    passed: bool = True

    def to_doc(self) -> dict:
        bound = self.analytic_bound
        return {
            "distortion": _json_num(self.distortion),
            "scale_r": self.scale_r,
            "max_pair": [str(p) for p in self.max_pair],
            "min_pair": [str(p) for p in self.min_pair],
            "analytic_bound": None if bound is None else _json_num(bound),
            "pass": self.passed,
        }


def _json_num(x: float):
    if np.isinf(x):
        return "inf"
    return float(x)


def ball(space: PointedMetricSpace, radius: float) -> PointedMetricSpace:
    """Closed ball around the basepoint, as a subspace with the same basepoint."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    rho = space.rho()
    keep = [i for i in range(len(space)) if rho[i] <= radius]
    ids = tuple(space.ids[i] for i in keep)
    if space.kind == "matrix":
        sub = space.distance_matrix()[np.ix_(keep, keep)]
        return PointedMetricSpace(ids, space.basepoint, "matrix", matrix=sub)
    return PointedMetricSpace(ids, space.basepoint, space.kind, coords=space.coords[keep])


def image_distance_stack(
    space: PointedMetricSpace, image: Mapping, spec: SumSpaceSpec
) -> np.ndarray:
    """Per-block pairwise sup-norm distance matrices, stacked (blocks, n, n)."""
    n = len(space)
    stack = np.zeros((spec.num_blocks, n, n))
    for b in range(1, spec.num_blocks + 1):
        rows = np.zeros((n, spec.block_dims[b - 1]))
        touched = False
        for i, pid in enumerate(space.ids):
            blk = image[pid].blocks.get(b)
            if blk is not None:
                rows[i] = blk
                touched = True
        if touched:
            stack[b - 1] = _pairwise_rows(rows, "linf")
    return stack


def aggregate_stack(stack: np.ndarray, p: float) -> np.ndarray:
    """Blockwise stack -> pairwise sum-space distances (max-scaled, see norm)."""
    m = np.max(stack, axis=0)
    if p == sumspace.SUP:
        return m
    safe = np.where(m == 0.0, 1.0, m)
    return m * np.sum((stack / safe) ** p, axis=0) ** (1.0 / p)


def distortion(
    space: PointedMetricSpace,
    image: Mapping,
    target: SumSpaceSpec,
    analytic_bound: float | None = None,
    aggregator: Callable[[np.ndarray], np.ndarray] | None = None,
) -> DistortionReport:
    """Measure bilipschitz distortion of ``image`` over all unordered pairs.

    ``image`` maps every point id to a BlockVector of ``target``.  An
    optional ``aggregator`` turns the per-block distance stack into pair
    distances, replacing the p-sum (used for renormed target models).
    """
    n = len(space)
    if n < 2:
        raise ValueError("distortion needs at least two points")
    for pid in space.ids:
        if image[pid].spec.block_dims != target.block_dims:
            raise ValueError(f"image of {pid!r} does not fit the target block layout")
    dA = space.distance_matrix()
    stack = image_distance_stack(space, image, target)
    dY = aggregator(stack) if aggregator is not None else aggregate_stack(stack, target.p)

    iu, ju = np.triu_indices(n, 1)
    ratios = dY[iu, ju] / dA[iu, ju]
    k_max = int(np.argmax(ratios))
    k_min = int(np.argmin(ratios))
    max_pair = (space.ids[iu[k_max]], space.ids[ju[k_max]])
    min_pair = (space.ids[iu[k_min]], space.ids[ju[k_min]])
    hi, lo = float(ratios[k_max]), float(ratios[k_min])
    dist = np.inf if lo == 0.0 else hi / lo
    passed = analytic_bound is None or dist <= analytic_bound
    if lo == 0.0:
        passed = False
    return DistortionReport(dist, lo, max_pair, min_pair, analytic_bound, passed)


def max_separated_subset(space: PointedMetricSpace, delta: float) -> list:
    """Greedy maximal delta-separated subset, inserting in ascending id order."""
    if delta <= 0:
        raise ValueError("separation must be positive")
    chosen: list = []
    for pid in sorted(space.ids):
        if all(space.dist(pid, q) >= delta for q in chosen):
            chosen.append(pid)
    return chosen


def packing_bound(R: float, delta: float, m: int, C: float) -> float:
    """Cardinality bound (C * R / delta)^m for delta-separated sets in a ball."""
    if R <= 0 or delta <= 0 or C <= 0 or m < 1:
        raise ValueError("packing bound needs positive R, delta, C and m >= 1")
    return (C * R / delta) ** m


# JSON interchange -----------------------------------------------------------

def load_space(doc: dict) -> PointedMetricSpace:
    """Build a space from its JSON document form (see README for the schema)."""
    if not isinstance(doc, dict):
        raise SchemaError("metric-space document must be an object")
    for key in ("basepoint", "metric", "points"):
        if key not in doc:
            raise SchemaError(f"metric-space document missing {key!r}")
    kind = doc["metric"]
    if kind not in _KINDS:
        raise SchemaError(f"metric must be one of {_KINDS}, got {kind!r}")
    pts = doc["points"]
    if not isinstance(pts, list) or not pts:
        raise SchemaError("points must be a non-empty list")
    ids = []
    coords = []
    for entry in pts:
        if not isinstance(entry, dict) or "id" not in entry:
            raise SchemaError("each point entry must be an object with an 'id'")
        ids.append(str(entry["id"]))
        if kind != "matrix":
            if "coords" not in entry:
                raise SchemaError(f"point {entry['id']!r} missing coords")
            coords.append([float(c) for c in entry["coords"]])
    try:
        if kind == "matrix":
            if "matrix" not in doc:
                raise SchemaError("matrix metric requires a 'matrix' field")
            return PointedMetricSpace(
                tuple(ids), str(doc["basepoint"]), "matrix", matrix=np.asarray(doc["matrix"], dtype=float)
            )
        lens = {len(c) for c in coords}
        if len(lens) != 1:
            raise SchemaError("all points must share one coordinate dimension")
        return PointedMetricSpace(
            tuple(ids), str(doc["basepoint"]), kind, coords=np.asarray(coords, dtype=float)
        )
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def space_to_doc(space: PointedMetricSpace) -> dict:
    doc: dict = {"basepoint": str(space.basepoint), "metric": space.kind}
    if space.kind == "matrix":
        doc["points"] = [{"id": str(pid)} for pid in space.ids]
        doc["matrix"] = [[float(x) for x in row] for row in space.distance_matrix()]
    else:
        doc["points"] = [
            {"id": str(pid), "coords": [float(x) for x in space.coords[i]]}
            for i, pid in enumerate(space.ids)
        ]
    return doc
