"""Empirical ROC curves, concavity diagnostics, and PAV calibration.

The empirical curve is kept in exact rational arithmetic (vertex
coordinates are ``fractions.Fraction``), so toy-data results such as the
area under the curve are exact; floating point enters only through the
cached array views used by the numerical layers.

Conventions
-----------
* Thresholds are the unique score values; ties share a threshold.
* Classification is "positive if score > threshold", so the false alarm
  rate FAR(x) = P(X > x | Y=0) and hit rate HR(x) = P(X > x | Y=1) are
  nonincreasing in x.
* When the curve is read as a function of FAR, a vertical segment
  contributes its upper endpoint.  Vertical segments have measure zero
  in p, so integrals are unaffected by this choice.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DataError

__all__ = [
    "LabeledSample",
    "ThresholdTable",
    "EmpiricalRoc",
    "PavResult",
    "ConcavityDiagnostics",
    "empirical_roc",
    "eval_roc",
    "empirical_auc",
    "pav_calibrate",
    "recalibrated_sample",
    "concave_hull",
    "simplify_vertices",
    "concavity_diagnostics",
    "natural_identification_cdf",
]

Vertex = tuple[Fraction, Fraction]

# Likelihood ratios and chord slopes may be infinite; they are compared
# through (flag, value) keys where flag 1 marks infinity.  Two
# infinities compare equal, as required at the top of the marker range.
_INF_KEY = (1, Fraction(0))


def _slope_key(dx: Fraction, dy: Fraction):
    if dx == 0:
        return _INF_KEY
    return (0, dy / dx)


def _build_panels(vertices):
    """Collapse a vertex list into breakpoints with lower/upper values."""
    brk, lower, upper = [], [], []
    for a, b in vertices:
        if brk and brk[-1] == a:
            upper[-1] = b
        else:
            brk.append(a)
            lower.append(b)
            upper.append(b)
    return brk, lower, upper


def _eval_panels(brk, lower, upper, x, *, vertical="upper"):
    """Evaluate the polyline at x; ``vertical`` picks the value taken
    where a vertical segment sits exactly at x."""
    i = bisect_left(brk, x)
    if i < len(brk) and brk[i] == x:
        return upper[i] if vertical == "upper" else lower[i]
    if i == 0 or i == len(brk):
        raise ValueError(f"evaluation point {x} outside the polyline range")
    x0, x1 = brk[i - 1], brk[i]
    y0, y1 = upper[i - 1], lower[i]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


# ---------------------------------------------------------------------------
# Samples and threshold tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LabeledSample:
    """Parallel arrays of real-valued scores and binary outcomes."""

    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels)
        if scores.ndim != 1 or labels.ndim != 1:
            raise DataError("scores and labels must be one-dimensional")
        if scores.shape[0] != labels.shape[0]:
            raise DataError(
                f"scores and labels must have equal length, "
                f"got {scores.shape[0]} and {labels.shape[0]}"
            )
        if scores.shape[0] == 0:
            raise DataError("sample must be non-empty")
        if not np.all(np.isfinite(scores)):
            raise DataError("scores must be finite")
        if not np.isin(labels, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        labels = labels.astype(np.int64)
        scores.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    @property
    def n1(self) -> int:
        return int(self.labels.sum())

    @property
    def n0(self) -> int:
        return self.n - self.n1

    def require_both_classes(self) -> None:
        if self.n1 == 0:
            raise DataError("sample has no class-1 observations (all labels are 0)")
        if self.n0 == 0:
            raise DataError("sample has no class-0 observations (all labels are 1)")


@dataclass(frozen=True)
class ThresholdTable:
    """Per-threshold class counts and tail rates at the unique score values.

    ``far_num[i] / n0`` and ``hr_num[i] / n1`` are FAR and HR at
    threshold ``values[i]``; both are exact rationals by construction.
    """

    values: np.ndarray   # unique scores, ascending
    count0: np.ndarray   # class-0 multiplicity per value
    count1: np.ndarray
    far_num: np.ndarray  # numerator of FAR over n0
    hr_num: np.ndarray   # numerator of HR over n1
    n0: int
    n1: int

    @classmethod
    def from_sample(cls, sample: LabeledSample, *, require_both: bool = True) -> "ThresholdTable":
        if require_both:
            sample.require_both_classes()
        values, inverse = np.unique(sample.scores, return_inverse=True)
        m = values.shape[0]
        count1 = np.bincount(inverse, weights=sample.labels, minlength=m).astype(np.int64)
        total = np.bincount(inverse, minlength=m).astype(np.int64)
        count0 = total - count1
        n1 = int(count1.sum())
        n0 = int(count0.sum())
        # tail counts strictly above each threshold
        far_num = n0 - np.cumsum(count0)
        hr_num = n1 - np.cumsum(count1)
        return cls(
            values=values, count0=count0, count1=count1,
            far_num=far_num, hr_num=hr_num, n0=n0, n1=n1,
        )

    def far(self, i: int) -> Fraction:
        return Fraction(int(self.far_num[i]), self.n0)

    def hr(self, i: int) -> Fraction:
        return Fraction(int(self.hr_num[i]), self.n1)


# ---------------------------------------------------------------------------
# Empirical ROC curves
# ---------------------------------------------------------------------------

class EmpiricalRoc:
    """Piecewise-linear ROC curve with exact rational vertices.

    The vertex list starts at (0,0), ends at (1,1), and is nondecreasing
    in both coordinates.  Consecutive vertices are joined linearly;
    repeated FAR values encode vertical segments.

    Curves built from samples keep their coordinates as integer
    numerators over the class counts and only materialize ``Fraction``
    vertices on demand, so large simulated curves stay cheap while
    remaining exact.
    """

    __slots__ = ("n0", "n1", "_verts", "_nums", "_cache")

    def __init__(self, vertices, n0: int, n1: int):
        self.n0 = int(n0)
        self.n1 = int(n1)
        self._nums = None
        self._cache: dict = {}
        v = tuple((Fraction(a), Fraction(b)) for a, b in vertices)
        if not v:
            raise DataError("curve needs at least one vertex")
        if v[0] != (0, 0) or v[-1] != (1, 1):
            raise DataError("curve must run from (0,0) to (1,1)")
        for (a0, b0), (a1, b1) in zip(v, v[1:]):
            if a1 < a0 or b1 < b0:
                raise DataError("vertices must be nondecreasing in both coordinates")
        self._verts: tuple[Vertex, ...] | None = v

    @classmethod
    def _from_tail_counts(cls, far_num, hr_num, n0: int, n1: int) -> "EmpiricalRoc":
        """Build from vertex numerator arrays (over n0 resp. n1), ascending."""
        self = object.__new__(cls)
        self.n0 = int(n0)
        self.n1 = int(n1)
        self._verts = None
        self._cache = {}
        if far_num[0] != 0 or hr_num[0] != 0 or far_num[-1] != n0 or hr_num[-1] != n1:
            raise DataError("curve must run from (0,0) to (1,1)")
        if np.any(np.diff(far_num) < 0) or np.any(np.diff(hr_num) < 0):
            raise DataError("vertices must be nondecreasing in both coordinates")
        self._nums = (far_num, hr_num)
        return self

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        if self._verts is None:
            far_num, hr_num = self._nums
            self._verts = tuple(
                (Fraction(int(a), self.n0), Fraction(int(b), self.n1))
                for a, b in zip(far_num, hr_num)
            )
        return self._verts

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmpiricalRoc):
            return NotImplemented
        return (
            self.n0 == other.n0
            and self.n1 == other.n1
            and self.vertices == other.vertices
        )

    def __hash__(self) -> int:
        return hash((self.n0, self.n1, self.vertices))

    def __repr__(self) -> str:
        return f"EmpiricalRoc(<{len(self)} vertices>, n0={self.n0}, n1={self.n1})"

    def __len__(self) -> int:
        return len(self._verts) if self._verts is not None else self._nums[0].shape[0]

    @property
    def _exact_panels(self):
        if "exact" not in self._cache:
            self._cache["exact"] = _build_panels(self.vertices)
        return self._cache["exact"]

    @property
    def _float_panels(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if "float" not in self._cache:
            if self._nums is not None:
                far = self._nums[0] / self.n0
                hr = self._nums[1] / self.n1
            else:
                far = np.array([float(a) for a, _ in self._verts])
                hr = np.array([float(b) for _, b in self._verts])
            brk, first = np.unique(far, return_index=True)
            last = np.searchsorted(far, brk, side="right") - 1
            self._cache["float"] = (brk, hr[first], hr[last])
        return self._cache["float"]

    @property
    def breakpoints(self) -> np.ndarray:
        """Distinct FAR values of the vertices, as floats."""
        return self._float_panels[0]

    def eval_many(self, p: np.ndarray) -> np.ndarray:
        """Vectorized curve evaluation with the upper-endpoint convention."""
        brk, lower, upper = self._float_panels
        p = np.asarray(p, dtype=np.float64)
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("evaluation points must lie in [0, 1]")
        idx = np.clip(np.searchsorted(brk, p, side="left"), 0, brk.size - 1)
        on_brk = brk[idx] == p
        seg = np.clip(idx, 1, brk.size - 1)
        x0, x1 = brk[seg - 1], brk[seg]
        y0, y1 = upper[seg - 1], lower[seg]
        with np.errstate(invalid="ignore", divide="ignore"):
            interp = y0 + (y1 - y0) * (p - x0) / (x1 - x0)
        return np.where(on_brk, upper[idx], interp)


def empirical_roc(sample: LabeledSample) -> EmpiricalRoc:
    """Erect the empirical ROC curve of a two-class sample.

    Vertices are the raw diagnostic points (FAR(x), HR(x)) at every
    unique threshold, together with the corners (0,0) and (1,1), ordered
    by ascending FAR and then ascending HR.  Single-class samples are
    rejected with a message naming the missing class.
    """
    table = ThresholdTable.from_sample(sample)
    # descending threshold order gives ascending (FAR, HR) without sorting
    far = table.far_num[::-1]
    hr = table.hr_num[::-1]
    # the below-all-thresholds sentinel is the (1,1) corner; (0,0) is the
    # point at the top threshold
    far = np.append(far, table.n0)
    hr = np.append(hr, table.n1)
    keep = np.ones(far.shape[0], dtype=bool)
    keep[1:] = (np.diff(far) != 0) | (np.diff(hr) != 0)
    return EmpiricalRoc._from_tail_counts(far[keep], hr[keep], table.n0, table.n1)


def eval_roc(curve: EmpiricalRoc, p) -> float | Fraction:
    """Evaluate the curve as a function of the false alarm rate.

    Exact ``Fraction`` (or int) input yields an exact result; floats use
    the vectorized float path.  At a FAR carrying a vertical segment the
    upper endpoint is returned.
    """
    if isinstance(p, (Fraction, int)) and not isinstance(p, bool):
        p = Fraction(p)
        if not 0 <= p <= 1:
            raise ValueError(f"p={p} outside [0, 1]")
        brk, lower, upper = curve._exact_panels
        return _eval_panels(brk, lower, upper, p, vertical="upper")
    return float(curve.eval_many(np.asarray([p], dtype=np.float64))[0])


def empirical_auc(curve: EmpiricalRoc) -> Fraction:
    """Exact trapezoidal area under the vertex polyline.

    Equals the Mann-Whitney statistic with ties at half weight, divided
    by n0*n1.
    """
    if curve._nums is not None:
        far, hr = curve._nums
        twice = np.diff(far) * (hr[:-1] + hr[1:])
        return Fraction(int(twice.sum()), 2 * curve.n0 * curve.n1)
    area = Fraction(0)
    for (a0, b0), (a1, b1) in zip(curve.vertices, curve.vertices[1:]):
        area += (a1 - a0) * (b0 + b1) / 2
    return area


# ---------------------------------------------------------------------------
# PAV calibration and the concave hull
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PavResult:
    """Isotonic per-threshold event probabilities and their block partition.

    ``values[i]`` is the calibrated conditional event probability at the
    i-th unique threshold; ``blocks`` are half-open index ranges of the
    maximal constant segments.  Within each block the value equals the
    block's event count over its size.
    """

    thresholds: np.ndarray
    values: tuple[Fraction, ...]
    blocks: tuple[tuple[int, int], ...]


def pav_calibrate(sample: LabeledSample) -> PavResult:
    """Pool-adjacent-violators calibration of per-threshold frequencies.

    Weighted isotonic regression of the event frequency against the
    marker order, in exact arithmetic.  The recalibrated classifier's
    ROC curve is the concave hull of the original one.  Single-class
    samples are permitted and yield the constant calibration.
    """
    table = ThresholdTable.from_sample(sample, require_both=False)
    m = table.values.shape[0]
    # blocks on a stack as [event count, size, start index]
    stack: list[list[int]] = []
    for i in range(m):
        stack.append([int(table.count1[i]), int(table.count0[i] + table.count1[i]), i])
        while len(stack) > 1 and (
            stack[-2][0] * stack[-1][1] > stack[-1][0] * stack[-2][1]
        ):
            ones, size, _ = stack.pop()
            stack[-1][0] += ones
            stack[-1][1] += size
    # merge adjacent blocks that landed on the same value
    merged: list[list[int]] = []
    for ones, size, start in stack:
        if merged and merged[-1][0] * size == ones * merged[-1][1]:
            merged[-1][0] += ones
            merged[-1][1] += size
        else:
            merged.append([ones, size, start])
    values: list[Fraction] = []
    blocks: list[tuple[int, int]] = []
    for j, (ones, size, start) in enumerate(merged):
        end = merged[j + 1][2] if j + 1 < len(merged) else m
        blocks.append((start, end))
        values.extend([Fraction(ones, size)] * (end - start))
    return PavResult(
        thresholds=table.values,
        values=tuple(values),
        blocks=tuple(blocks),
    )


def recalibrated_sample(sample: LabeledSample, pav: PavResult | None = None) -> LabeledSample:
    """Re-score every observation by its threshold's calibrated probability."""
    if pav is None:
        pav = pav_calibrate(sample)
    _, inverse = np.unique(sample.scores, return_inverse=True)
    calibrated = np.array([float(v) for v in pav.values])
    return LabeledSample(scores=calibrated[inverse], labels=sample.labels)


def _upper_hull(vertices: tuple[Vertex, ...]) -> list[Vertex]:
    """Extreme points of the least concave majorant (monotone chain)."""
    hull: list[Vertex] = []
    for p in vertices:
        while len(hull) >= 2:
            (oa, ob), (aa, ab) = hull[-2], hull[-1]
            cross = (aa - oa) * (p[1] - ob) - (ab - ob) * (p[0] - oa)
            if cross >= 0:  # left turn or collinear: middle point is not extreme
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def concave_hull(curve: EmpiricalRoc) -> EmpiricalRoc:
    """Least concave majorant of the curve.

    The output vertices are the hull's extreme points together with the
    input vertices projected vertically up onto the hull, so every input
    FAR value reappears as a hull vertex.  Concave inputs are returned
    unchanged.
    """
    extreme = _upper_hull(curve.vertices)
    brk, lower, upper = _build_panels(extreme)
    points = set(extreme)
    for a, _ in curve.vertices:
        points.add((a, _eval_panels(brk, lower, upper, a, vertical="upper")))
    return EmpiricalRoc(vertices=tuple(sorted(points)), n0=curve.n0, n1=curve.n1)


def simplify_vertices(curve: EmpiricalRoc) -> tuple[Vertex, ...]:
    """Vertex list with interior collinear points removed (canonical form)."""
    out: list[Vertex] = []
    for p in curve.vertices:
        while len(out) >= 2:
            (oa, ob), (aa, ab) = out[-2], out[-1]
            if (aa - oa) * (p[1] - ob) == (ab - ob) * (p[0] - oa):
                out.pop()
            else:
                break
        out.append(p)
    return tuple(out)


# ---------------------------------------------------------------------------
# Concavity diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConcavityDiagnostics:
    """The three equivalent concavity criteria evaluated on a sample."""

    curve_concave: bool
    lr_nondecreasing: bool
    cep_nondecreasing: bool

    def __iter__(self):
        yield self.curve_concave
        yield self.lr_nondecreasing
        yield self.cep_nondecreasing


def concavity_diagnostics(sample: LabeledSample) -> ConcavityDiagnostics:
    """Check concavity of the empirical curve three equivalent ways.

    (a) chord slopes of the empirical ROC curve are nonincreasing;
    (b) discrete likelihood ratios are nondecreasing in the marker, with
        an infinite ratio where the class-0 mass vanishes (admissible
        only at the top of the marker range);
    (c) per-threshold conditional event probabilities are nondecreasing.

    The three booleans always coincide.
    """
    table = ThresholdTable.from_sample(sample)
    curve = empirical_roc(sample)

    slopes = [
        _slope_key(a1 - a0, b1 - b0)
        for (a0, b0), (a1, b1) in zip(curve.vertices, curve.vertices[1:])
    ]
    curve_concave = all(s1 <= s0 for s0, s1 in zip(slopes, slopes[1:]))

    lr_keys = []
    for i in range(table.values.shape[0]):
        c0, c1 = int(table.count0[i]), int(table.count1[i])
        if c0 == 0:
            lr_keys.append(_INF_KEY)
        else:
            lr_keys.append((0, Fraction(c1 * table.n0, c0 * table.n1)))
    lr_nondecreasing = all(k0 <= k1 for k0, k1 in zip(lr_keys, lr_keys[1:]))

    ceps = [
        Fraction(int(table.count1[i]), int(table.count0[i] + table.count1[i]))
        for i in range(table.values.shape[0])
    ]
    cep_nondecreasing = all(c0 <= c1 for c0, c1 in zip(ceps, ceps[1:]))

    return ConcavityDiagnostics(curve_concave, lr_nondecreasing, cep_nondecreasing)


# ---------------------------------------------------------------------------
# Natural identification
# ---------------------------------------------------------------------------

def natural_identification_cdf(curve: EmpiricalRoc, x) -> float | Fraction:
    """CDF of the class-1 score under the natural identification.

    With class-0 scores standard uniform, the distribution defined by
    ``1 - inf { hr : (far, hr) on the curve, far >= 1 - x }`` realizes
    the curve exactly.  Values are clamped to 0 below 0 and 1 above 1,
    and the result is nondecreasing in x.
    """
    exact = isinstance(x, (Fraction, int)) and not isinstance(x, bool)
    if exact:
        x = Fraction(x)
        if x <= 0:
            return Fraction(0)
        if x >= 1:
            return Fraction(1)
        brk, lower, upper = curve._exact_panels
        return 1 - _eval_panels(brk, lower, upper, 1 - x, vertical="lower")
    x = float(x)
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    brk, lower, upper = curve._float_panels
    return 1.0 - float(
        _eval_panels(list(brk), list(lower), list(upper), 1.0 - x, vertical="lower")
    )
