"""Analyses of fully-offensive batches.

Covers total-time histograms, mean material advantage and its collapse on
``t * (d1 - d2)``, even-sequence lengths with exchange smoothing, exponential
decay rates of the sequence-length distribution and the exponent that
collapses those rates onto ``(1 - <d>) ** alpha``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np
from numba import njit

from .harness import BatchResult, MatchRecord

Pair = tuple[float, float]


def canonical_pair(d1: float, d2: float) -> Pair:
    """Order a pair so the first entry is the better defender."""
    return (d1, d2) if d1 >= d2 else (d2, d1)


# ---------------------------------------------------------------------------
# total time

@dataclass
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    n_total: int
    overflow: int = 0  # samples at or beyond the last edge

    def __post_init__(self):
        if len(self.counts) != len(self.bin_edges) - 1:
            raise ValueError("need len(counts) == len(bin_edges) - 1")

    @property
    def normalized(self) -> np.ndarray:
        return self.counts / self.n_total


def total_time_histogram(taus, bin_width: int, upper: int | None = None) -> Histogram:
    """Fixed-width bins starting at ``min(taus)`` rounded down to ``bin_width``.

    Without ``upper`` the bins cover every sample. With it, samples ``>= upper``
    are counted in ``overflow``.
    """
    taus = np.asarray(taus, dtype=np.int64)
    if taus.size == 0:
        raise ValueError("empty sample")
    if bin_width < 1:
        raise ValueError("bin_width must be positive")
    lo = (int(taus.min()) // bin_width) * bin_width
    if upper is None:
        n_bins = (int(taus.max()) - lo) // bin_width + 1
    else:
        n_bins = max(0, -(-(int(upper) - lo) // bin_width))
    edges = lo + bin_width * np.arange(n_bins + 1)
    idx = (taus - lo) // bin_width
    inside = idx < n_bins
    counts = np.bincount(idx[inside], minlength=n_bins)
    return Histogram(edges, counts, int(taus.size), int(np.count_nonzero(~inside)))


def ks_distance(sample_a, sample_b) -> float:
    """Largest gap between the two empirical CDFs."""
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    points = np.concatenate([a, b])
    fa = np.searchsorted(a, points, side="right") / a.size
    fb = np.searchsorted(b, points, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


# ---------------------------------------------------------------------------
# material advantage

@dataclass
class AdvantageCurve:
    t_max: int
    mean_v: np.ndarray  # entry t-1 holds <v(t)>
    n: int
    delta_d: float = 0.0
    sem: np.ndarray | None = None

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, self.t_max + 1)


def _trajectories(records) -> Iterable[np.ndarray]:
    if isinstance(records, BatchResult):
        for i in range(records.n):
            yield records.trajectory(i)[0]
    else:
        for rec in records:
            yield rec.v_trajectory


def mean_advantage(records, t_max: int, delta_d: float = 0.0) -> AdvantageCurve:
    """Average v(t) over every record for t = 1..t_max.

    Every record must last at least ``t_max`` plies, so each time point
    averages the same matches.
    """
    if t_max < 1:
        raise ValueError("t_max must be positive")
    rows = []
    for v in _trajectories(records):
        if len(v) < t_max:
            raise ValueError(f"record of length {len(v)} is shorter than t_max={t_max}")
        rows.append(v[:t_max])
    if not rows:
        raise ValueError("no records")
    data = np.asarray(rows, dtype=float)
    n = data.shape[0]
    sem = data.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(t_max)
    return AdvantageCurve(t_max, data.mean(axis=0), n, float(delta_d), sem)


@dataclass
class AdvantageCollapse:
    slope: float
    r2: float
    curve_slopes: list[float]


def _origin_fit(x, y):
    sxx = float(np.dot(x, x))
    slope = float(np.dot(x, y)) / sxx
    ss_res = float(np.sum((y - slope * x) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return slope, r2


def advantage_collapse(curves: Iterable[AdvantageCurve]) -> AdvantageCollapse:
    """Least squares through the origin of <v> on ``t * delta_d``, pooled over curves.

    Curves with ``delta_d == 0`` carry no information on the slope and are skipped.
    """
    used = [c for c in curves if c.delta_d > 0]
    if not used:
        raise ValueError("need at least one curve with delta_d > 0")
    xs = [c.t * c.delta_d for c in used]
    ys = [np.asarray(c.mean_v, dtype=float) for c in used]
    slope, r2 = _origin_fit(np.concatenate(xs), np.concatenate(ys))
    return AdvantageCollapse(slope, r2, [_origin_fit(x, y)[0] for x, y in zip(xs, ys)])


def collapse_table(curves: Iterable[AdvantageCurve]) -> list[tuple[float, float]]:
    rows = []
    for c in curves:
        rows.extend(zip((c.t * c.delta_d).tolist(), np.asarray(c.mean_v).tolist()))
    return rows


# ---------------------------------------------------------------------------
# even sequences

@njit(cache=True)
def _smooth(v):
    s = v.copy()
    for t in range(1, len(s) - 1):
        if s[t] != s[t - 1] and s[t + 1] == s[t - 1]:
            s[t] = s[t - 1]
    return s


@njit(cache=True)
def _run_lengths(s, out):
    k = 0
    run = 1
    for t in range(1, len(s)):
        if s[t] == s[t - 1]:
            run += 1
        else:
            out[k] = run
            k += 1
            run = 1
    if len(s) > 0:
        out[k] = run
        k += 1
    return k


@njit(cache=True)
def _length_counts(v_flat, offsets, max_len):
    counts = np.zeros(max_len + 1, dtype=np.int64)
    out = np.empty(max_len, dtype=np.int64)
    for m in range(offsets.shape[0] - 1):
        s = _smooth(v_flat[offsets[m]:offsets[m + 1]])
        k = _run_lengths(s, out)
        for i in range(k):
            counts[out[i]] += 1
    return counts


def smooth_exchanges(v_trajectory) -> np.ndarray:
    """Flatten one-ply excursions: v(t) is reset to v(t-1) when v(t+1) == v(t-1).

    Applied left to right, so the result is a fixed point of this function.
    """
    return _smooth(np.asarray(v_trajectory, dtype=np.int64))


def even_sequences(v_trajectory, capture_plies=None) -> list[int]:
    """Lengths of maximal constant-advantage runs after exchange smoothing.

    ``capture_plies`` is only used to check that v moves exactly at captures.
    """
    v = np.asarray(v_trajectory, dtype=np.int64)
    if capture_plies is not None:
        caps = np.asarray(capture_plies, dtype=bool)
        if caps.shape != v.shape:
            raise ValueError("capture_plies must match the trajectory length")
        steps = np.abs(np.diff(v))
        if np.any(steps > 1) or np.any((steps == 1) != caps[1:]):
            raise ValueError("v must change by exactly 1 at capture plies and nowhere else")
    if v.size == 0:
        return []
    out = np.empty(v.size, dtype=np.int64)
    k = _run_lengths(_smooth(v), out)
    return out[:k].tolist()


def sequence_length_counts(records) -> np.ndarray:
    """``counts[L]`` = number of even sequences of length L over all records."""
    if isinstance(records, BatchResult):
        v_flat, offsets = records.v_flat, records.offsets
        if offsets is None:
            raise ValueError("batch was run without trajectory retention")
    else:
        trajs = list(_trajectories(records))
        offsets = np.zeros(len(trajs) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(v) for v in trajs])
        v_flat = np.concatenate(trajs) if trajs else np.zeros(0, dtype=np.int8)
    max_len = int(np.max(np.diff(offsets))) if len(offsets) > 1 else 0
    counts = _length_counts(np.asarray(v_flat, dtype=np.int64), np.asarray(offsets), max(max_len, 1))
    last = np.flatnonzero(counts)
    return counts[: last[-1] + 1] if last.size else counts[:1]


@dataclass
class SequenceDistribution:
    counts: np.ndarray  # counts[L]; counts[0] is always 0
    d1: float = float("nan")
    d2: float = float("nan")

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.size == 0 or self.counts.sum() == 0:
            raise ValueError("empty distribution")
        if self.counts[0] != 0:
            raise ValueError("sequence lengths start at 1")

    @classmethod
    def from_lengths(cls, lengths, d1=float("nan"), d2=float("nan")):
        lengths = np.asarray(lengths, dtype=np.int64)
        if lengths.size and lengths.min() < 1:
            raise ValueError("sequence lengths start at 1")
        return cls(np.bincount(lengths), d1, d2)

    @property
    def mean_d(self) -> float:
        return (self.d1 + self.d2) / 2

    @property
    def lengths(self) -> np.ndarray:
        return np.flatnonzero(self.counts)

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts[self.lengths] / self.counts.sum()


@dataclass
class LambdaFit:
    lam: float
    r2: float
    n_bins: int


def fit_lambda(dist: SequenceDistribution, L_min: int = 2, L_max: int = 15) -> LambdaFit:
    """Decay rate from a least-squares line through (L, ln P(L)) over populated bins."""
    L = dist.lengths
    P = dist.probabilities
    sel = (L >= L_min) & (L <= L_max)
    if np.count_nonzero(sel) < 3:
        raise ValueError(f"fewer than 3 populated bins in [{L_min}, {L_max}]")
    x = L[sel].astype(float)
    y = np.log(P[sel])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return LambdaFit(float(-slope), r2, int(np.count_nonzero(sel)))


def fit_lambda_mle(data, L_min: int = 1) -> float:
    """Maximum-likelihood rate of a geometric law on ``L >= L_min``.

    ``data`` is a SequenceDistribution or a raw sample of lengths.
    """
    if isinstance(data, SequenceDistribution):
        L = np.arange(data.counts.size)
        w = np.where(L >= L_min, data.counts, 0)
        total = w.sum()
        excess = float(np.dot(w, L - L_min)) / total if total else float("nan")
    else:
        L = np.asarray(data, dtype=float)
        L = L[L >= L_min]
        total = L.size
        excess = float(np.mean(L - L_min)) if total else float("nan")
    if not total:
        raise ValueError(f"no lengths >= {L_min}")
    if excess <= 0:
        return math.inf
    return math.log1p(1.0 / excess)


# ---------------------------------------------------------------------------
# collapse exponent

def default_alpha_grid() -> np.ndarray:
    return np.arange(101) / 100


@dataclass
class CollapseFit:
    lambda_by_pair: dict
    alpha: float
    dispersion: float
    alpha_grid: np.ndarray = field(repr=False)
    dispersion_curve: np.ndarray = field(repr=False)

    def dispersion_at(self, alpha: float) -> float:
        i = int(np.argmin(np.abs(self.alpha_grid - alpha)))
        return float(self.dispersion_curve[i])


def exponential_ks(rate_a: float, rate_b: float) -> float:
    """KS distance between exponential laws with the given rates."""
    if rate_a <= 0 or rate_b <= 0:
        raise ValueError("rates must be positive")
    if math.isclose(rate_a, rate_b, rel_tol=1e-12):
        return 0.0
    x = math.log(rate_a / rate_b) / (rate_a - rate_b)
    return abs(math.exp(-rate_a * x) - math.exp(-rate_b * x))


def _tail_survival(dist: SequenceDistribution, L_min: int) -> np.ndarray:
    """``S[m] = P(L - L_min >= m)`` for m = 0, 1, ..."""
    tail = dist.counts[L_min:].astype(float)
    if tail.sum() == 0:
        raise ValueError(f"no lengths >= {L_min}")
    return np.cumsum(tail[::-1])[::-1] / tail.sum()


def _survival_at(surv, scale, x):
    # log-linear between lattice points, so a geometric law maps onto an exponential
    knots = np.arange(surv.size) * scale
    log_s = np.log(np.maximum(surv, 1e-300))
    out = np.exp(np.interp(x, knots, log_s))
    return np.where(x > knots[-1], 0.0, out)


def _survival_ks(surv_a, scale_a, surv_b, scale_b, points: int = 4000) -> float:
    top = max((surv_a.size - 1) * scale_a, (surv_b.size - 1) * scale_b)
    x = np.union1d(np.linspace(0.0, top, points),
                   np.concatenate([np.arange(surv_a.size) * scale_a,
                                   np.arange(surv_b.size) * scale_b]))
    return float(np.max(np.abs(_survival_at(surv_a, scale_a, x)
                               - _survival_at(surv_b, scale_b, x))))


def fit_alpha(lambda_by_pair: Mapping[Pair, float], alpha_grid=None,
              distributions: Mapping[Pair, SequenceDistribution] | None = None,
              L_min: int = 2) -> CollapseFit:
    """Exponent alpha that best collapses the sequence-length laws.

    For each alpha the length axis of every pair is multiplied by
    ``(1 - <d>) ** alpha``; dispersion is the mean pairwise KS distance of the
    rescaled laws. With ``distributions`` the empirical tails ``L - L_min`` are
    compared, their survival functions interpolated log-linearly between
    lattice points; otherwise the exponential laws with the given rates.
    """
    pairs = list(lambda_by_pair)
    mean_d = {p: (p[0] + p[1]) / 2 for p in pairs}
    if any(m >= 1 for m in mean_d.values()):
        raise ValueError("mean expertise must be below 1")
    if len({round(m, 12) for m in mean_d.values()}) < 3:
        raise ValueError("need at least 3 distinct mean expertise values")
    grid = default_alpha_grid() if alpha_grid is None else np.asarray(alpha_grid, dtype=float)
    if grid.size == 0 or grid.min() < 0 or grid.max() > 1:
        raise ValueError("alpha grid must lie in [0, 1]")
    if distributions is not None:
        survs = {p: _tail_survival(distributions[p], L_min) for p in pairs}

    curve = np.empty(grid.size)
    for g, alpha in enumerate(grid):
        scale = {p: (1.0 - mean_d[p]) ** alpha for p in pairs}
        gaps = []
        for a, b in combinations(pairs, 2):
            if distributions is None:
                gaps.append(exponential_ks(lambda_by_pair[a] / scale[a],
                                           lambda_by_pair[b] / scale[b]))
            else:
                gaps.append(_survival_ks(survs[a], scale[a], survs[b], scale[b]))
        curve[g] = float(np.mean(gaps))
    best = int(np.argmin(curve))
    return CollapseFit(dict(lambda_by_pair), float(grid[best]), float(curve[best]), grid, curve)


# ---------------------------------------------------------------------------
# CSV output

def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_histogram_csv(hist: Histogram, path) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["bin_lo", "bin_hi", "count"])
        for lo, hi, c in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.counts):
            w.writerow([int(lo), int(hi), int(c)])
        if hist.overflow:
            w.writerow([int(hist.bin_edges[-1]), "inf", hist.overflow])


def write_curve_csv(curve: AdvantageCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["t", "mean_v", "n"])
        for t, m in zip(curve.t, curve.mean_v):
            w.writerow([int(t), f"{m:.6f}", curve.n])


def write_collapse_csv(curves: Iterable[AdvantageCurve], path) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["t_delta_d", "mean_v"])
        for x, y in collapse_table(curves):
            w.writerow([f"{x:.6f}", f"{y:.6f}"])


def write_sequence_csv(dist: SequenceDistribution, path) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["L", "P"])
        for L, p in zip(dist.lengths, dist.probabilities):
            w.writerow([int(L), f"{p:.8e}"])


def write_lambda_csv(fits: Mapping[Pair, LambdaFit], path) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["d1", "d2", "lambda", "r2"])
        for (d1, d2), fit in fits.items():
            w.writerow([f"{d1:.6g}", f"{d2:.6g}", f"{fit.lam:.8f}", f"{fit.r2:.6f}"])


def read_lambda_csv(path) -> dict[Pair, float]:
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out[(float(row["d1"]), float(row["d2"]))] = float(row["lambda"])
    return out


def write_alpha_csv(fit: CollapseFit, path) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["alpha", "dispersion"])
        for a, disp in zip(fit.alpha_grid, fit.dispersion_curve):
            w.writerow([f"{a:.4f}", f"{disp:.8f}"])
