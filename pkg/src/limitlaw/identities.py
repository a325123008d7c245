"""Cross-checks between moment sequences: elementwise comparison reports,
the Laplace-exponent convention adjudication, and moment-problem diagnostics
(Hankel positive-definiteness, Carleman partial sums)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .moments import (
    BesselParams,
    MomentSequence,
    exp_functional_moments,
    laplace_exponent,
)

__all__ = [
    "ComparisonReport",
    "HankelDiagnostics",
    "PhiAdjudication",
    "compare",
    "adjudicate_phi_convention",
    "hankel_positive_definite",
    "carleman_partial_sums",
]

# Guard for the relative-deviation denominator, so 0/0 never occurs at m_0.
_DENOM_EPS = 1e-300


@dataclass(frozen=True)
class ComparisonReport:
    """Elementwise relative deviation between two equally long sequences."""

    label_a: str
    label_b: str
    tolerance: float
    deviations: np.ndarray
    max_deviation: float
    passed: bool
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        devs = np.array(self.deviations, dtype=float)
        devs.flags.writeable = False
        object.__setattr__(self, "deviations", devs)

    def to_dict(self) -> dict:
        return {
            "label_a": self.label_a,
            "label_b": self.label_b,
            "tolerance": float(self.tolerance),
            "per_s_deviations": [float(d) for d in self.deviations],
            "max_deviation": float(self.max_deviation),
            "pass": bool(self.passed),
            "params": dict(self.params),
        }


def compare(seq_a, seq_b, tolerance: float) -> ComparisonReport:
    """Relative deviation |a-b| / max(|a|, |b|, eps) per order, with a pass
    flag against the tolerance."""
    if not tolerance > 0.0:
        raise ValueError(f"tolerance must be positive, got {tolerance!r}")
    a = np.asarray(seq_a.values if isinstance(seq_a, MomentSequence) else seq_a, dtype=float)
    b = np.asarray(seq_b.values if isinstance(seq_b, MomentSequence) else seq_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    devs = np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), _DENOM_EPS)
    max_dev = float(np.max(devs))
    label_a = seq_a.label if isinstance(seq_a, MomentSequence) else "array"
    label_b = seq_b.label if isinstance(seq_b, MomentSequence) else "array"
    params = {}
    if isinstance(seq_a, MomentSequence):
        params["a"] = dict(seq_a.params)
    if isinstance(seq_b, MomentSequence):
        params["b"] = dict(seq_b.params)
    return ComparisonReport(
        label_a=label_a,
        label_b=label_b,
        tolerance=float(tolerance),
        deviations=devs,
        max_deviation=max_dev,
        passed=max_dev <= tolerance,
        params=params,
    )


def _log10_slope(deviations: np.ndarray) -> float | None:
    """Slope of a least-squares line through (s, log10 dev_s); None when
    fewer than two orders have a nonzero deviation."""
    s = np.arange(deviations.size, dtype=float)
    mask = deviations > 0.0
    if np.count_nonzero(mask) < 2:
        return None
    coeffs = np.polyfit(s[mask], np.log10(deviations[mask]), 1)
    return float(coeffs[0])


@dataclass(frozen=True)
class PhiAdjudication:
    """Outcome of running the exponential-functional moment recursion under
    both Laplace-exponent conventions.

    Diagnostic only: ``matching`` lists the conventions whose recursion
    reproduces the tilt-derived moments within the tolerance, and the slopes
    record how the log-deviation trends with the order.
    """

    a_prime: float
    s_max: int
    tolerance: float
    reports: dict
    slopes: dict
    matching: tuple

    def to_dict(self) -> dict:
        return {
            "a_prime": self.a_prime,
            "s_max": self.s_max,
            "tolerance": self.tolerance,
            "reports": {k: r.to_dict() for k, r in self.reports.items()},
            "log10_deviation_slopes": dict(self.slopes),
            "matching": list(self.matching),
        }


def adjudicate_phi_convention(
    a_prime: float, s_max: int = 20, tolerance: float = 1e-8
) -> PhiAdjudication:
    """Evaluate s! / prod_{k<=s} Phi(k/2) under both the as-stated (4a') and
    the halved (2a') Laplace-exponent conventions and compare each against
    the tilt-derived exponential-functional moments.

    Never asserts a winner; returns both reports so the outcome can be
    recorded.  Deterministic in (a_prime, s_max, tolerance).
    """
    params = BesselParams.from_alpha_beta(0.5, a_prime, t=1.0)
    oracle = exp_functional_moments(params, s_max)

    reports: dict = {}
    slopes: dict = {}
    for convention in ("paper", "half"):
        vals = np.empty(s_max + 1)
        vals[0] = 1.0
        for s in range(1, s_max + 1):
            vals[s] = vals[s - 1] * s / laplace_exponent(s / 2.0, a_prime, convention)
        recursion = MomentSequence(
            vals,
            f"laplace-recursion[{convention}](a'={a_prime:g})",
            {"a_prime": a_prime, "convention": convention},
        )
        report = compare(recursion, oracle, tolerance)
        reports[convention] = report
        slopes[convention] = _log10_slope(report.deviations)

    matching = tuple(c for c in ("paper", "half") if reports[c].passed)
    return PhiAdjudication(
        a_prime=float(a_prime),
        s_max=int(s_max),
        tolerance=float(tolerance),
        reports=reports,
        slopes=slopes,
        matching=matching,
    )


@dataclass(frozen=True)
class HankelDiagnostics:
    """Pivot record of the Hankel matrices H_j = [m_{u+v}] for j <= max_order,
    plus Carleman partial sums when enough even orders are available."""

    orders: tuple
    smallest_pivots: tuple
    positive_definite: tuple
    pivot_threshold: float
    carleman: np.ndarray | None = None

    @property
    def all_positive_definite(self) -> bool:
        return all(self.positive_definite)

    def to_dict(self) -> dict:
        return {
            "orders": list(self.orders),
            "smallest_pivots": [float(p) for p in self.smallest_pivots],
            "positive_definite": [bool(b) for b in self.positive_definite],
            "pivot_threshold": float(self.pivot_threshold),
            "carleman_partial_sums": None
            if self.carleman is None
            else [float(c) for c in self.carleman],
        }


def _ldl_pivots(h: np.ndarray) -> np.ndarray:
    """Diagonal pivots of the unpivoted LDL^T factorization of a symmetric
    matrix; stops after the first non-positive pivot (the remaining ones are
    undefined)."""
    n = h.shape[0]
    low = np.zeros((n, n))
    d = np.zeros(n)
    for k in range(n):
        d[k] = h[k, k] - np.dot(low[k, :k] ** 2, d[:k])
        if d[k] <= 0.0:
            return d[: k + 1]
        low[k + 1 :, k] = (h[k + 1 :, k] - low[k + 1 :, :k] @ (d[:k] * low[k, :k])) / d[k]
    return d


def hankel_positive_definite(seq: MomentSequence, max_order: int) -> HankelDiagnostics:
    """Attempt an LDL^T factorization of every Hankel matrix H_j, j <= max_order.

    A pivot below 1e-10 times the largest diagonal entry counts as a
    positive-definiteness failure at that order; failures are recorded, not
    raised.  Requires moments up to order 2*max_order.
    """
    max_order = int(max_order)
    if max_order < 0:
        raise ValueError(f"max_order must be >= 0, got {max_order!r}")
    if len(seq) < 2 * max_order + 1:
        raise ValueError(
            f"need at least {2 * max_order + 1} moments for Hankel order {max_order}, "
            f"got {len(seq)}"
        )
    vals = seq.values
    orders = []
    pivots = []
    flags = []
    threshold = 0.0
    for j in range(max_order + 1):
        idx = np.arange(j + 1)
        h = vals[idx[:, None] + idx[None, :]]
        threshold = 1e-10 * float(np.max(np.diag(h)))
        d = _ldl_pivots(h)
        orders.append(j)
        pivots.append(float(np.min(d)))
        flags.append(bool(d.size == j + 1 and np.all(d > threshold)))

    carleman = None
    half = seq.max_order // 2
    if half >= 1:
        carleman = carleman_partial_sums(seq, half)
    return HankelDiagnostics(
        orders=tuple(orders),
        smallest_pivots=tuple(pivots),
        positive_definite=tuple(flags),
        pivot_threshold=threshold,
        carleman=carleman,
    )


def carleman_partial_sums(seq: MomentSequence, s_max: int | None = None) -> np.ndarray:
    """Partial sums of m_{2s}^{-1/(2s)} for s = 1..s_max.

    Divergence of the full series certifies moment determinacy; the output is
    descriptive only (divergence is not finitely decidable).  Nondecreasing
    by construction.
    """
    if s_max is None:
        s_max = seq.max_order // 2
    s_max = int(s_max)
    if s_max < 1:
        raise ValueError(f"s_max must be >= 1, got {s_max!r}")
    if 2 * s_max > seq.max_order:
        raise ValueError(
            f"need even moments up to order {2 * s_max}, sequence stops at {seq.max_order}"
        )
    s = np.arange(1, s_max + 1)
    terms = np.exp(-np.log(seq.values[2 * s]) / (2.0 * s))
    return np.cumsum(terms)
