"""Closed-form moment sequences of the tree-destruction limit law and of the
local-time / exponential-functional laws it coincides with, together with the
tilt and scale operators that connect them.

All sequences are generated in log space and exponentiated once per entry;
an entry whose log exceeds the double-precision range raises OverflowError
naming the failing order.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .gammakit import log_beta, log_gamma, log_gamma_array

__all__ = [
    "MomentSequence",
    "BesselParams",
    "FkpParams",
    "fkp_moments",
    "fkp_quarter_closed_form",
    "kappa",
    "local_time_moments",
    "scaled_local_time_moments",
    "tilt",
    "tilted_moments",
    "tilted_moments_beta_fraction",
    "scale",
    "laplace_exponent",
    "exp_functional_moments",
    "mean_local_time_at_1",
    "mittag_leffler_moments",
]

_LOG_MAX = math.log(sys.float_info.max)

LN2 = math.log(2.0)


@dataclass(frozen=True)
class MomentSequence:
    """Finite prefix m_0..m_S of a positive moment sequence.

    ``values[s]`` is the s-th raw moment; ``values[0]`` is pinned to 1.
    Entries must be finite and strictly positive.  Instances are immutable;
    the backing array is marked read-only.
    """

    values: np.ndarray
    label: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("values must be a non-empty 1-d array")
        if vals[0] != 1.0:
            raise ValueError(f"m_0 must equal 1 exactly, got {vals[0]!r}")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
            raise ValueError("all moments must be finite and strictly positive")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "params", dict(self.params))

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, s):
        return self.values[s]

    @property
    def max_order(self) -> int:
        return self.values.size - 1

    def is_log_convex(self, rtol: float = 1e-12) -> bool:
        """Check m_{s-1} * m_{s+1} >= m_s**2 up to a relative slack.

        Holds exactly for moments of any nonnegative random variable
        (Cauchy-Schwarz); the slack absorbs floating-point rounding.
        """
        lg = np.log(self.values)
        return bool(np.all(lg[:-2] + lg[2:] - 2.0 * lg[1:-1] >= math.log1p(-rtol)))

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "params": dict(self.params),
            "values": [float(v) for v in self.values],
        }


@dataclass(frozen=True)
class BesselParams:
    """Parameters of the reinforced Bessel local-time law.

    d is the dimension in (0, 2), p < 1/2 the reinforcement parameter and t
    the time horizon.  The derived exponents are alpha = 1 - d/2 in (0, 1)
    and beta = alpha / (1 - 2p) > 0; either pair determines the other
    exactly.
    """

    d: float
    p: float
    t: float = 1.0

    def __post_init__(self):
        for name, v in (("d", self.d), ("p", self.p), ("t", self.t)):
            if not math.isfinite(float(v)):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if not 0.0 < self.d < 2.0:
            raise ValueError(f"d must lie in (0, 2) so that alpha is in (0, 1), got {self.d!r}")
        if not self.p < 0.5:
            raise ValueError(f"p must be < 1/2, got {self.p!r}")
        if not self.t > 0.0:
            raise ValueError(f"t must be positive, got {self.t!r}")

    @classmethod
    def from_alpha_beta(cls, alpha: float, beta: float, t: float = 1.0) -> "BesselParams":
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
        if not beta > 0.0:
            raise ValueError(f"beta must be positive, got {beta!r}")
        return cls(d=2.0 * (1.0 - alpha), p=0.5 - alpha / (2.0 * beta), t=t)

    @property
    def alpha(self) -> float:
        return 1.0 - self.d / 2.0

    @property
    def beta(self) -> float:
        return self.alpha / (1.0 - 2.0 * self.p)

    def with_t(self, t: float) -> "BesselParams":
        return BesselParams(d=self.d, p=self.p, t=t)

    def to_dict(self) -> dict:
        return {"d": self.d, "p": self.p, "t": self.t, "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class FkpParams:
    """Toll exponent a >= 0 of the tree recursion; a_prime = a + 1/2.

    sigma is the (unknown in general) scale of the n^{a'} normalisation and
    is only meaningful for simulation.
    """

    a: float
    sigma: float | None = None

    def __post_init__(self):
        if not (math.isfinite(float(self.a)) and self.a >= 0.0):
            raise ValueError(f"toll exponent a must be finite and >= 0, got {self.a!r}")
        if self.sigma is not None and not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive when given, got {self.sigma!r}")

    @property
    def a_prime(self) -> float:
        return self.a + 0.5


def _exp_sequence(log_values: np.ndarray, label: str) -> np.ndarray:
    """exp of per-order logs (orders 1..S) prefixed with m_0 = 1; raises
    OverflowError naming the first order that leaves double range."""
    over = log_values > _LOG_MAX
    if over.any():
        s_fail = int(np.argmax(over)) + 1
        raise OverflowError(
            f"{label}: moment overflows double precision at order s={s_fail} "
            f"(log value {log_values[s_fail - 1]:.1f})"
        )
    out = np.empty(log_values.size + 1)
    out[0] = 1.0
    out[1:] = np.exp(log_values)
    return out


def _require_order(s_max: int) -> int:
    s_max = int(s_max)
    if s_max < 1:
        raise ValueError(f"s_max must be >= 1, got {s_max!r}")
    return s_max


def fkp_moments(a_prime: float, s_max: int) -> MomentSequence:
    """Moments of the one-sided tree-destruction limit law.

    m_s = s! / 2^{s/2} * prod_{k=1..s} Gamma(k a') / Gamma(k a' + 1/2),
    with m_0 = 1.  Valid for any a' > 0; the tree recursion itself produces
    a' = a + 1/2 >= 1/2.
    """
    a_prime = float(a_prime)
    if not (math.isfinite(a_prime) and a_prime > 0.0):
        raise ValueError(f"a_prime must be finite and > 0, got {a_prime!r}")
    s_max = _require_order(s_max)
    label = f"fkp(a'={a_prime:g})"
    k = np.arange(1.0, s_max + 1.0)
    acc = np.cumsum(log_gamma_array(k * a_prime) - log_gamma_array(k * a_prime + 0.5))
    logs = log_gamma_array(k + 1.0) - 0.5 * k * LN2 + acc
    return MomentSequence(_exp_sequence(logs, label), label, {"a_prime": a_prime})


def kappa(params: BesselParams) -> float:
    """Scale factor (2t)^alpha Gamma(1+alpha) / ((1-2p)^alpha Gamma(1-alpha))."""
    a = params.alpha
    return math.exp(
        a * math.log(2.0 * params.t)
        + log_gamma(1.0 + a)
        - a * math.log(1.0 - 2.0 * params.p)
        - log_gamma(1.0 - a)
    )


def _log_scaled_local_time(params: BesselParams, s_max: int) -> np.ndarray:
    """log of mu_s = (1-2p)/Gamma(1+alpha) * Gamma(s) * prod_{j<s} Gamma(j b)/Gamma(a+j b)
    for s = 1..s_max."""
    a, b = params.alpha, params.beta
    head = math.log(1.0 - 2.0 * params.p) - log_gamma(1.0 + a)
    s = np.arange(1.0, s_max + 1.0)
    acc = np.zeros(s_max)
    if s_max >= 2:
        j = np.arange(1.0, s_max)
        acc[1:] = np.cumsum(log_gamma_array(j * b) - log_gamma_array(a + j * b))
    return head + log_gamma_array(s) + acc


def local_time_moments(params: BesselParams, s_max: int) -> MomentSequence:
    """Raw local-time moments at time t.

    E(L_t^s) = kappa(p,t)^s * (1-2p)/Gamma(1+alpha) * Gamma(s)
               * prod_{j=1..s-1} Gamma(j beta) / Gamma(alpha + j beta).
    """
    s_max = _require_order(s_max)
    label = f"local-time(alpha={params.alpha:g}, beta={params.beta:g}, t={params.t:g})"
    log_k = math.log(kappa(params))
    logs = _log_scaled_local_time(params, s_max) + np.arange(1.0, s_max + 1.0) * log_k
    return MomentSequence(_exp_sequence(logs, label), label, params.to_dict())


def scaled_local_time_moments(params: BesselParams, s_max: int) -> MomentSequence:
    """Moments of the local time divided by kappa(p, t); independent of t.

    The closed form carries no t.  That independence is verified on every
    call by rebuilding the sequence from the raw moments at two distinct
    times; disagreement beyond 1e-12 relative raises ArithmeticError.
    """
    s_max = _require_order(s_max)
    label = f"scaled-local-time(alpha={params.alpha:g}, beta={params.beta:g})"
    logs = _log_scaled_local_time(params, s_max)
    out = _exp_sequence(logs, label)

    orders = np.arange(1.0, s_max + 1.0)
    for t_check in (0.5, 2.0):
        k = kappa(params.with_t(t_check))
        raw_logs = logs + orders * math.log(k)
        fits = raw_logs <= _LOG_MAX  # skip orders whose raw moment overflows
        ratio = np.exp(raw_logs[fits]) / k ** orders[fits]
        direct = out[1:][fits]
        rel = np.abs(ratio - direct) / np.maximum(np.abs(ratio), np.abs(direct))
        if np.max(rel) > 1e-12:
            raise ArithmeticError(
                f"{label}: t-independence check failed at t={t_check} "
                f"(max relative deviation {np.max(rel):.3e})"
            )
    p = dict(params.to_dict())
    del p["t"]
    return MomentSequence(out, label, p)


def tilt(seq: MomentSequence) -> MomentSequence:
    """Size-bias a moment sequence: out[s] = seq[s+1] / seq[1].

    The output is one order shorter than the input.
    """
    if len(seq) < 2:
        raise ValueError("tilt needs at least orders 0 and 1")
    out = seq.values[1:] / seq.values[1]
    out[0] = 1.0
    return MomentSequence(out, f"tilt({seq.label})", seq.params)


def tilted_moments(alpha: float, beta: float, s_max: int) -> MomentSequence:
    """Closed form of the tilted scaled local time.

    E(T^s) = Gamma(s+1) * prod_{j=1..s} Gamma(j beta) / Gamma(alpha + j beta).
    Must equal tilt(scaled_local_time_moments(...)) entrywise.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    s_max = _require_order(s_max)
    label = f"tilted(alpha={alpha:g}, beta={beta:g})"
    s = np.arange(1.0, s_max + 1.0)
    acc = np.cumsum(log_gamma_array(s * beta) - log_gamma_array(alpha + s * beta))
    logs = log_gamma_array(s + 1.0) + acc
    return MomentSequence(_exp_sequence(logs, label), label, {"alpha": alpha, "beta": beta})


def tilted_moments_beta_fraction(alpha: float, m: int, s_max: int) -> MomentSequence:
    """Telescoped tilted moments for beta = alpha/m, m a positive integer.

    E(T^s) = Gamma(s+1) * prod_{j=1..m} Gamma(j alpha/m) / Gamma((s+j) alpha/m).
    Must equal tilted_moments(alpha, alpha/m, s_max) entrywise.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    m = int(m)
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    s_max = _require_order(s_max)
    label = f"tilted-beta-fraction(alpha={alpha:g}, m={m})"
    frac = alpha / m
    j = np.arange(1.0, m + 1.0)
    head = float(np.sum(log_gamma_array(j * frac)))
    s = np.arange(1.0, s_max + 1.0)
    tails = np.sum(log_gamma_array((s[:, None] + j[None, :]) * frac), axis=1)
    logs = log_gamma_array(s + 1.0) + head - tails
    return MomentSequence(_exp_sequence(logs, label), label, {"alpha": alpha, "m": m})


def scale(seq: MomentSequence, c: float) -> MomentSequence:
    """Moments of c*X from the moments of X: out[s] = c^s * seq[s]."""
    c = float(c)
    if not (math.isfinite(c) and c > 0.0):
        raise ValueError(f"scale factor must be finite and > 0, got {c!r}")
    label = f"scale({seq.label}, {c:g})"
    logs = np.log(seq.values[1:]) + np.arange(1.0, len(seq)) * math.log(c)
    return MomentSequence(_exp_sequence(logs, label), label, {**seq.params, "scale": c})


def laplace_exponent(r: float, a_prime: float, convention: str = "paper") -> float:
    """Laplace exponent of the subordinator behind the exponential functional.

    Evaluates 2^{-1/2} (1/m)^{1/2} Gamma(1/2) / ((1/2) B(1/2, m r)) with
    m = 4a' under the "paper" convention and m = 2a' under the "half"
    convention.  The two conventions disagree; identities.adjudicate_phi_convention
    measures which one is consistent with the exponential-functional moments.
    """
    r = float(r)
    a_prime = float(a_prime)
    if not (math.isfinite(r) and r > 0.0):
        raise ValueError(f"r must be finite and > 0, got {r!r}")
    if not (math.isfinite(a_prime) and a_prime > 0.0):
        raise ValueError(f"a_prime must be finite and > 0, got {a_prime!r}")
    if convention == "paper":
        m = 4.0 * a_prime
    elif convention == "half":
        m = 2.0 * a_prime
    else:
        raise ValueError(f"convention must be 'paper' or 'half', got {convention!r}")
    return math.exp(
        -0.5 * LN2 - 0.5 * math.log(m) + log_gamma(0.5) - math.log(0.5) - log_beta(0.5, m * r)
    )


def exp_functional_moments(params: BesselParams, s_max: int) -> MomentSequence:
    """Moments of the exponential functional of the subordinator at t = 1.

    Built as the tilt of the raw local-time moments at time 1, and verified
    on every call against kappa(p,1)^s * tilted_moments entrywise (1e-11
    relative); disagreement raises ArithmeticError.
    """
    if params.t != 1.0:
        raise ValueError(f"exp_functional_moments requires t = 1, got t={params.t!r}")
    s_max = _require_order(s_max)
    out = tilt(local_time_moments(params, s_max + 1))
    k = kappa(params)
    ref = tilted_moments(params.alpha, params.beta, s_max).values * k ** np.arange(s_max + 1)
    rel = np.abs(out.values - ref) / np.maximum(np.abs(out.values), np.abs(ref))
    if np.max(rel) > 1e-11:
        raise ArithmeticError(
            f"exp-functional cross-check failed (max relative deviation {np.max(rel):.3e})"
        )
    label = f"exp-functional(alpha={params.alpha:g}, beta={params.beta:g})"
    return MomentSequence(out.values, label, params.to_dict())


def mean_local_time_at_1(params: BesselParams) -> float:
    """Closed form of the mean local time at t = 1:
    2^alpha (1-2p)^{1-alpha} / Gamma(1-alpha)."""
    a = params.alpha
    return math.exp(
        a * LN2 + (1.0 - a) * math.log(1.0 - 2.0 * params.p) - log_gamma(1.0 - a)
    )


def fkp_quarter_closed_form(s_max: int) -> MomentSequence:
    """Telescoped gamma-type form of the a' = 1/4 limit-law moments.

    m_s = 2^{-s/2} Gamma(1/4) Gamma(1/2) Gamma(s+1)
          / (Gamma((s+1)/4) Gamma((s+2)/4)).
    Must equal fkp_moments(0.25, s_max) entrywise.
    """
    s_max = _require_order(s_max)
    label = "fkp-quarter-closed-form"
    head = log_gamma(0.25) + log_gamma(0.5)
    s = np.arange(1.0, s_max + 1.0)
    logs = (
        -0.5 * s * LN2
        + head
        + log_gamma_array(s + 1.0)
        - log_gamma_array((s + 1.0) / 4.0)
        - log_gamma_array((s + 2.0) / 4.0)
    )
    return MomentSequence(_exp_sequence(logs, label), label, {"a_prime": 0.25})


def mittag_leffler_moments(alpha: float, s_max: int) -> MomentSequence:
    """Mittag-Leffler ML(alpha) moments: Gamma(s+1) / Gamma(s alpha + 1)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    s_max = _require_order(s_max)
    label = f"mittag-leffler(alpha={alpha:g})"
    s = np.arange(1.0, s_max + 1.0)
    logs = log_gamma_array(s + 1.0) - log_gamma_array(s * alpha + 1.0)
    return MomentSequence(_exp_sequence(logs, label), label, {"alpha": alpha})
