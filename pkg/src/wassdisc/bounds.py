"""Closed-form constants and theoretical bounds tying W_p to discrepancies.

Every function evaluates an explicit formula; nothing here touches point
sets.  The main families:

* cube regime bounds on W_p^p in terms of the uniform discrepancy D,
  with distinct shapes for p > d (linear in D, optionally minus a
  positive D^(p/d) correction on a validity window), p = d (D plus a
  D*log(1/D) term), and p < d (proportional to D^(p/d));

* the sharpened W_1 bound for d >= 2 obtained by optimizing the dyadic
  truncation level, with its dimension constant

      kappa_d = 2^(1-1/d) * (3(d-1) / (2(1-2^(1-d))))^(1/d) * 2d/(d-1),

  decreasing to 4 as d grows;

* real-line moment and exponential-moment bounds on W_1 by powers of the
  Kolmogorov-Smirnov distance;

* the reverse direction: when one measure has a density g, the star
  discrepancy is bounded by a power of the sup-norm W_1 times

      C_{r,d} = binom(r+d, r)^(-1/(r+d)) * ((d/r)^(r/(r+d)) + (r/d)^(d/(r+d))),

  where r is tied to the integrability of g (r = 1 for bounded g) and
  the binomial coefficient extends to real r through the Gamma function.

Bounds whose multiplicative constant is not explicit take a caller
supplied ``scale`` (default 1) and are labeled shape-only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from scipy.special import gammaln

from .errors import DomainError, RegimeViolationError
from .measures import Norm, diameter


class Regime(enum.Enum):
    P_GT_D = "p_gt_d"
    P_EQ_D = "p_eq_d"
    P_LT_D = "p_lt_d"
    REFINED = "refined"
    RD_SHAPE = "rd_shape"
    REVERSE = "reverse"
    MOMENT_1D = "moment_1d"
    EXP_1D = "exp_1d"


@dataclass(frozen=True)
class BoundResult:
    """One evaluated bound: value = constant * disc^exponent + secondary."""

    value: float
    regime: Regime
    constant: float
    exponent: float
    secondary: float = 0.0
    inputs: dict = field(default_factory=dict)

    def recomputed(self) -> float:
        disc = self.inputs["disc"]
        if disc == 0.0:
            return 0.0
        return self.constant * disc ** self.exponent + self.secondary


def b_pd(p: float, d: int) -> float:
    """Leading constant of the p > d cube bound: (2^p+1) / (2(2^(p-d)-1))."""
    if p <= d:
        raise RegimeViolationError(f"b_pd needs p > d, got p={p}, d={d}")
    return (2.0 ** p + 1.0) / (2.0 * (2.0 ** (p - d) - 1.0))


def refined_window(p: float, d: int) -> bool:
    """Validity window of the two-term p > d bound: 1 + 2^-p - 2^(p-d) > 0."""
    return 1.0 + 2.0 ** (-p) - 2.0 ** (p - d) > 0.0


def bound_cube(p: float, d: int, dinf: float, norm: Norm = Norm.LINF) -> BoundResult:
    """Upper bound on W_p^p by the uniform discrepancy, per regime.

    At dinf = 0 all regimes return 0 (x*log(1/x) -> 0 by continuity).
    For p > d the sharper two-term variant is returned whenever its
    strict validity window holds; boundary equality falls back to the
    one-term form.
    """
    if p < 1 or d < 1:
        raise DomainError(f"need p >= 1 and d >= 1, got p={p}, d={d}")
    if not 0.0 <= dinf <= 1.0:
        raise DomainError(f"dinf must lie in [0,1], got {dinf}")
    dd = diameter(norm, d) ** p
    inputs = {"p": p, "d": d, "disc": dinf, "norm": norm.value}
    if p > d:
        main_c = dd * b_pd(p, d)
        if refined_window(p, d):
            corr = dd * 2.0 ** (p * (1.0 - 1.0 / d)) * (1.0 + 2.0 ** (-p) - 2.0 ** (p - d)) / (
                2.0 ** (p - d) - 1.0
            )
            value = 0.0 if dinf == 0.0 else main_c * dinf - corr * dinf ** (p / d)
            return BoundResult(value, Regime.REFINED, main_c, 1.0,
                               secondary=-corr * dinf ** (p / d) if dinf else 0.0, inputs=inputs)
        return BoundResult(main_c * dinf, Regime.P_GT_D, main_c, 1.0, inputs=inputs)
    if p == d:
        c1 = dd * ((d + 1.0) * 2.0 ** (d - 1) / d + 1.0 / (2.0 * d))
        c2 = dd * (2.0 ** d + 1.0) / (2.0 * d * math.log(2.0))
        log_term = 0.0 if dinf == 0.0 else c2 * dinf * math.log(1.0 / dinf)
        return BoundResult(c1 * dinf + log_term, Regime.P_EQ_D, c1, 1.0,
                           secondary=log_term, inputs=inputs)
    c = dd * 2.0 ** (-p / d) * ((2.0 ** p + 1.0) / (1.0 - 2.0 ** (p - d)) + 2.0 ** p)
    value = 0.0 if dinf == 0.0 else c * dinf ** (p / d)
    return BoundResult(value, Regime.P_LT_D, c, p / d, inputs=inputs)


def kappa(d: int) -> float:
    """Dimension constant of the sharpened W_1-vs-star-discrepancy bound."""
    if d < 2:
        raise RegimeViolationError(f"kappa needs d >= 2, got {d}")
    return (
        2.0 ** (1.0 - 1.0 / d)
        * (3.0 * (d - 1.0) / (2.0 * (1.0 - 2.0 ** (1.0 - d)))) ** (1.0 / d)
        * 2.0 * d / (d - 1.0)
    )


def bound_w1_refined(d: int, disc: float, norm: Norm = Norm.LINF, star: bool = False) -> BoundResult:
    """Sharpened W_1 bound for d >= 2: constant * disc^(1/d) * diam.

    ``star=False`` takes the uniform discrepancy with constant kappa_d/2;
    ``star=True`` takes the star discrepancy with constant kappa_d (via
    D_inf <= 2^d D_star).
    """
    if d < 2:
        raise RegimeViolationError(f"refined W_1 bound needs d >= 2, got {d}")
    if not 0.0 <= disc <= 1.0:
        raise DomainError(f"discrepancy must lie in [0,1], got {disc}")
    c = diameter(norm, d) * (kappa(d) if star else kappa(d) / 2.0)
    value = 0.0 if disc == 0.0 else c * disc ** (1.0 / d)
    return BoundResult(value, Regime.REFINED, c, 1.0 / d,
                       inputs={"d": d, "disc": disc, "norm": norm.value, "star": star})


# ---------------------------------------------------------------------------
# The saturated level series and its closed-form case bounds
# ---------------------------------------------------------------------------

def saturated_level_sum(u: float, dinf: float, p: float, d: int) -> float:
    """sum over ell >= 0 of 2^(-p ell) * min(u, 2^(d ell) * dinf), exactly.

    Once 2^(d ell) * dinf >= u the terms are a plain geometric series in
    2^(-p), summed in closed form, so the result is exact up to float
    rounding for every argument.
    """
    if u <= 0 or p <= 0:
        raise DomainError(f"need u > 0 and p > 0, got u={u}, p={p}")
    if not 0.0 < dinf <= 1.0:
        raise DomainError(f"dinf must lie in (0,1], got {dinf}")
    if dinf >= u:
        sat = 0
    else:
        sat = math.ceil(math.log2(u / dinf) / d)
        while 2.0 ** (d * sat) * dinf < u:
            sat += 1
        while sat > 0 and 2.0 ** (d * (sat - 1)) * dinf >= u:
            sat -= 1
    head = sum(2.0 ** (-p * ell) * 2.0 ** (d * ell) * dinf for ell in range(sat))
    tail = u * 2.0 ** (-p * sat) / (1.0 - 2.0 ** (-p))
    return head + tail


def saturated_level_sum_bound(u: float, dinf: float, p: float, d: int) -> float:
    """Closed-form majorant of the saturated level series, split by regime.

    p > d: min(u/(1-2^-p), dinf/(1-2^-(p-d))).
    p = d: u/(1-2^-p) when u < 2^-d dinf, else
           (1 + 1/(1-2^-p) + log(u/dinf)/(d log 2)) * dinf.
    p < d: u/(1-2^-p) in the same small-u regime, else
           (1/(1-2^-(d-p)) + 1/(2^p-1)) * dinf^(p/d) * u^(1-p/d).
    """
    if u <= 0 or p <= 0:
        raise DomainError(f"need u > 0 and p > 0, got u={u}, p={p}")
    if not 0.0 < dinf <= 1.0:
        raise DomainError(f"dinf must lie in (0,1], got {dinf}")
    geo = 1.0 / (1.0 - 2.0 ** (-p))
    if p > d:
        return min(u * geo, dinf / (1.0 - 2.0 ** (-(p - d))))
    if u < 2.0 ** (-d) * dinf:
        return u * geo
    if p == d:
        return (1.0 + geo + math.log(u / dinf) / (d * math.log(2.0))) * dinf
    return (1.0 / (1.0 - 2.0 ** (-(d - p))) + 1.0 / (2.0 ** p - 1.0)) * dinf ** (p / d) * u ** (
        1.0 - p / d
    )


# ---------------------------------------------------------------------------
# Whole-space and one-dimensional bounds
# ---------------------------------------------------------------------------

def bound_real_space(
    p: float, q: float, d: int, dinf: float, mq: float, scale: float = 1.0
) -> BoundResult:
    """Shape of the R^d bound: scale * max(Mq, 1) * dinf^e with
    e = p/d below the moment crossover p = dq/(q+d), else e = 1 - p/q.

    The true multiplicative constant is not explicit; ``scale`` stands in
    for it, so the output is a shape value.  p = d and the crossover
    itself are excluded.
    """
    if not q > p >= 1:
        raise DomainError(f"need q > p >= 1, got p={p}, q={q}")
    if not 0.0 <= dinf <= 1.0:
        raise DomainError(f"dinf must lie in [0,1], got {dinf}")
    if mq < 0 or scale <= 0:
        raise DomainError("need mq >= 0 and scale > 0")
    crossover = d * q / (q + d)
    if p == d or p == crossover:
        raise RegimeViolationError(f"p={p} is excluded (p=d or p=dq/(q+d))")
    e = p / d if p < crossover else 1.0 - p / q
    c = scale * max(mq, 1.0)
    value = 0.0 if dinf == 0.0 else c * dinf ** e
    return BoundResult(value, Regime.RD_SHAPE, c, e,
                       inputs={"p": p, "q": q, "d": d, "disc": dinf, "mq": mq, "scale": scale})


def bound_w1_moment_1d(q: float, mq: float, dstar: float) -> float:
    """Real-line W_1 bound from a finite q-th moment: 2 * Mq * dstar^(1-1/q)."""
    if q <= 1:
        raise DomainError(f"q must be > 1, got {q}")
    if mq < 0 or dstar < 0:
        raise DomainError("moments and discrepancies are nonnegative")
    if dstar == 0.0:
        return 0.0
    return 2.0 * mq * dstar ** (1.0 - 1.0 / q)


def bound_w1_exponential_1d(lam: float, eexp: float, dstar: float, dinf: float) -> float:
    """Real-line W_1 bound from an exponential moment.

    (1/lam) * (eexp * dstar + 2 * dstar * log(1/dinf)), where eexp is the
    integral of e^(lam |x|) against mu + nu.  The formula mixes the star
    and uniform discrepancies exactly as derived.
    """
    if lam <= 0:
        raise DomainError(f"lam must be > 0, got {lam}")
    if eexp < 2.0:
        raise DomainError("eexp integrates e^(lam|x|) against two probability measures, so >= 2")
    if dstar < 0:
        raise DomainError("discrepancies are nonnegative")
    if dstar == 0.0:
        return 0.0
    if not 0.0 < dinf <= 1.0:
        raise DomainError(f"dinf must lie in (0,1], got {dinf}")
    return (eexp * dstar + 2.0 * dstar * math.log(1.0 / dinf)) / lam


def reverse_constant(r: float, d: int) -> float:
    """C_{r,d} of the star-discrepancy-by-W_1 bound (Gamma-extended binomial)."""
    if r < 1 or d < 1:
        raise DomainError(f"need r >= 1 and d >= 1, got r={r}, d={d}")
    log_binom = gammaln(r + d + 1.0) - gammaln(r + 1.0) - gammaln(d + 1.0)
    return math.exp(-log_binom / (r + d)) * (
        (d / r) ** (r / (r + d)) + (r / d) ** (d / (r + d))
    )


def reverse_bound(r: float, d: int, w1: float, g_norm: float) -> BoundResult:
    """Star discrepancy bound: C_{r,d} * w1^(d/(r+d)) * g_norm^(r/(r+d)).

    ``w1`` is the sup-norm W_1 distance and ``g_norm`` the density norm
    in the dual exponent space (sup-norm of the density when r = 1).
    """
    if w1 < 0:
        raise DomainError("w1 must be nonnegative")
    if g_norm <= 0:
        raise DomainError("g_norm must be positive")
    c = reverse_constant(r, d) * g_norm ** (r / (r + d))
    e = d / (r + d)
    value = 0.0 if w1 == 0.0 else c * w1 ** e
    return BoundResult(value, Regime.REVERSE, c, e,
                       inputs={"r": r, "d": d, "disc": w1, "g_norm": g_norm})
