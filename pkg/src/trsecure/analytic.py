"""Closed-form SINR and secrecy-rate bounds and the optimal power split."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .model import SystemParams
from .special import const_a


class NonPositiveArgument(ArithmeticError):
    """Secrecy-rate log argument <= 0: the series constant is unusable here."""


@dataclass(frozen=True)
class BoundInputs:
    bor: int
    alpha: float
    sigma2_vb: float
    sigma2_ve: float
    sigma2_an: float
    bessel_terms: int = 20

    def __post_init__(self):
        if self.bor < 2:
            raise ValueError("bor must be >= 2")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha={self.alpha} outside [0, 1]")
        if min(self.sigma2_vb, self.sigma2_ve, self.sigma2_an) <= 0:
            raise ValueError("variances must be > 0")
        if self.bessel_terms < 1:
            raise ValueError("bessel_terms must be >= 1")

    @classmethod
    def from_params(cls, params: SystemParams) -> "BoundInputs":
        return cls(
            params.bor, params.alpha, params.sigma2_vb, params.sigma2_ve,
            params.sigma2_an, params.bessel_terms,
        )

    def at(self, alpha: float) -> "BoundInputs":
        return replace(self, alpha=alpha)


@dataclass(frozen=True)
class SrCurvePoint:
    alpha: float
    sr_bound: float
    sinr_bob_bound: float
    sinr_eve_bound: float


def sinr_bob_bound(b: BoundInputs) -> float:
    """alpha (U+1) / (U sigma2_vb): second moment of the focusing gain times alpha over the noise."""
    return b.alpha * (b.bor + 1) / (b.bor * b.sigma2_vb)


def sinr_eve_bound(b: BoundInputs) -> float:
    return 4.0 * b.alpha * const_a(b.bor, b.bessel_terms) / (b.sigma2_ve + (1.0 - b.alpha) * b.sigma2_an)


def t_terms(b: BoundInputs) -> tuple[float, float, float, float]:
    """(T1, T2, T3, T4) of the rational form of the secrecy-rate bound.

    SR = log2((-a^2 T1 + a T2 + T3) / (a T4 + T3)).  T4 is U*sv_b*(4A - s_an),
    which is what expanding the two-log form actually gives.
    """
    u, sb, se, san = b.bor, b.sigma2_vb, b.sigma2_ve, b.sigma2_an
    a = const_a(u, b.bessel_terms)
    t1 = san * (u + 1)
    t2 = se * (u + 1) - u * sb * san + san * (u + 1)
    t3 = u * sb * (se + san)
    t4 = u * sb * (4.0 * a - san)
    return t1, t2, t3, t4


def secrecy_rate_bound(b: BoundInputs) -> float:
    t1, t2, t3, t4 = t_terms(b)
    a = b.alpha
    num = -a * a * t1 + a * t2 + t3
    den = a * t4 + t3
    if num <= 0 or den <= 0:
        raise NonPositiveArgument(f"log argument {num}/{den} at alpha={a}")
    return math.log2(num / den)


def secrecy_rate_direct(b: BoundInputs) -> float:
    """Same bound written as the difference of the two log-rates."""
    ge = sinr_eve_bound(b)
    if 1.0 + ge <= 0:
        raise NonPositiveArgument(f"1 + eve bound = {1.0 + ge}")
    return math.log2(1.0 + sinr_bob_bound(b)) - math.log2(1.0 + ge)


def _golden_max(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - inv_phi * (hi - lo), lo + inv_phi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def _safe_sr(b: BoundInputs, alpha: float) -> float:
    try:
        return secrecy_rate_bound(b.at(alpha))
    except NonPositiveArgument:
        return -math.inf


def stationary_points(b: BoundInputs) -> list[float]:
    """Real roots of -a^2 T1 T4 - 2 a T1 T3 + T3 (T2 - T4) = 0."""
    t1, t2, t3, t4 = t_terms(b)
    qa, qb, qc = -t1 * t4, -2.0 * t1 * t3, t3 * (t2 - t4)
    # discriminant/4 of the quadratic above
    disc = t1 * t1 * t3 * t3 + t1 * t2 * t3 * t4 - t1 * t3 * t4 * t4
    if disc < 0:
        return []
    # T4 is close to zero whenever 4A ~ sigma2_an, so avoid the cancelling
    # form (sqrt(disc) - T1 T3) / (T1 T4)
    big = -(qb + math.copysign(2.0 * math.sqrt(disc), qb)) / 2.0
    roots = [qc / big]
    if qa != 0.0:
        roots.append(big / qa)
    return roots


def alpha_opt(b: BoundInputs) -> float:
    """Power split in [0, 1] maximizing the secrecy-rate bound.

    Candidates are the stationary points inside [0, 1] plus both endpoints;
    the one with the largest bound wins.  Without real stationary points a
    golden-section search over [0, 1] is used.
    """
    roots = stationary_points(b)
    if not roots:
        cand = [0.0, 1.0, _golden_max(lambda a: _safe_sr(b, a), 0.0, 1.0)]
    else:
        cand = [0.0, 1.0] + [r for r in roots if 0.0 <= r <= 1.0]
    return max(cand, key=lambda a: _safe_sr(b, a))


def sr_curve(b: BoundInputs, alphas) -> list[SrCurvePoint]:
    """Bound curve over alphas; nan where the log argument is not positive."""
    out = []
    for a in alphas:
        p = b.at(float(a))
        try:
            sr = secrecy_rate_bound(p)
        except NonPositiveArgument:
            sr = math.nan
        out.append(SrCurvePoint(float(a), sr, sinr_bob_bound(p), sinr_eve_bound(p)))
    return out
