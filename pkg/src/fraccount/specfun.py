"""Special-function engine.

Provides the series primitives the process modules are built on: the two- and
three-parameter Mittag-Leffler functions, Fox-Wright sums, generalized binomial
coefficients, a signed reciprocal gamma, and exact signed Stirling numbers of
the first kind.

Every infinite series here is summed the same way: each term is formed in log
space with an explicit sign, so terms never overflow before the sum settles,
and the result is returned together with its convergence diagnostics rather
than as a bare float.
"""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass

from .errors import (
    CancellationLoss,
    DomainError,
    InvalidSpec,
    NonConvergent,
    OutOfRange,
)

_TINY = 1e-300
_EPS = 2.220446049250313e-16
_EXP_MAX = 709.0  # log of the largest finite double, rounded down


@dataclass(frozen=True)
class SpecfunConfig:
    """Knobs shared by every series evaluator.

    rel_tol: relative tail bound that ends summation.
    max_terms: hard budget before giving up.
    cancellation_limit: largest tolerated ratio max|term| / |sum|.
    """

    rel_tol: float = 1e-12
    max_terms: int = 10000
    cancellation_limit: float = 1e8

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol < 1.0):
            raise InvalidSpec(f"rel_tol must be in (0,1), got {self.rel_tol}")
        if self.max_terms < 1:
            raise InvalidSpec(f"max_terms must be >= 1, got {self.max_terms}")
        if self.cancellation_limit <= 1.0:
            raise InvalidSpec(
                f"cancellation_limit must exceed 1, got {self.cancellation_limit}"
            )


DEFAULT_CONFIG = SpecfunConfig()


@dataclass(frozen=True)
class SeriesValue:
    """A converged series sum plus the diagnostics needed to trust it."""

    value: float
    abs_error_estimate: float
    terms_used: int
    max_term_magnitude: float


def _sum_series(terms, cfg: SpecfunConfig, what: str) -> SeriesValue:
    """Adaptive summation shared by all series.

    Stops after three consecutive terms that are strictly below
    rel_tol * |partial sum|; the strict inequality means an all-zero prefix
    (annihilated leading terms) never triggers a premature stop.
    """
    total = 0.0
    max_mag = 0.0
    last_mag = 0.0
    small_run = 0
    used = 0
    for term in terms:
        used += 1
        if used > cfg.max_terms:
            raise NonConvergent(
                f"{what}: no convergence within {cfg.max_terms} terms "
                f"(partial sum {total:.6g})"
            )
        if math.isnan(term) or math.isinf(term):
            raise NonConvergent(f"{what}: term {used} is not finite")
        total += term
        mag = abs(term)
        if mag > max_mag:
            max_mag = mag
        if mag < cfg.rel_tol * abs(total):
            small_run += 1
            last_mag = mag
            if small_run >= 3:
                break
        else:
            small_run = 0
    if max_mag / max(abs(total), _TINY) > cfg.cancellation_limit:
        raise CancellationLoss(
            f"{what}: max term {max_mag:.3g} dwarfs sum {total:.3g}; "
            "result has no trustworthy digits"
        )
    err = 2.0 * last_mag + _EPS * max_mag * used
    return SeriesValue(total, err, used, max_mag)


def _gamma_sign(w: float) -> float:
    # sign of Gamma(w) for w not a pole; positive reals are +1, and on
    # (-n-1, -n) the sign alternates starting with negative on (-1, 0)
    if w > 0.0:
        return 1.0
    n = math.floor(-w)
    return -1.0 if n % 2 == 0 else 1.0


def recip_gamma_signed(w: float) -> float:
    """1/Gamma(w) with the correct sign, exactly 0.0 at the poles.

    Total on the real line: non-positive integers map to 0, everything else
    to a finite signed value (overflowing to signed inf only for w far below
    anything the process modules produce).
    """
    if w > 0.0:
        lg = math.lgamma(w)
        return math.exp(-lg) if -lg <= _EXP_MAX else math.inf
    if w == math.floor(w):
        return 0.0
    lg = math.lgamma(w)  # log|Gamma(w)|
    sign = _gamma_sign(w)
    if -lg > _EXP_MAX:
        return math.copysign(math.inf, sign)
    return sign * math.exp(-lg)


def gamma_ratio_signed(a: float, b: float) -> float:
    """Gamma(a)/Gamma(b) for a > 0 and any real b, via log space.

    Returns exactly 0.0 when b is a non-positive integer (the pole of the
    denominator kills the ratio). Used for falling-factorial style ratios
    where forming either gamma alone would overflow.
    """
    if a <= 0.0:
        raise DomainError(f"numerator argument must be positive, got {a}")
    if b <= 0.0 and b == math.floor(b):
        return 0.0
    arg = math.lgamma(a) - math.lgamma(b)
    sign = _gamma_sign(b)  # 1/Gamma(b) carries the sign of Gamma(b)
    if arg > _EXP_MAX:
        return math.copysign(math.inf, sign)
    return sign * math.exp(arg)


def mittag_leffler(
    alpha: float, beta: float, x: float, cfg: SpecfunConfig | None = None
) -> SeriesValue:
    """Two-parameter Mittag-Leffler sum_r x^r / Gamma(alpha r + beta).

    alpha in (0, 1], beta > 0. Reduces to exp(x) at alpha = beta = 1.
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must be in (0,1], got {alpha}")
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta}")
    cfg = cfg or DEFAULT_CONFIG

    if x == 0.0:
        return SeriesValue(recip_gamma_signed(beta), 0.0, 1, abs(recip_gamma_signed(beta)))

    log_ax = math.log(abs(x))
    sign_x = 1.0 if x > 0.0 else -1.0

    def terms():
        for r in itertools.count():
            lg = r * log_ax - math.lgamma(alpha * r + beta)
            if lg > _EXP_MAX:
                yield math.inf
                return
            yield (sign_x ** r) * math.exp(lg)

    return _sum_series(terms(), cfg, f"mittag_leffler({alpha},{beta},{x})")


def gen_mittag_leffler(
    alpha: float, beta: float, gamma: float, x: float, cfg: SpecfunConfig | None = None
) -> SeriesValue:
    """Three-parameter Mittag-Leffler sum with rising-factorial weights:
    sum_r (gamma)^(r) x^r / (r! Gamma(alpha r + beta)).

    Reduces to mittag_leffler when gamma = 1; a non-positive integer gamma
    truncates the rising factorial and the series becomes a polynomial.
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must be in (0,1], got {alpha}")
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta}")
    cfg = cfg or DEFAULT_CONFIG

    log_ax = math.log(abs(x)) if x != 0.0 else 0.0
    sign_x = 1.0 if x >= 0.0 else -1.0

    def terms():
        log_poch = 0.0  # log |(gamma)^(r)|
        sign_poch = 1.0
        for r in itertools.count():
            if r > 0:
                f = gamma + r - 1
                if f == 0.0:
                    # rising factorial vanished: every later term is zero
                    while True:
                        yield 0.0
                log_poch += math.log(abs(f))
                if f < 0.0:
                    sign_poch = -sign_poch
            if x == 0.0 and r > 0:
                yield 0.0
                continue
            lg = log_poch + r * log_ax - math.lgamma(r + 1) - math.lgamma(alpha * r + beta)
            if lg > _EXP_MAX:
                yield math.inf
                return
            yield sign_poch * (sign_x ** r) * math.exp(lg)

    return _sum_series(terms(), cfg, f"gen_mittag_leffler({alpha},{beta},{gamma},{x})")


@dataclass(frozen=True)
class FoxWrightSpec:
    """Parameter block of a Fox-Wright sum: upper (a_h, alpha_h) pairs over
    lower (b_k, beta_k) pairs. Construction rejects specs whose convergence
    margin sum(beta_k) - sum(alpha_h) is not above -1."""

    upper: tuple[tuple[float, float], ...]
    lower: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "upper", tuple((float(a), float(al)) for a, al in self.upper))
        object.__setattr__(self, "lower", tuple((float(b), float(be)) for b, be in self.lower))
        for _, al in self.upper:
            if al <= 0.0:
                raise InvalidSpec(f"upper gamma slopes must be positive, got {al}")
        for _, be in self.lower:
            if be <= 0.0:
                raise InvalidSpec(f"lower gamma slopes must be positive, got {be}")
        if self.margin <= -1.0:
            raise InvalidSpec(
                f"convergence margin {self.margin} is not above -1; series diverges"
            )

    @property
    def margin(self) -> float:
        return sum(be for _, be in self.lower) - sum(al for _, al in self.upper)


def fox_wright(spec: FoxWrightSpec, z: float, cfg: SpecfunConfig | None = None) -> SeriesValue:
    """Fox-Wright sum over j of prod Gamma(a_h + alpha_h j) / prod Gamma(b_k + beta_k j)
    * z^j / j!.

    A lower gamma hitting a pole zeroes that term (reciprocal gamma is entire);
    an upper gamma hitting a pole makes the sum undefined and raises InvalidSpec.
    """
    cfg = cfg or DEFAULT_CONFIG
    log_az = math.log(abs(z)) if z != 0.0 else 0.0
    sign_z = 1.0 if z >= 0.0 else -1.0

    def term_at(j: int) -> float:
        lg = j * log_az - math.lgamma(j + 1)
        sign = sign_z ** j
        for a, al in spec.upper:
            w = a + al * j
            if w <= 0.0 and w == math.floor(w):
                raise InvalidSpec(
                    f"upper gamma pole at term {j} (argument {w}); sum undefined"
                )
            lg += math.lgamma(w)
            sign *= _gamma_sign(w)
        for b, be in spec.lower:
            w = b + be * j
            if w <= 0.0 and w == math.floor(w):
                return 0.0
            lg -= math.lgamma(w)
            sign *= _gamma_sign(w)
        if lg > _EXP_MAX:
            return math.inf
        return sign * math.exp(lg)

    if z == 0.0:
        # only j = 0 contributes
        v = term_at(0)
        return SeriesValue(v, 0.0, 1, abs(v))

    def terms():
        for j in itertools.count():
            yield term_at(j)

    return _sum_series(terms(), cfg, f"fox_wright(margin={spec.margin},z={z})")


def gen_binom(alpha: float, j: int) -> float:
    """Generalized binomial coefficient alpha over j for real alpha, integer j >= 0."""
    if j < 0:
        raise DomainError(f"j must be a nonnegative integer, got {j}")
    out = 1.0
    for i in range(j):
        out *= (alpha - i) / (i + 1)
    return out


# ---- Stirling numbers of the first kind (signed, exact) ----

STIRLING_CAP = 64

_stirling_rows: list[list[int]] = [[1]]
_stirling_lock = threading.Lock()


def stirling_first(k: int, h: int, cap: int = STIRLING_CAP) -> int:
    """Signed Stirling number of the first kind s(k, h), exact integer.

    Row recurrence s(k+1, h) = s(k, h-1) - k * s(k, h). Rows are cached; the
    fill is guarded by a lock and idempotent, so concurrent first access is
    safe. The cap bounds k against runaway requests (rows grow factorially);
    callers that genuinely need deeper rows pass a larger cap explicitly.
    Indices outside 0 <= h <= k <= cap raise OutOfRange.
    """
    if not (0 <= k <= cap):
        raise OutOfRange(f"k must be in [0, {cap}], got {k}")
    if not (0 <= h <= k):
        raise OutOfRange(f"h must be in [0, {k}], got {h}")
    if k >= len(_stirling_rows):
        with _stirling_lock:
            while len(_stirling_rows) <= k:
                m = len(_stirling_rows) - 1  # extending row m to row m+1
                prev = _stirling_rows[-1]
                row = [0] * (m + 2)
                for j in range(m + 2):
                    above = prev[j] if j <= m else 0
                    left = prev[j - 1] if 1 <= j <= m + 1 else 0
                    row[j] = left - m * above
                _stirling_rows.append(row)
    return _stirling_rows[k][h]
