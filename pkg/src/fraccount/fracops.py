"""Fractional operators.

Caputo time derivatives (exact termwise on power series, quadrature on
callables), the discrete fractional difference on pmf tables, and the
logarithmic-kernel operator family that the heavy-tailed count pgfs are
eigenfunctions of.

Both quadrature operators share one core: after normalizing the integration
variable to y in (0,1), each is (|L|^(1-a)/Gamma(1-a)) * integral of
(1-y)^(-a) g'(yL) dy for the right g and L. The core uses a double-exponential
node map, so the (1-y)^(-a) endpoint weight and an integrable singularity of
g' at 0 are both absorbed by the transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, QuadratureFailure
from .pmftable import PmfTable
from .specfun import gamma_ratio_signed, gen_binom

_NOMINAL_STEP_REL = 1e-5  # finite-difference step relative to the interval


@dataclass(frozen=True)
class PowerSeriesInT:
    """Finite power series sum_i coeff_i * t^(exponent_i), exponents >= 0 and
    strictly increasing."""

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "terms", tuple((float(c), float(e)) for c, e in self.terms)
        )
        prev = -1.0
        for c, e in self.terms:
            if e < 0.0:
                raise DomainError(f"exponent {e} is negative")
            if e <= prev:
                raise DomainError(f"exponents must be strictly increasing, got {e} after {prev}")
            prev = e

    @classmethod
    def build(cls, pairs, merge_tol: float = 1e-12) -> "PowerSeriesInT":
        """Sort by exponent and merge coefficients of exponents that coincide
        within merge_tol (they arise when two analytic pieces share a power)."""
        items = sorted(((float(e), float(c)) for c, e in pairs))
        merged: list[tuple[float, float]] = []
        for e, c in items:
            if merged and abs(e - merged[-1][1]) <= merge_tol:
                merged[-1] = (merged[-1][0] + c, merged[-1][1])
            else:
                merged.append((c, e))
        return cls(terms=tuple(merged))

    def __call__(self, t: float) -> float:
        return math.fsum(c * t ** e for c, e in self.terms)


def caputo_derivative_series(f: PowerSeriesInT, nu: float, t: float) -> float:
    """Caputo derivative of order nu of a power series, exact termwise.

    Power rule: t^mu maps to Gamma(mu+1)/Gamma(mu-nu+1) * t^(mu-nu); a
    constant term contributes nothing (the derivative is taken first).
    """
    if not (0.0 < nu <= 1.0):
        raise DomainError(f"nu must be in (0,1], got {nu}")
    if t <= 0.0:
        raise DomainError(f"t must be positive, got {t}")
    out = []
    for c, mu in f.terms:
        if mu == 0.0:
            continue
        out.append(c * gamma_ratio_signed(mu + 1.0, mu - nu + 1.0) * t ** (mu - nu))
    return math.fsum(out)


# ---- quadrature core ----

def _fd_derivative(g: Callable[[float], float], w: float, span: float, h_nom: float) -> float:
    """d/dw g at w inside the oriented interval from 0 to span (span may be
    negative). Central differences with a step that shrinks near 0 so an
    integrable singularity of g' there is resolved; near the far end the
    stencil turns one-sided (pointing back inside) at full step, because g is
    smooth there and a shrinking step would only amplify roundoff."""
    sgn = 1.0 if span >= 0.0 else -1.0
    pos = w * sgn          # distance from 0 along the interval
    rem = abs(span) - pos  # distance to the far end
    if rem >= 2.0 * h_nom:
        # pos/64 resolves an s^(mu-1) singularity with ~(1/64)^2/3 relative
        # truncation error while the shrinking step keeps the stencil inside
        h = min(h_nom, pos / 64.0)
        if h <= 0.0:
            h = h_nom  # w == 0 endpoint: fall back, caller weights this out
        hw = h * sgn
        return (g(w + hw) - g(w - hw)) / (2.0 * hw)
    # one-sided second-order stencil into the interval
    hw = h_nom * sgn
    return (3.0 * g(w) - 4.0 * g(w - hw) + g(w - 2.0 * hw)) / (2.0 * hw)


def _weighted_deriv_integral(
    g: Callable[[float], float], alpha: float, span: float, n_nodes: int
) -> float:
    """(|span|^(1-alpha) / Gamma(1-alpha)) * integral_0^1 (1-y)^(-alpha) g'(y*span) dy
    via a double-exponential (tanh-sinh) map of y in (0,1)."""
    half = n_nodes // 2
    if half < 4:
        raise DomainError(f"n_nodes too small: {n_nodes}")
    # the deepest node sits at y ~ exp(-2*(pi/2)*sinh(wmax)); power-law mass
    # y^mu below it is lost, so exponents mu <~ 0.15 are outside the reliable
    # range of this rule (the node-doubling check usually flags them)
    wmax = 4.3
    step = wmax / half
    h_nom = abs(span) * _NOMINAL_STEP_REL
    acc = []
    for i in range(-half, half + 1):
        u = i * step
        x = (math.pi / 2.0) * math.sinh(u)
        # y = 1/(1+e^(-2x)), 1-y = 1/(1+e^(2x)); both formed without cancellation
        log1my = -_softplus(2.0 * x)
        y = 1.0 / (1.0 + math.exp(-2.0 * x))
        dyd = (math.pi / 2.0) * math.cosh(u) / (2.0 * math.cosh(x) ** 2)
        gp = _fd_derivative(g, y * span, span, h_nom)
        acc.append(math.exp(-alpha * log1my) * gp * dyd * step)
    integral = math.fsum(acc)
    return abs(span) ** (1.0 - alpha) / math.gamma(1.0 - alpha) * integral


def _softplus(x: float) -> float:
    # log(1 + e^x) without overflow
    if x > 36.0:
        return x
    return math.log1p(math.exp(x))


def _stable_quadrature(
    g: Callable[[float], float], alpha: float, span: float, n_nodes: int, what: str
) -> float:
    coarse = _weighted_deriv_integral(g, alpha, span, n_nodes)
    fine = _weighted_deriv_integral(g, alpha, span, 2 * n_nodes)
    # the 1e-8 floor keeps finite-difference noise (~1e-13 at desk scale) from
    # tripping the relative test when the true value is 0
    if abs(fine - coarse) > 1e-4 * max(abs(fine), 1e-8):
        raise QuadratureFailure(
            f"{what}: node doubling moved the value from {coarse:.10g} to {fine:.10g}"
        )
    return fine


def caputo_derivative_quadrature(
    f: Callable[[float], float], nu: float, t: float, n_nodes: int = 129
) -> float:
    """Caputo derivative of order nu in (0,1) of a callable, by quadrature:
    (1/Gamma(1-nu)) * integral_0^t (t-s)^(-nu) f'(s) ds.

    f' is taken by finite differences with nominal relative step 1e-5.
    Independent cross-check of caputo_derivative_series; the node-doubled
    result is returned and a shift beyond 1e-4 relative raises
    QuadratureFailure.
    """
    if not (0.0 < nu < 1.0):
        raise DomainError(f"nu must be strictly inside (0,1), got {nu}")
    if t <= 0.0:
        raise DomainError(f"t must be positive, got {t}")
    return _stable_quadrature(f, nu, t, n_nodes, "caputo_derivative_quadrature")


def frac_difference(pmf: PmfTable, alpha: float, k: int) -> float:
    """Fractional backward difference of order alpha of a pmf sequence at k:
    sum_j (-1)^j C(alpha, j) pmf[k-j], j = 0..k."""
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must be in (0,1], got {alpha}")
    if not (0 <= k <= pmf.K):
        raise DomainError(f"k={k} outside table support 0..{pmf.K}")
    return math.fsum(
        (-1.0) ** j * gen_binom(alpha, j) * pmf[k - j] for j in range(k + 1)
    )


@dataclass(frozen=True)
class OperatorOAlphaSpec:
    """Parameter block of the logarithmic-kernel operator: order alpha and the
    affine argument map a + b*z. All evaluations require z > (1-a)/b."""

    alpha: float
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must be in (0,1], got {self.alpha}")
        if self.b == 0.0:
            raise DomainError("b must be nonzero")

    @property
    def lower_limit(self) -> float:
        return (1.0 - self.a) / self.b


def operator_O_alpha_quadrature(
    spec: OperatorOAlphaSpec,
    f: Callable[[float], float],
    z: float,
    n_nodes: int = 129,
) -> float:
    """The order-alpha logarithmic-kernel operator applied to f at z.

    After substituting w = log(a + b*tau) the operator is a Caputo derivative
    in w from 0 to W = log(a + b*z); normalizing by y = w/W gives the
    (1-y)^(-alpha) weighted form evaluated here. The formula is even in the
    sign of W, so arguments with a + b*z < 1 (shrinking maps, b < 0) are
    handled by the same expression. At alpha = 1 the operator collapses to
    (a/b + z) f'(z).
    """
    lo = spec.lower_limit
    if (spec.b > 0 and z <= lo) or (spec.b < 0 and z <= lo):
        raise DomainError(f"z={z} is not above the lower limit {lo}")
    x = spec.a + spec.b * z
    if x <= 0.0:
        raise DomainError(f"a + b*z = {x} must be positive")
    W = math.log(x)
    if W == 0.0:
        raise DomainError("z equals the lower limit; operator undefined there")

    if spec.alpha == 1.0:
        # backward stencil keeps every evaluation inside the domain (lo, z]
        h = abs(z - lo) * _NOMINAL_STEP_REL
        fp = (3.0 * f(z) - 4.0 * f(z - h) + f(z - 2.0 * h)) / (2.0 * h)
        return (spec.a / spec.b + z) * fp

    def g(w: float) -> float:
        return f((math.exp(w) - spec.a) / spec.b)

    return _stable_quadrature(g, spec.alpha, W, n_nodes, "operator_O_alpha_quadrature")


def operator_O_alpha_on_log_powers(
    spec: OperatorOAlphaSpec, beta: float, z: float
) -> float:
    """Closed form of the operator on f(tau) = log^beta(a + b*tau):
    Gamma(beta+1)/Gamma(beta+1-alpha) * log^(beta-alpha)(a+b*z).

    beta = 0 is the constant function and maps to 0 (the operator is
    regularized); requires a + b*z > 1 so the log power is real and positive.
    """
    if beta <= -1.0:
        raise DomainError(f"beta must exceed -1, got {beta}")
    lo = spec.lower_limit
    if z <= lo:
        raise DomainError(f"z={z} is not above the lower limit {lo}")
    x = spec.a + spec.b * z
    if x <= 1.0:
        raise DomainError(f"a + b*z = {x} must exceed 1 for a real log power")
    if beta == 0.0:
        return 0.0
    L = math.log(x)
    return gamma_ratio_signed(beta + 1.0, beta + 1.0 - spec.alpha) * L ** (beta - spec.alpha)
