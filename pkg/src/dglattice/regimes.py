"""Closed-form constants, radii, roots, entry times, and regime classification.

Everything here is a pure function of the model coefficients, the forcing
norm and (optionally) initial-data radii.  The scalar comparison machinery
is built around the quadratic A x - B x^2 - C with

    A = delta - 1,   B = 2 sqrt(1 + beta^2),   C = ||g||^2 / (delta - 1),

defined in the dissipative regime delta > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisError
from .lattice import ModelParams

__all__ = [
    "SUBCRITICAL_FORCING",
    "SUPERCRITICAL_ANNULUS",
    "CRITICAL",
    "RiccatiConstants",
    "RegimeReport",
    "ClosenessConstants",
    "riccati_constants",
    "riccati_roots",
    "classify_regime",
    "closeness_constants",
    "ldgl_gronwall_bound",
    "nldgl_restricted_bound",
    "bernoulli_envelope",
]

SUBCRITICAL_FORCING = "SubcriticalForcing"
SUPERCRITICAL_ANNULUS = "SupercriticalAnnulus"
CRITICAL = "Critical"


@dataclass(frozen=True)
class RiccatiConstants:
    """Constants of the comparison quadratic; d = a^2 - 4 b c, k = sqrt(d) if d > 0."""

    a: float
    b: float
    c: float
    d: float
    k: float | None


@dataclass(frozen=True)
class RegimeReport:
    """All derived radii/roots/times for one parameter point.

    ``r1``/``r2`` (annulus bounds) are present exactly in the
    supercritical-annulus case.  ``delta0`` and ``rho_sq_nldgl`` require
    initial data strictly inside the restricted ball.  The two non-escaping
    radii are the printed variant (which multiplies by the forcing norm a
    quantity already containing it) and the dimensionally consistent one;
    both are reported so the sup-norm experiments can arbitrate.
    """

    constants: RiccatiConstants
    case_label: str
    r1: float | None
    r2: float | None
    restricted_radius_sq: float
    delta0: float | None
    rho_sq_ldgl: float
    rho_sq_nldgl: float | None
    nonescape_rho1: float | None
    nonescape_r0_sq_printed: float | None
    nonescape_r0_sq_alt: float | None
    entry_time: float | None


@dataclass(frozen=True)
class ClosenessConstants:
    """Constants of the trajectory-closeness estimates.

    ``c_uniform`` and ``c_limsup`` apply for delta > 1 (uniform-in-time and
    asymptotic estimates); ``c_finite_horizon`` applies for delta <= 1 on
    [0, t_final].  ``c_limsup`` multiplies eps^3 once; the cubic factor is
    not baked into the constant.
    """

    c_uniform: float | None
    c_limsup: float | None
    c_finite_horizon: float | None


def riccati_constants(params: ModelParams, g_norm2: float) -> RiccatiConstants:
    """Comparison-quadratic constants (A, B, C, D, K) for delta > 1."""
    if params.delta <= 1.0:
        raise HypothesisError("comparison constants are defined only for delta > 1")
    if g_norm2 < 0:
        raise ValueError("g_norm2 must be non-negative")
    a = params.delta - 1.0
    b = 2.0 * math.sqrt(1.0 + params.beta * params.beta)
    c = g_norm2 / a
    d = a * a - 4.0 * b * c
    return RiccatiConstants(a, b, c, d, math.sqrt(d) if d > 0 else None)


def riccati_roots(constants: RiccatiConstants) -> tuple[float, float] | None:
    """Roots (r1, r2), r2 <= r1, of A x - B x^2 - C when the discriminant is positive."""
    if constants.d <= 0:
        return None
    k = math.sqrt(constants.d)
    return (constants.a + k) / (2.0 * constants.b), (constants.a - k) / (2.0 * constants.b)


def classify_regime(
    params: ModelParams,
    g_norm2: float,
    v0_norm2: float | None = None,
    capture_radius: float | None = None,
    absorb_margin: float = 1.1,
) -> RegimeReport:
    """Classify a parameter point and evaluate every derived constant.

    The case label follows the sign of (delta-1)^3 - 8 sqrt(1+beta^2)||g||^2
    (equivalently the sign of the discriminant): strictly below threshold is
    the subcritical-forcing case, strictly above the supercritical-annulus
    case, equality is labelled critical.

    ``capture_radius`` is the radius R (not squared) of the ball enclosing
    the initial data; supplying it enables the non-escaping radii and the
    absorbing-ball entry time.  The entry time uses rate delta-1 for the
    local preset and the restricted-data rate delta0 for the non-local one;
    a ball already inside the absorbing ball gets entry time 0.
    """
    rc = riccati_constants(params, g_norm2)
    if absorb_margin <= 1.0:
        raise HypothesisError("absorb_margin must exceed 1")

    lhs = (params.delta - 1.0) ** 3
    rhs = 8.0 * math.sqrt(1.0 + params.beta * params.beta) * g_norm2
    if lhs < rhs:
        label = SUBCRITICAL_FORCING
    elif lhs > rhs:
        label = SUPERCRITICAL_ANNULUS
    else:
        label = CRITICAL

    r1 = r2 = None
    if label == SUPERCRITICAL_ANNULUS:
        k = math.sqrt(rc.d) if rc.d > 0 else 0.0
        r1 = (rc.a + k) / (2.0 * rc.b)
        r2 = (rc.a - k) / (2.0 * rc.b)

    restricted_radius_sq = rc.a / rc.b

    delta0 = rho_sq_nldgl = None
    if v0_norm2 is not None and v0_norm2 < restricted_radius_sq:
        delta0 = rc.a - rc.b * v0_norm2
        rho_sq_nldgl = g_norm2 / (delta0 * rc.a)

    rho_sq_ldgl = g_norm2 / (rc.a * rc.a)

    rho1 = r0_printed = r0_alt = entry_time = None
    if capture_radius is not None:
        if capture_radius < 0:
            raise ValueError("capture_radius must be non-negative")
        radius4 = capture_radius**4
        rho1 = rc.b * radius4 + g_norm2 / rc.a
        r0_printed = rho1 * g_norm2 / rc.a
        r0_alt = rho1 / rc.a
        if params.is_local:
            rate, rho_sq = rc.a, rho_sq_ldgl
        elif params.is_nonlocal:
            rate, rho_sq = delta0, rho_sq_nldgl
        else:
            rate = rho_sq = None
        if rate is not None and rho_sq is not None and rho_sq > 0:
            r_sq = capture_radius * capture_radius
            rho_t2 = absorb_margin * rho_sq
            if r_sq > rho_t2:
                entry_time = math.log((r_sq - rho_sq) / (rho_t2 - rho_sq)) / rate
            else:
                entry_time = 0.0

    return RegimeReport(
        constants=rc,
        case_label=label,
        r1=r1,
        r2=r2,
        restricted_radius_sq=restricted_radius_sq,
        delta0=delta0,
        rho_sq_ldgl=rho_sq_ldgl,
        rho_sq_nldgl=rho_sq_nldgl,
        nonescape_rho1=rho1,
        nonescape_r0_sq_printed=r0_printed,
        nonescape_r0_sq_alt=r0_alt,
        entry_time=entry_time,
    )


def closeness_constants(
    params: ModelParams,
    c0: float,
    cu0: float,
    cv0: float,
    t_final: float | None = None,
) -> ClosenessConstants:
    """Constants bounding the distance of the two semiflows by const * eps^3.

    For delta > 1 the uniform constant is c0 + (1+beta)(cu0^3+cv0^3)/(delta-1)
    and the asymptotic one drops the c0 term.  For delta = 1 the growth is at
    most linear on [0, t_final]; for delta < 1 at most exponential.
    """
    if min(c0, cu0, cv0) < 0:
        raise ValueError("closeness prefactors must be non-negative")
    beta, delta = params.beta, params.delta
    cubes = cu0**3 + cv0**3
    if delta > 1.0:
        drive = (1.0 + beta) * cubes / (delta - 1.0)
        return ClosenessConstants(c0 + drive, drive, None)
    if t_final is None:
        raise HypothesisError("t_final is required for delta <= 1")
    if delta == 1.0:
        return ClosenessConstants(None, None, c0 + 2.0 * (1.0 + beta) * cubes * t_final)
    growth = math.exp(2.0 * (1.0 - delta) * t_final)
    c2 = c0 * growth + (1.0 + beta) / (1.0 - delta) * cubes * (growth - 1.0)
    return ClosenessConstants(None, None, c2)


def ldgl_gronwall_bound(chi0: float, delta: float, g_norm2: float, t):
    """Local-model norm bound chi0 e^{-(delta-1)t} + rho^2 (1 - e^{-(delta-1)t})."""
    if delta <= 1.0:
        raise HypothesisError("bound requires delta > 1")
    rate = delta - 1.0
    decay = np.exp(-rate * np.asarray(t, dtype=float))
    return chi0 * decay + g_norm2 / (rate * rate) * (1.0 - decay)


def nldgl_restricted_bound(chi0: float, params: ModelParams, g_norm2: float, t):
    """Restricted-data norm bound with rate delta0 = (delta-1) - 2 sqrt(1+beta^2) chi0."""
    rc = riccati_constants(params, g_norm2)
    delta0 = rc.a - rc.b * chi0
    if delta0 <= 0:
        raise HypothesisError("initial data must lie strictly inside the restricted ball")
    decay = np.exp(-delta0 * np.asarray(t, dtype=float))
    return chi0 * decay + g_norm2 / (delta0 * rc.a) * (1.0 - decay)


def bernoulli_envelope(chi0: float, constants: RiccatiConstants, t):
    """Two-root-regime envelope r2 + [(psi0 - B/K) e^{Kt} + B/K]^{-1}.

    Valid for r2 < chi0 <= r1 with psi0 = 1/(chi0 - r2); the reciprocal decays
    to 0, so the envelope decays to r2.
    """
    roots = riccati_roots(constants)
    if roots is None:
        raise HypothesisError("envelope requires a positive discriminant")
    r1, r2 = roots
    if not r2 < chi0 <= r1:
        raise HypothesisError("envelope requires r2 < chi0 <= r1")
    k = math.sqrt(constants.d)
    psi0 = 1.0 / (chi0 - r2)
    bk = constants.b / k
    with np.errstate(over="ignore"):
        grow = np.exp(k * np.asarray(t, dtype=float))
        denom = (psi0 - bk) * grow + bk
        return r2 + np.where(np.isinf(denom), 0.0, 1.0 / denom)
