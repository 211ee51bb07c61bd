"""Verification studies built on the lattice core and the integrator.

Each study integrates one or both models, compares the sampled quantities
against the applicable closed-form envelopes/constants, and returns plain
dataclass reports.  Claims the estimates only bound one-sidedly (monotone
norms in the subcritical case, convergence of chi to the lower annulus
root) are measured and reported, never asserted; the assertable envelope
and closeness inequalities carry explicit pass booleans.

Grid cells (epsilon values, chi(0) values, seeds) are pure and may run on a
thread pool; results are assembled in deterministic order so reports do not
depend on the thread count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisError, NumericalError
from .integrate import (
    BLOWUP_THRESHOLD,
    DEFAULT_TOLERANCES,
    ORACLE_TOLERANCES,
    Trajectory,
    integrate_adaptive,
    integrate_riccati,
)
from .lattice import (
    Forcing,
    LatticeState,
    ModelParams,
    balance_residual,
    discrete_laplacian,
    inner,
    l2_distance,
    lipschitz_bound,
    nonlinear_part,
    norms,
    random_state,
    unit_site,
)
from .regimes import (
    SUPERCRITICAL_ANNULUS,
    bernoulli_envelope,
    classify_regime,
    closeness_constants,
    riccati_constants,
)

__all__ = [
    "InitialFamily",
    "ClosenessReport",
    "AttractorSample",
    "TailReport",
    "CongruenceResult",
    "RegimePoint",
    "RegimeVerificationReport",
    "make_initial_family",
    "run_closeness",
    "tail_mass",
    "run_tail_study",
    "sample_attractor",
    "hausdorff_semidistance",
    "run_congruence",
    "run_regime_verification",
    "identity_check",
]

ENVELOPE_SLACK = 1.0 + 1e-6
TRAILING_FRACTION = 0.2


def _pmap(fn, items, threads):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _trailing_slice(n: int) -> slice:
    return slice(max(0, n - max(1, math.ceil(TRAILING_FRACTION * n))), n)


@dataclass(frozen=True)
class InitialFamily:
    """Seed-pair recipe: u0 = cu0*eps*phi and v0 = u0 + c0*eps^3*psi.

    The profiles phi and psi must be unit-norm (up to 1e-9, renormalised
    internally); cv0 caps the admissible norm of v0.
    """

    epsilon: float
    c0: float
    cu0: float
    cv0: float
    u_profile: LatticeState
    perturb_profile: LatticeState


def _unit_profile(profile: LatticeState, name: str) -> LatticeState:
    nrm = profile.norm()
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"{name} must have unit l2 norm (got {nrm!r})")
    return LatticeState(profile.offset, profile.values / nrm)


def make_initial_family(
    epsilon: float,
    c0: float,
    cu0: float,
    cv0: float,
    u_profile: LatticeState,
    perturb_profile: LatticeState,
) -> tuple[LatticeState, LatticeState]:
    """Build the seed pair (u0, v0) of the closeness hypotheses.

    Guarantees ||u0|| = cu0*eps and ||u0 - v0|| = c0*eps^3 by construction
    and verifies ||v0|| <= cv0*eps, raising ``HypothesisError`` when the
    chosen (c0, cv0, eps) combination violates it.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    phi = _unit_profile(u_profile, "u_profile")
    psi = _unit_profile(perturb_profile, "perturb_profile")
    u0 = (cu0 * epsilon) * phi
    v0 = u0 + (c0 * epsilon**3) * psi
    v_cap = cv0 * epsilon
    if v0.norm() > v_cap * (1.0 + 1e-12):
        raise HypothesisError(
            f"||v0|| = {v0.norm():.6g} exceeds cv0*eps = {v_cap:.6g}"
        )
    return u0, v0


@dataclass
class ClosenessReport:
    """Distance of the two semiflows against the applicable eps^3 bound.

    ``passed`` is serialized as ``pass`` in CLI reports (reserved word here).
    """

    sup_distance_l2: float
    sup_distance_linf: float
    tail_window_limsup: float
    bound_used: float
    passed: bool
    times: np.ndarray
    dist_l2: np.ndarray
    dist_linf: np.ndarray
    diagnostic: str | None = None


def run_closeness(
    family: InitialFamily,
    params: ModelParams,
    forcing: Forcing,
    horizon: float,
    tolerances: tuple[float, float] = DEFAULT_TOLERANCES,
    sample_stride: float = 0.25,
    threads: int = 1,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> ClosenessReport:
    """Integrate the local model from u0 and the non-local model from v0.

    Both runs share the forcing and the sample grid; the report carries the
    per-sample l2 and sup-norm distances, their suprema, the constant-times-
    eps^3 bound (uniform constant for delta > 1, finite-horizon constant
    with t_final = horizon otherwise) and the pass flag

        sup_t ||u(t) - v(t)||_l2 <= bound * (1 + 1e-3).

    Blow-up of either trajectory is reported as a failed run, not raised.
    """
    u0, v0 = make_initial_family(
        family.epsilon, family.c0, family.cu0, family.cv0, family.u_profile, family.perturb_profile
    )
    n_min = min(u0.n_min, v0.n_min, forcing.state.n_min)
    n_max = max(u0.n_max, v0.n_max, forcing.state.n_max)
    u0 = u0.embedded(n_min, n_max)
    v0 = v0.embedded(n_min, n_max)

    def _run(cell):
        initial, gamma, mu = cell
        return integrate_adaptive(
            initial,
            params.with_nonlinearity(gamma, mu),
            forcing,
            horizon,
            tolerances=tolerances,
            sample_stride=sample_stride,
            snapshot_every=1,
            blowup_threshold=blowup_threshold,
        )

    traj_u, traj_v = _pmap(_run, [(u0, 1.0, 0.0), (v0, 0.0, 1.0)], threads)

    n = min(len(traj_u.snapshots), len(traj_v.snapshots))
    times = traj_u.times[:n]
    dist_l2 = np.empty(n)
    dist_linf = np.empty(n)
    for i in range(n):
        d = traj_u.snapshots[i].values - traj_v.snapshots[i].values
        mag2 = d.real * d.real + d.imag * d.imag
        dist_l2[i] = math.sqrt(float(np.sum(mag2)))
        dist_linf[i] = math.sqrt(float(np.max(mag2)))

    cc = closeness_constants(
        params,
        family.c0,
        family.cu0,
        family.cv0,
        t_final=None if params.delta > 1.0 else horizon,
    )
    constant = cc.c_uniform if params.delta > 1.0 else cc.c_finite_horizon
    bound = constant * family.epsilon**3

    diagnostic = None
    for tag, traj in (("local", traj_u), ("non-local", traj_v)):
        if traj.blowup_time is not None:
            note = f"{tag} trajectory blew up at t={traj.blowup_time:.6g}"
            diagnostic = note if diagnostic is None else diagnostic + "; " + note

    sup_l2 = float(np.max(dist_l2)) if n else math.nan
    sup_linf = float(np.max(dist_linf)) if n else math.nan
    trailing = _trailing_slice(n)
    limsup = float(np.max(dist_l2[trailing])) if n else math.nan
    passed = diagnostic is None and n > 0 and sup_l2 <= bound * (1.0 + 1e-3)
    return ClosenessReport(sup_l2, sup_linf, limsup, bound, passed, times, dist_l2, dist_linf, diagnostic)


def tail_mass(state: LatticeState, k: int) -> float:
    """Mass sum_{|n| > 2k} |u_n|^2 over the stored window."""
    if k < 0:
        raise ValueError("k must be non-negative")
    sites = state.sites()
    outside = np.abs(sites) > 2 * k
    v = state.values[outside]
    return float(np.sum(v.real * v.real + v.imag * v.imag))


@dataclass
class TailReport:
    """Empirical stand-ins for the tail-decay thresholds M(xi), T(xi)."""

    xi: float
    k_values: list[int]
    tail_masses: np.ndarray
    trailing_times: np.ndarray
    min_k_passing: int | None
    time_of_entry: float | None
    hypothesis_ok: bool
    note: str | None = None


def run_tail_study(
    params: ModelParams,
    forcing: Forcing,
    initial: LatticeState,
    horizon: float,
    xi: float,
    k_grid: list[int],
    tolerances: tuple[float, float] = DEFAULT_TOLERANCES,
    sample_stride: float = 0.25,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> TailReport:
    """Measure the late-time tail masses sum_{|n|>2K} |u_n(t)|^2 on a K grid.

    Requires delta > 1.  For the non-local preset the absorbing-ball
    hypotheses (forcing above the regime threshold, initial data strictly
    inside the restricted ball) are checked; a violation downgrades the run
    to exploratory (``hypothesis_ok = False``) but the masses are still
    measured.  ``min_k_passing`` is the smallest grid K whose trailing
    masses all stay at or below xi; ``time_of_entry`` is the earliest sample
    time from which that K's mass stays at or below xi.
    """
    if params.delta <= 1.0:
        raise HypothesisError("tail study requires the dissipative regime delta > 1")
    if xi <= 0:
        raise ValueError("xi must be positive")
    if not k_grid or min(k_grid) < 0:
        raise ValueError("k_grid must be non-empty with non-negative entries")

    hypothesis_ok, note = True, None
    if params.is_nonlocal:
        report = classify_regime(params, forcing.norm2, v0_norm2=initial.norm2())
        lhs = (params.delta - 1.0) ** 3
        rhs = 8.0 * math.sqrt(1.0 + params.beta**2) * forcing.norm2
        if initial.norm2() >= report.restricted_radius_sq:
            hypothesis_ok, note = False, "initial data outside the restricted ball"
        elif lhs >= rhs:
            hypothesis_ok, note = False, "forcing below the absorbing-ball regime threshold"

    n_min = min(initial.n_min, forcing.state.n_min)
    n_max = max(initial.n_max, forcing.state.n_max)
    traj = integrate_adaptive(
        initial.embedded(n_min, n_max),
        params,
        forcing,
        horizon,
        tolerances=tolerances,
        sample_stride=sample_stride,
        snapshot_every=1,
        blowup_threshold=blowup_threshold,
    )
    if traj.blowup_time is not None:
        raise NumericalError(f"trajectory blew up at t={traj.blowup_time:.6g}")

    n = len(traj.snapshots)
    trailing = _trailing_slice(n)
    trailing_snaps = traj.snapshots[trailing]
    trailing_times = traj.times[trailing]
    ks = sorted(set(int(k) for k in k_grid))
    masses = np.array([[tail_mass(s, k) for s in trailing_snaps] for k in ks])

    min_k = None
    for i, k in enumerate(ks):
        if np.all(masses[i] <= xi):
            min_k = k
            break

    time_of_entry = None
    if min_k is not None:
        all_masses = np.array([tail_mass(s, min_k) for s in traj.snapshots])
        late = np.nonzero(all_masses > xi)[0]
        entry_idx = 0 if late.size == 0 else late[-1] + 1
        time_of_entry = float(traj.times[entry_idx])

    return TailReport(xi, ks, masses, trailing_times, min_k, time_of_entry, hypothesis_ok, note)


@dataclass
class AttractorSample:
    """Post-transient snapshot cloud standing in for one semiflow's attractor.

    ``sampling_tolerance`` is the largest distance between consecutive-stride
    snapshots near the horizon, i.e. the resolution up to which the cloud can
    certify distances.
    """

    points: list[LatticeState]
    transient_cut: float
    stride: float
    system_tag: str
    sampling_tolerance: float
    point_times: np.ndarray


def sample_attractor(
    system_tag: str,
    params: ModelParams,
    forcing: Forcing,
    seeds: list[LatticeState],
    transient_cut: float,
    stride: float,
    horizon: float,
    tolerances: tuple[float, float] = DEFAULT_TOLERANCES,
    absorb_margin: float = 1.1,
    threads: int = 1,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> AttractorSample:
    """Pool post-transient snapshots of all seed orbits of one system.

    ``system_tag`` is ``"LDGL"`` or ``"NLDGL"`` and overrides the (gamma, mu)
    weights.  Requires delta > 1; for the non-local system every seed must
    lie strictly inside the restricted ball.  Emits a warning when the
    requested transient is shorter than the absorbing-ball entry time
    computed for the seeds' enclosing ball.
    """
    if system_tag not in ("LDGL", "NLDGL"):
        raise ValueError("system_tag must be 'LDGL' or 'NLDGL'")
    if not seeds:
        raise ValueError("at least one seed is required")
    if transient_cut < 0 or stride <= 0 or horizon <= transient_cut:
        raise ValueError("need 0 <= transient_cut < horizon and stride > 0")
    p = params.with_nonlinearity(1.0, 0.0) if system_tag == "LDGL" else params.with_nonlinearity(0.0, 1.0)
    if p.delta <= 1.0:
        raise HypothesisError("attractor sampling requires delta > 1")

    enclosing_sq = max(s.norm2() for s in seeds)
    report = classify_regime(
        p,
        forcing.norm2,
        v0_norm2=enclosing_sq,
        capture_radius=math.sqrt(enclosing_sq),
        absorb_margin=absorb_margin,
    )
    if system_tag == "NLDGL" and enclosing_sq >= report.restricted_radius_sq:
        raise HypothesisError(
            f"seed norm^2 {enclosing_sq:.6g} outside the restricted ball "
            f"{report.restricted_radius_sq:.6g}"
        )
    if report.entry_time is not None and transient_cut < report.entry_time:
        warnings.warn(
            f"transient_cut {transient_cut:.6g} is below the absorbing-ball entry "
            f"time {report.entry_time:.6g}",
            stacklevel=2,
        )

    n_min = min(min(s.n_min for s in seeds), forcing.state.n_min)
    n_max = max(max(s.n_max for s in seeds), forcing.state.n_max)

    def _run(seed: LatticeState) -> Trajectory:
        return integrate_adaptive(
            seed.embedded(n_min, n_max),
            p,
            forcing,
            horizon,
            tolerances=tolerances,
            sample_stride=stride,
            snapshot_every=1,
            blowup_threshold=blowup_threshold,
        )

    points: list[LatticeState] = []
    point_times: list[float] = []
    tolerance = 0.0
    for traj in _pmap(_run, seeds, threads):
        if traj.blowup_time is not None:
            raise NumericalError(f"seed trajectory blew up at t={traj.blowup_time:.6g}")
        keep = [i for i, t in enumerate(traj.times) if t > transient_cut]
        if len(keep) < 2:
            raise ValueError("fewer than two post-transient snapshots; extend the horizon")
        points.extend(traj.snapshots[i] for i in keep)
        point_times.extend(traj.times[i] for i in keep)
        tolerance = max(tolerance, l2_distance(traj.snapshots[keep[-1]], traj.snapshots[keep[-2]]))

    return AttractorSample(points, transient_cut, stride, system_tag, tolerance, np.array(point_times))


def _cloud_matrix(cloud) -> list[LatticeState]:
    points = cloud.points if isinstance(cloud, AttractorSample) else list(cloud)
    if not points:
        raise ValueError("empty point cloud")
    return points


def hausdorff_semidistance(cloud_a, cloud_b) -> float:
    """sup over a of inf over b of the l2 distance, by exhaustive evaluation.

    Clouds are re-windowed onto their common window by zero extension; the
    per-pair distance is sqrt of the coordinatewise squared-magnitude sum.
    """
    pa = _cloud_matrix(cloud_a)
    pb = _cloud_matrix(cloud_b)
    n_min = min(min(s.n_min for s in pa), min(s.n_min for s in pb))
    n_max = max(max(s.n_max for s in pa), max(s.n_max for s in pb))
    mat_a = np.stack([s.embedded(n_min, n_max).values for s in pa])
    mat_b = np.stack([s.embedded(n_min, n_max).values for s in pb])
    sup = 0.0
    for i in range(mat_a.shape[0]):
        diff = mat_b - mat_a[i]
        d2 = (diff.real * diff.real + diff.imag * diff.imag).sum(axis=1)
        inf_i = float(np.min(np.sqrt(d2)))
        if i == 0 or inf_i > sup:
            sup = inf_i
    return sup


@dataclass
class CongruenceResult:
    """Hausdorff semi-distance of the sampled attractors per epsilon."""

    epsilons: list[float]
    distances: list[float]
    sampling_tolerances: list[float]
    bounds: list[float]
    c1: float
    case_label: str


def run_congruence(
    params: ModelParams,
    forcing: Forcing,
    epsilon_grid: list[float],
    family_template: InitialFamily,
    sampling: tuple[float, float, float],
    tolerances: tuple[float, float] = DEFAULT_TOLERANCES,
    threads: int = 1,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> CongruenceResult:
    """Sample both attractors from eps-scaled seed pairs and compare them.

    For each epsilon the seed pair (u0, v0) follows the closeness
    hypotheses; the local system is seeded with u0, the non-local one with
    v0, both sampled on the same post-transient grid, and the table of
    dist(A_v, A_u) values is returned together with the per-epsilon bound
    C1*eps^3 + 2*(sampling tolerance).  Requires delta > 1 and every seed
    strictly inside the restricted ball of the non-local system.
    """
    if params.delta <= 1.0:
        raise HypothesisError("congruence requires the dissipative regime delta > 1")
    if not epsilon_grid:
        raise ValueError("epsilon_grid must be non-empty")
    transient_cut, stride, horizon = sampling
    report = classify_regime(params, forcing.norm2)
    c1 = closeness_constants(params, family_template.c0, family_template.cu0, family_template.cv0).c_limsup

    pairs = {}
    for eps in epsilon_grid:
        u0, v0 = make_initial_family(
            eps,
            family_template.c0,
            family_template.cu0,
            family_template.cv0,
            family_template.u_profile,
            family_template.perturb_profile,
        )
        for seed in (u0, v0):
            if seed.norm2() >= report.restricted_radius_sq:
                raise HypothesisError(
                    f"seed for eps={eps:g} lies outside the restricted ball"
                )
        pairs[eps] = (u0, v0)

    def _cell(cell):
        eps, tag = cell
        seed = pairs[eps][0] if tag == "LDGL" else pairs[eps][1]
        return sample_attractor(
            tag,
            params,
            forcing,
            [seed],
            transient_cut,
            stride,
            horizon,
            tolerances=tolerances,
            blowup_threshold=blowup_threshold,
        )

    cells = [(eps, tag) for eps in epsilon_grid for tag in ("LDGL", "NLDGL")]
    clouds = dict(zip(cells, _pmap(_cell, cells, threads)))

    distances, tols, bounds = [], [], []
    for eps in epsilon_grid:
        cloud_u = clouds[(eps, "LDGL")]
        cloud_v = clouds[(eps, "NLDGL")]
        dist = hausdorff_semidistance(cloud_v, cloud_u)
        tol = max(cloud_u.sampling_tolerance, cloud_v.sampling_tolerance)
        distances.append(dist)
        tols.append(tol)
        bounds.append(c1 * eps**3 + 2.0 * tol)
    return CongruenceResult(list(epsilon_grid), distances, tols, bounds, c1, report.case_label)


@dataclass
class RegimePoint:
    """Verification record for one chi(0) grid value."""

    chi0: float
    monotone_nonincreasing: bool
    stays_in_annulus: bool | None
    terminal_chi: float
    terminal_gap_to_r2: float | None
    riccati_envelope_ok: bool
    bernoulli_envelope_ok: bool | None
    blowup_time: float | None


@dataclass
class RegimeVerificationReport:
    case_label: str
    r1: float | None
    r2: float | None
    points: list[RegimePoint]


def run_regime_verification(
    params: ModelParams,
    forcing: Forcing,
    chi0_grid: list[float],
    horizon: float,
    profile: LatticeState | None = None,
    tolerances: tuple[float, float] = DEFAULT_TOLERANCES,
    sample_stride: float = 0.1,
    threads: int = 1,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> RegimeVerificationReport:
    """Drive the non-local model over a chi(0) grid and check the envelopes.

    Each grid value is realised as sqrt(chi0) times a unit reference profile
    (single-site by default).  Per point the report records: the empirical
    norm monotonicity claim, the empirical annulus confinement (two-root
    case with r2 < chi0 <= r1), the terminal chi and its gap to r2, and the
    two assertable envelope dominations (comparison solution, and the
    two-root reciprocal envelope), each with slack 1 + 1e-6.
    """
    if params.delta <= 1.0:
        raise HypothesisError("regime verification requires delta > 1")
    p = params.with_nonlinearity(0.0, 1.0)
    rc = riccati_constants(p, forcing.norm2)
    report = classify_regime(p, forcing.norm2)
    phi = _unit_profile(
        profile
        if profile is not None
        else unit_site(0, forcing.state.n_min, forcing.state.n_max),
        "profile",
    )

    def _point(chi0: float) -> RegimePoint:
        if chi0 < 0:
            raise ValueError("chi0 must be non-negative")
        initial = math.sqrt(chi0) * phi
        n_min = min(initial.n_min, forcing.state.n_min)
        n_max = max(initial.n_max, forcing.state.n_max)
        traj = integrate_adaptive(
            initial.embedded(n_min, n_max),
            p,
            forcing,
            horizon,
            tolerances=tolerances,
            sample_stride=sample_stride,
            blowup_threshold=blowup_threshold,
        )
        chi = traj.chi
        x0 = float(chi[0])
        monotone = bool(np.all(chi <= x0 * (1.0 + 1e-12)))

        env = integrate_riccati(
            (rc.a, rc.b, rc.c), x0, horizon, tolerances=ORACLE_TOLERANCES, sample_times=traj.times
        )
        m = min(len(env.w), len(chi))
        riccati_ok = bool(np.all(chi[:m] <= env.w[:m] * ENVELOPE_SLACK))

        stays = gap = bern_ok = None
        if report.case_label == SUPERCRITICAL_ANNULUS:
            gap = abs(float(chi[-1]) - report.r2)
            if report.r2 < x0 <= report.r1:
                stays = bool(np.all((chi > report.r2) & (chi <= x0 * (1.0 + 1e-12))))
                zb = bernoulli_envelope(x0, rc, traj.times)
                bern_ok = bool(np.all(chi <= report.r2 + zb * ENVELOPE_SLACK))
        return RegimePoint(
            chi0, monotone, stays, float(chi[-1]), gap, riccati_ok, bern_ok, traj.blowup_time
        )

    points = _pmap(_point, chi0_grid, threads)
    return RegimeVerificationReport(report.case_label, report.r1, report.r2, points)


def identity_check(
    half_width: int = 64,
    num_states: int = 200,
    seed: int = 0,
) -> dict:
    """Operator-identity battery on random states: residual maxima.

    Covers self-adjointness and negativity of the second-difference stencil,
    the operator-norm bound with the alternating near-extremiser, the
    l2 -> linf and l4 embeddings, the balance-identity defect for both model
    presets, and the Lipschitz bound of the cubic operator on l2 balls.
    """
    rng = np.random.default_rng(seed)
    n_min, n_max = -half_width, half_width
    out = {
        "num_states": num_states,
        "half_width": half_width,
        "self_adjoint_residual": 0.0,
        "negativity_residual": 0.0,
        "operator_norm_ratio": 0.0,
        "embedding_linf_excess": 0.0,
        "embedding_l4_excess": 0.0,
        "balance_residual_local": 0.0,
        "balance_residual_nonlocal": 0.0,
        "lipschitz_ratio": 0.0,
    }
    for _ in range(num_states):
        u = random_state(rng, n_min, n_max)
        v = random_state(rng, n_min, n_max)
        lap_u = discrete_laplacian(u)
        lap_v = discrete_laplacian(v)
        lhs = inner(lap_u, v).real
        rhs = inner(u, lap_v).real
        out["self_adjoint_residual"] = max(
            out["self_adjoint_residual"], abs(lhs - rhs) / (u.norm() * v.norm())
        )
        d = np.diff(np.concatenate(([0.0], u.values, [0.0])))
        dir_sum = float(np.sum(d.real * d.real + d.imag * d.imag))
        neg = inner(lap_u, u).real
        out["negativity_residual"] = max(
            out["negativity_residual"], abs(neg + dir_sum) / max(dir_sum, 1e-300)
        )
        out["operator_norm_ratio"] = max(out["operator_norm_ratio"], lap_u.norm() / u.norm())
        l2_sq, l4, linf = norms(u)
        out["embedding_linf_excess"] = max(
            out["embedding_linf_excess"], linf / math.sqrt(l2_sq) - 1.0
        )
        out["embedding_l4_excess"] = max(out["embedding_l4_excess"], l4 / l2_sq**2 - 1.0)
        delta = 1.0 + 2.0 * rng.random()
        params = ModelParams(rng.random(), rng.random(), delta)
        g = Forcing.from_state(random_state(rng, n_min, n_max))
        for key, (gamma, mu) in (
            ("balance_residual_local", (1.0, 0.0)),
            ("balance_residual_nonlocal", (0.0, 1.0)),
        ):
            terms, residual = balance_residual(u, params.with_nonlinearity(gamma, mu), g)
            out[key] = max(out[key], residual / max(1.0, abs(terms.total)))

    for radius in (0.5, 1.0, 2.0):
        for _ in range(max(1, num_states // 4)):
            u = random_state(rng, n_min, n_max)
            v = random_state(rng, n_min, n_max)
            u = (radius * rng.random() / u.norm()) * u
            v = (radius * rng.random() / v.norm()) * v
            beta, gamma, mu = 2.0 * rng.random(), rng.random(), rng.random()
            params = ModelParams(0.0, beta, 2.0, gamma, mu)
            num = l2_distance(nonlinear_part(u, params), nonlinear_part(v, params))
            den = lipschitz_bound(beta, gamma, mu, radius) * l2_distance(u, v)
            if den > 0:
                out["lipschitz_ratio"] = max(out["lipschitz_ratio"], num / den)

    alt = LatticeState(n_min, np.resize([1.0, -1.0], n_max - n_min + 1).astype(complex))
    out["alternating_ratio"] = discrete_laplacian(alt).norm() / alt.norm()
    return out
