"""Adaptive embedded Runge-Kutta time integration and a fixed-step reference.

The adaptive scheme is the Dormand-Prince 5(4) pair with proportional-
integral step control and the classic quartic dense-output interpolant;
samples are taken on a uniform stride grid via the interpolant.  The same
stepper drives both lattice states (complex windows) and the scalar
comparison equation.  A classical fixed-step RK4 integrator is provided as
an independent cross-check oracle.

All reductions use fixed, deterministic orders: identical inputs produce
bit-identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import NumericalError, StepUnderflowError
from .lattice import Forcing, LatticeState, ModelParams

__all__ = [
    "Trajectory",
    "ScalarTrajectory",
    "integrate_adaptive",
    "integrate_riccati",
    "rk4_reference",
    "DEFAULT_TOLERANCES",
    "ORACLE_TOLERANCES",
    "BLOWUP_THRESHOLD",
]

DEFAULT_TOLERANCES = (1e-8, 1e-6)
ORACLE_TOLERANCES = (1e-10, 1e-8)
BLOWUP_THRESHOLD = 1e8

# Dormand-Prince 5(4) tableau
_C = (0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0)
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)
# dense-output constants (Hairer's CONTD5)
_D1 = -12715105075.0 / 11282082432.0
_D3 = 87487479700.0 / 32700410799.0
_D4 = -10690763975.0 / 1880347072.0
_D5 = 701980252875.0 / 199316789632.0
_D6 = -1453857185.0 / 822651844.0
_D7 = 69997945.0 / 29380423.0

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_PI_BETA = 0.04
_PI_EXPO = 0.2 - 0.75 * _PI_BETA
_MIN_STEP = 1e-14
_MAX_STEPS = 2_000_000


@dataclass
class Trajectory:
    """Sampled lattice trajectory: chi(t) = ||u(t)||^2 on a uniform grid.

    ``blowup_time`` is set iff chi exceeded the blow-up threshold before the
    horizon; the sample arrays then cover only the valid prefix.
    """

    times: np.ndarray
    chi: np.ndarray
    snapshots: list[LatticeState] | None = None
    snapshot_times: np.ndarray | None = None
    blowup_time: float | None = None


@dataclass
class ScalarTrajectory:
    """Sampled solution of the scalar comparison equation."""

    times: np.ndarray
    w: np.ndarray
    blowup_time: float | None = None


def _error_norm(err, y0, y1, abs_tol, rel_tol):
    scale = abs_tol + rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    with np.errstate(over="ignore"):
        q = np.abs(err) / scale
        return math.sqrt(float(np.sum(q * q)) / q.size)


def _initial_step(f, y0, f0, horizon, abs_tol, rel_tol):
    with np.errstate(over="ignore", invalid="ignore"):
        scale = abs_tol + rel_tol * np.abs(y0)
        d0 = math.sqrt(float(np.sum((np.abs(y0) / scale) ** 2)) / y0.size)
        d1 = math.sqrt(float(np.sum((np.abs(f0) / scale) ** 2)) / y0.size)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, horizon)
        if not math.isfinite(h0) or h0 <= 0:
            return min(1e-6, horizon)
        f1 = f(y0 + h0 * f0)
        d2 = math.sqrt(float(np.sum((np.abs(f1 - f0) / scale) ** 2)) / y0.size) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        h = min(100.0 * h0, h1, horizon)
    return h if math.isfinite(h) and h > 0 else min(1e-6, horizon)


def _dense_eval(theta, h, y_old, y_new, k1, k3, k4, k5, k6, k7):
    ydiff = y_new - y_old
    bspl = h * k1 - ydiff
    r4 = ydiff - h * k7 - bspl
    r5 = h * (_D1 * k1 + _D3 * k3 + _D4 * k4 + _D5 * k5 + _D6 * k6 + _D7 * k7)
    return y_old + theta * (ydiff + (1.0 - theta) * (bspl + theta * (r4 + (1.0 - theta) * r5)))


def _adaptive_core(f, y0, horizon, abs_tol, rel_tol, sample_times, measure, blowup_threshold):
    """Advance y' = f(y) from t=0, returning values at the sample grid.

    Returns ``(samples, blowup_time)`` where ``samples`` is the list of
    states at the prefix of ``sample_times`` that was reached.
    """
    y = np.array(y0, copy=True)
    t = 0.0
    samples: list[np.ndarray] = []
    si = 0
    n_samples = len(sample_times)
    while si < n_samples and sample_times[si] <= 0.0:
        samples.append(y.copy())
        si += 1

    k1 = f(y)
    h = _initial_step(f, y, k1, horizon, abs_tol, rel_tol)
    facold = 1e-4
    steps = 0
    while t < horizon and si < n_samples:
        steps += 1
        if steps > _MAX_STEPS:
            raise NumericalError(f"step budget exhausted at t={t:.6g}")
        h = min(h, horizon - t)
        if h < _MIN_STEP:
            exc = StepUnderflowError(t)
            exc.partial_samples = samples
            raise exc

        k2 = f(y + h * (_A21 * k1))
        k3 = f(y + h * (_A31 * k1 + _A32 * k2))
        k4 = f(y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = f(y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = f(y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        y_new = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = f(y_new)
        err_vec = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        err = _error_norm(err_vec, y, y_new, abs_tol, rel_tol)

        if err <= 1.0:
            t_new = t + h
            while si < n_samples and sample_times[si] <= t_new:
                ts = sample_times[si]
                if ts >= t_new:
                    samples.append(y_new.copy())
                else:
                    theta = (ts - t) / h
                    samples.append(_dense_eval(theta, h, y, y_new, k1, k3, k4, k5, k6, k7))
                si += 1
            factor = _MAX_FACTOR if err == 0.0 else _SAFETY * err**-_PI_EXPO * facold**_PI_BETA
            facold = max(err, 1e-4)
            h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            t = t_new
            y = y_new
            k1 = k7
            if measure(y) > blowup_threshold:
                return samples, t
        else:
            h *= min(1.0, max(_MIN_FACTOR, _SAFETY * err**-0.2))
    return samples, None


def _sample_grid(horizon: float, stride: float) -> np.ndarray:
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if stride <= 0:
        raise ValueError("sample_stride must be positive")
    count = int(math.floor(horizon / stride + 1e-9))
    times = stride * np.arange(count + 1, dtype=float)
    if horizon - times[-1] > 1e-9 * stride:
        times = np.append(times, horizon)
    return times


def _chi(values: np.ndarray) -> float:
    return float(np.sum(values.real * values.real + values.imag * values.imag))


def integrate_adaptive(
    initial: LatticeState,
    params: ModelParams,
    forcing: Forcing,
    horizon: float,
    tolerances: tuple[float, float] = DEFAULT_TOLERANCES,
    sample_stride: float = 0.25,
    snapshot_every: int | None = None,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> Trajectory:
    """Advance the lattice under the combined model with adaptive control.

    Samples chi(t) = ||u(t)||^2 every ``sample_stride`` time units; when
    ``snapshot_every = k`` every k-th sampled state is retained.  Integration
    stops early (with ``blowup_time`` set) once chi exceeds the threshold.
    Raises ``StepUnderflowError`` if the step size falls below 1e-14.
    """
    abs_tol, rel_tol = tolerances
    if abs_tol <= 0 or rel_tol <= 0:
        raise ValueError("tolerances must be positive")
    g = forcing.values_on(initial.offset, initial.values.size)
    p = params

    def f(y):
        return kernels.rhs(y, g, p.alpha, p.beta, p.delta, p.gamma, p.mu)

    times = _sample_grid(horizon, sample_stride)
    try:
        samples, blowup_time = _adaptive_core(
            f, initial.values, horizon, abs_tol, rel_tol, times, _chi, blowup_threshold
        )
    except StepUnderflowError as exc:
        partial = getattr(exc, "partial_samples", [])
        t_part = times[: len(partial)]
        chi_part = np.array([_chi(s) for s in partial])
        raise StepUnderflowError(
            exc.time, Trajectory(t_part, chi_part, None, None, None)
        ) from None
    times = times[: len(samples)]
    chi = np.array([_chi(s) for s in samples])
    snapshots = snapshot_times = None
    if snapshot_every is not None:
        if snapshot_every < 1:
            raise ValueError("snapshot_every must be a positive integer")
        idx = range(0, len(samples), snapshot_every)
        snapshots = [LatticeState(initial.offset, samples[i]) for i in idx]
        snapshot_times = times[:: snapshot_every].copy()
    return Trajectory(times, chi, snapshots, snapshot_times, blowup_time)


def integrate_riccati(
    constants: tuple[float, float, float],
    x0: float,
    horizon: float,
    tolerances: tuple[float, float] = ORACLE_TOLERANCES,
    sample_stride: float = 0.05,
    sample_times: np.ndarray | None = None,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> ScalarTrajectory:
    """Solve w' = -A w + B w^2 + C, w(0) = x0, with adaptive control.

    This is the equality version of the comparison inequality bounding
    chi(t); blow-up (w exceeding the threshold) is detected and recorded.
    """
    if x0 < 0:
        raise ValueError("x0 must be non-negative")
    a_c, b_c, c_c = (float(v) for v in constants)
    abs_tol, rel_tol = tolerances

    def f(y):
        return -a_c * y + b_c * (y * y) + c_c

    times = np.asarray(sample_times, dtype=float) if sample_times is not None else _sample_grid(horizon, sample_stride)
    y0 = np.array([float(x0)])
    samples, blowup_time = _adaptive_core(
        f, y0, horizon, abs_tol, rel_tol, times, lambda y: float(y[0]), blowup_threshold
    )
    times = times[: len(samples)]
    w = np.array([float(s[0]) for s in samples])
    return ScalarTrajectory(times, w, blowup_time)


def rk4_reference(
    initial: LatticeState,
    params: ModelParams,
    forcing: Forcing,
    horizon: float,
    dt: float,
    sample_stride: float = 0.25,
    snapshot_every: int | None = None,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> Trajectory:
    """Classical fixed-step 4th-order integration (independent cross-check).

    The step is snapped to an integer number of sub-steps per sample stride,
    so samples land on exact step boundaries.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    g = forcing.values_on(initial.offset, initial.values.size)
    p = params

    def f(y):
        return kernels.rhs(y, g, p.alpha, p.beta, p.delta, p.gamma, p.mu)

    times = _sample_grid(horizon, sample_stride)
    samples = [np.array(initial.values, copy=True)]
    blowup_time = None
    y = samples[0].copy()
    for j in range(1, len(times)):
        span = times[j] - times[j - 1]
        nsub = max(1, int(round(span / dt)))
        h = span / nsub
        stop = False
        for sub in range(nsub):
            k1 = f(y)
            k2 = f(y + (0.5 * h) * k1)
            k3 = f(y + (0.5 * h) * k2)
            k4 = f(y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if _chi(y) > blowup_threshold:
                blowup_time = times[j - 1] + (sub + 1) * h
                stop = True
                break
        if stop:
            break
        samples.append(y.copy())
    times = times[: len(samples)]
    chi = np.array([_chi(s) for s in samples])
    snapshots = snapshot_times = None
    if snapshot_every is not None:
        idx = range(0, len(samples), snapshot_every)
        snapshots = [LatticeState(initial.offset, samples[i]) for i in idx]
        snapshot_times = times[::snapshot_every].copy()
    return Trajectory(times, chi, snapshots, snapshot_times, blowup_time)
