"""Truncated lattice states and the combined Ginzburg-Landau right-hand side.

States live on the integer line with square-summable complex amplitudes.  A
``LatticeState`` stores a finite window of sites; every site outside the
window is an implicit zero (Dirichlet truncation), so norms, inner products
and stencil evaluations over the window agree with the infinite-lattice
values for states supported inside it.

The combined evolution law handled here is

    du_n/dt = (1-delta) u_n + (1+i alpha)(u_{n+1} - 2 u_n + u_{n-1})
              - (1+i beta) [gamma |u_n|^2 u_n
                            + (mu/2)(u_{n+1} + u_{n-1}) |u_n|^2] + g_n,

whose (gamma, mu) = (1, 0) limit is the local model (cubic on-site term) and
whose (0, 1) limit is the non-local model (cubic nearest-neighbour term).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels

__all__ = [
    "ModelParams",
    "LatticeState",
    "Forcing",
    "BalanceTerms",
    "discrete_laplacian",
    "norms",
    "rhs_combined",
    "nonlinear_part",
    "lipschitz_bound",
    "balance_residual",
    "inner",
    "l2_distance",
    "unit_site",
    "zeros",
    "random_state",
    "align",
]


@dataclass(frozen=True)
class ModelParams:
    """Coefficient tuple (alpha, beta, delta, gamma, mu) of the combined model.

    ``delta`` is the intrinsic gain/loss parameter (loss for delta > 1),
    ``alpha`` the dispersion coefficient, ``beta`` the nonlinear phase
    coefficient, and (gamma, mu) weight the local and non-local cubic terms.
    Verification studies assume alpha, beta >= 0; free simulation accepts
    arbitrary reals.
    """

    alpha: float
    beta: float
    delta: float
    gamma: float = 1.0
    mu: float = 0.0

    @classmethod
    def local(cls, alpha: float, beta: float, delta: float) -> "ModelParams":
        """Local model preset: (gamma, mu) = (1, 0)."""
        return cls(alpha, beta, delta, 1.0, 0.0)

    @classmethod
    def nonlocal_(cls, alpha: float, beta: float, delta: float) -> "ModelParams":
        """Non-local model preset: (gamma, mu) = (0, 1)."""
        return cls(alpha, beta, delta, 0.0, 1.0)

    def with_nonlinearity(self, gamma: float, mu: float) -> "ModelParams":
        return ModelParams(self.alpha, self.beta, self.delta, gamma, mu)

    @property
    def is_local(self) -> bool:
        return self.gamma == 1.0 and self.mu == 0.0

    @property
    def is_nonlocal(self) -> bool:
        return self.gamma == 0.0 and self.mu == 1.0


def _as_values(values) -> np.ndarray:
    out = np.ascontiguousarray(values, dtype=np.complex128)
    if out.ndim != 1 or out.size == 0:
        raise ValueError("lattice window must be a non-empty 1-d sequence")
    return out


@dataclass
class LatticeState:
    """Finite window of complex amplitudes with implicit zero extension.

    ``offset`` is the lattice index of ``values[0]``; the stored window is
    ``[offset, offset + len(values) - 1]``.
    """

    offset: int
    values: np.ndarray

    def __post_init__(self):
        self.values = _as_values(self.values)

    @property
    def n_min(self) -> int:
        return self.offset

    @property
    def n_max(self) -> int:
        return self.offset + self.values.size - 1

    def sites(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def norm2(self) -> float:
        """Squared l2 norm over the window (= over the whole lattice)."""
        v = self.values
        return float(np.sum(v.real * v.real + v.imag * v.imag))

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def copy(self) -> "LatticeState":
        return LatticeState(self.offset, self.values.copy())

    def embedded(self, n_min: int, n_max: int) -> "LatticeState":
        """Zero-extend (or shrink) onto the window [n_min, n_max].

        Shrinking is allowed only over implicit-zero sites; discarding a
        non-zero amplitude raises ``ValueError``.
        """
        if n_max < n_min:
            raise ValueError("empty target window")
        out = np.zeros(n_max - n_min + 1, dtype=np.complex128)
        lo = max(self.n_min, n_min)
        hi = min(self.n_max, n_max)
        if lo <= hi:
            out[lo - n_min : hi - n_min + 1] = self.values[lo - self.offset : hi - self.offset + 1]
        clipped = [
            self.values[: max(0, min(n_min - self.n_min, self.values.size))],
            self.values[self.values.size - max(0, min(self.n_max - n_max, self.values.size)) :],
        ]
        for part in clipped:
            if part.size and np.any(part != 0):
                raise ValueError("embedding would discard non-zero amplitudes")
        return LatticeState(n_min, out)

    def __add__(self, other: "LatticeState") -> "LatticeState":
        off, a, b = align(self, other)
        return LatticeState(off, a + b)

    def __sub__(self, other: "LatticeState") -> "LatticeState":
        off, a, b = align(self, other)
        return LatticeState(off, a - b)

    def __mul__(self, factor) -> "LatticeState":
        return LatticeState(self.offset, self.values * factor)

    __rmul__ = __mul__


def align(a: LatticeState, b: LatticeState):
    """Zero-extend both states onto their union window.

    Returns ``(offset, values_a, values_b)``; the returned arrays are fresh.
    """
    n_min = min(a.n_min, b.n_min)
    n_max = max(a.n_max, b.n_max)
    width = n_max - n_min + 1
    va = np.zeros(width, dtype=np.complex128)
    vb = np.zeros(width, dtype=np.complex128)
    va[a.n_min - n_min : a.n_max - n_min + 1] = a.values
    vb[b.n_min - n_min : b.n_max - n_min + 1] = b.values
    return n_min, va, vb


def zeros(n_min: int, n_max: int) -> LatticeState:
    return LatticeState(n_min, np.zeros(n_max - n_min + 1, dtype=np.complex128))


def unit_site(site: int = 0, n_min: int | None = None, n_max: int | None = None) -> LatticeState:
    """The canonical basis sequence e_site on [n_min, n_max] (default {site})."""
    if n_min is None:
        n_min = site
    if n_max is None:
        n_max = site
    if not n_min <= site <= n_max:
        raise ValueError("site outside requested window")
    state = zeros(n_min, n_max)
    state.values[site - n_min] = 1.0
    return state


def random_state(rng: np.random.Generator, n_min: int, n_max: int, scale: float = 1.0) -> LatticeState:
    """Complex Gaussian state on [n_min, n_max], componentwise std ``scale``."""
    width = n_max - n_min + 1
    re = rng.standard_normal(width)
    im = rng.standard_normal(width)
    return LatticeState(n_min, scale * (re + 1j * im))


def inner(a: LatticeState, b: LatticeState) -> complex:
    """l2 inner product sum_n a_n * conj(b_n) with zero extension."""
    _, va, vb = align(a, b)
    return complex(np.sum(va * np.conj(vb)))


def l2_distance(a: LatticeState, b: LatticeState) -> float:
    _, va, vb = align(a, b)
    d = va - vb
    return math.sqrt(float(np.sum(d.real * d.real + d.imag * d.imag)))


@dataclass(frozen=True)
class Forcing:
    """External forcing sequence g with its cached squared l2 norm.

    The cached ``norm2`` must agree with the recomputed norm to one part in
    1e12; the constructor enforces this.
    """

    state: LatticeState
    norm2: float

    def __post_init__(self):
        actual = self.state.norm2()
        if abs(self.norm2 - actual) > 1e-12 * max(1.0, abs(self.norm2), actual):
            raise ValueError(
                f"cached forcing norm2 {self.norm2!r} disagrees with recomputed {actual!r}"
            )

    @classmethod
    def from_state(cls, state: LatticeState) -> "Forcing":
        return cls(state.copy(), state.norm2())

    @classmethod
    def single_site(
        cls, target_norm2: float, site: int = 0, n_min: int | None = None, n_max: int | None = None
    ) -> "Forcing":
        """g = c * e_site with c = sqrt(target_norm2) (exact target norm)."""
        if target_norm2 < 0:
            raise ValueError("target_norm2 must be non-negative")
        state = unit_site(site, n_min, n_max)
        state.values *= math.sqrt(target_norm2)
        return cls(state, target_norm2)

    @classmethod
    def zero(cls, n_min: int = 0, n_max: int = 0) -> "Forcing":
        return cls(zeros(n_min, n_max), 0.0)

    def values_on(self, offset: int, width: int) -> np.ndarray:
        """Forcing amplitudes on the window [offset, offset+width-1].

        Raises if the forcing has non-zero support outside that window (the
        evaluation window must contain the forcing, up to zero extension).
        """
        try:
            return self.state.embedded(offset, offset + width - 1).values
        except ValueError as exc:
            raise ValueError("forcing support extends outside the evaluation window") from exc


@dataclass(frozen=True)
class BalanceTerms:
    """Signed decomposition of d||u||^2/dt = 2 Re <F(u), u>.

    ``total = gain_loss - dirichlet - local_quartic - nonlocal_cubic
    + forcing_work``; ``dirichlet`` and (for gamma >= 0) ``local_quartic``
    are non-negative dissipation magnitudes, the other terms carry their
    signs.
    """

    gain_loss: float
    dirichlet: float
    local_quartic: float
    nonlocal_cubic: float
    forcing_work: float
    total: float


def discrete_laplacian(state: LatticeState) -> LatticeState:
    """Second-difference stencil with zero extension; window grows by one site."""
    v = state.values
    w = v.size
    out = np.zeros(w + 2, dtype=np.complex128)
    out[0:w] += v
    out[1 : w + 1] -= 2.0 * v
    out[2 : w + 2] += v
    return LatticeState(state.offset - 1, out)


def norms(state: LatticeState) -> tuple[float, float, float]:
    """Return (sum |u_n|^2, sum |u_n|^4, max |u_n|) over the window."""
    v = state.values
    a2 = v.real * v.real + v.imag * v.imag
    return float(np.sum(a2)), float(np.sum(a2 * a2)), float(np.sqrt(np.max(a2)))


def rhs_combined(state: LatticeState, params: ModelParams, forcing: Forcing) -> LatticeState:
    """Evaluate the combined right-hand side F(u) clamped to the state window.

    The stencil is applied with zero extension and the result is truncated
    back to the input window, so repeated evaluation keeps the state size
    fixed (the integration uses this).
    """
    g = forcing.values_on(state.offset, state.values.size)
    out = kernels.rhs(
        state.values, g, params.alpha, params.beta, params.delta, params.gamma, params.mu
    )
    return LatticeState(state.offset, out)


def nonlinear_part(state: LatticeState, params: ModelParams) -> LatticeState:
    """The cubic operator N(u) alone (window clamped, zero extension)."""
    v = state.values
    nb = np.zeros_like(v)
    nb[:-1] += v[1:]
    nb[1:] += v[:-1]
    a2 = v.real * v.real + v.imag * v.imag
    out = -(1.0 + 1j * params.beta) * (a2 * (params.gamma * v + (0.5 * params.mu) * nb))
    return LatticeState(state.offset, out)


def lipschitz_bound(beta: float, gamma: float, mu: float, radius: float) -> float:
    """Lipschitz constant of N on the l2 ball of the given radius.

    Assembled from the pointwise difference bounds: the on-site cubic
    contributes 3|gamma| R^2, the neighbour-coupled cubic 3|mu| R^2 (2 R^2
    from the amplitude factor plus R^2 from the two shifted differences),
    all under the l2 -> linf embedding |u_n| <= R.
    """
    return 3.0 * math.sqrt(1.0 + beta * beta) * (abs(gamma) + abs(mu)) * radius * radius


def balance_residual(
    state: LatticeState, params: ModelParams, forcing: Forcing
) -> tuple[BalanceTerms, float]:
    """Assemble the analytic balance decomposition and its defect.

    Returns ``(terms, residual)`` with ``residual = |2 Re <F(u), u> -
    terms.total|``; the inner product is evaluated independently of the
    decomposition.  The non-local cubic term is reported exactly (its real
    part), not through the sqrt(1+beta^2) estimate used downstream.
    """
    v = state.values
    g = forcing.values_on(state.offset, v.size)
    a2 = v.real * v.real + v.imag * v.imag
    l2_sq = float(np.sum(a2))
    quartic = float(np.sum(a2 * a2))

    # zero-extended forward differences, boundary jumps included
    d = np.empty(v.size + 1, dtype=np.complex128)
    d[0] = v[0]
    d[1:-1] = v[1:] - v[:-1]
    d[-1] = -v[-1]
    dirichlet = 2.0 * float(np.sum(d.real * d.real + d.imag * d.imag))

    nb = np.zeros_like(v)
    nb[:-1] += v[1:]
    nb[1:] += v[:-1]
    cubic_sum = complex(np.sum(a2 * nb * np.conj(v)))
    nonlocal_cubic = params.mu * ((1.0 + 1j * params.beta) * cubic_sum).real

    gain_loss = 2.0 * (1.0 - params.delta) * l2_sq
    local_quartic = 2.0 * params.gamma * quartic
    forcing_work = 2.0 * float(np.sum(g.real * v.real + g.imag * v.imag))
    total = gain_loss - dirichlet - local_quartic - nonlocal_cubic + forcing_work
    terms = BalanceTerms(gain_loss, dirichlet, local_quartic, nonlocal_cubic, forcing_work, total)

    f = rhs_combined(state, params, forcing).values
    twice_re = 2.0 * float(np.sum(f.real * v.real + f.imag * v.imag))
    return terms, abs(twice_re - total)
