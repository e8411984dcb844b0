"""Spin-1/2 coupled to two bosonic modes: Hamiltonian, evolution, observables.

The model Hamiltonian on spin (x) alpha (x) beta is

    H = sqrt(2) sigma_x
      + sqrt(2) (n_alpha + n_beta)
      + g [ (b + b^dag) sigma_x + (a + a^dag) sigma_y ],

with spin-boson coupling ``g = -sqrt(2 G) / (sqrt(pi) mu^(3/2))``.  Note
the beta mode couples through sigma_x and the alpha mode through
sigma_y.  Evolution is exact spectral propagation: the Hamiltonian is
diagonalized once (dense Hermitian eigensolve, cached) and phases
``exp(-i E t)`` are applied, so there is no time-step error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property, lru_cache

import numpy as np

from .errors import NumericalConsistencyError
from .gravity import bogoliubov_params
from .operators import (
    OperatorMatrix,
    SpaceSpec,
    StateVector,
    annihilation_matrix,
    number_matrix,
    pauli_matrix,
    tensor_embed,
)

SQRT2 = math.sqrt(2.0)

_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])

#: tolerance on | ||psi(t)|| - 1 | along a trace
NORM_DRIFT_ATOL = 1e-10
#: relative tolerance on energy constancy along a trace
ENERGY_DRIFT_RTOL = 1e-8


@dataclass(frozen=True)
class ModelParams:
    """All simulation inputs: coupling knob G, mass mu, cutoff N, time grid."""

    G: float
    mu: float = 1.0
    N: int = 14
    t_max: float = 100.0
    dt: float = 0.02

    def __post_init__(self):
        if self.G < 0:
            raise ValueError(f"G must be non-negative, got {self.G}")
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.N < 2:
            raise ValueError(f"cutoff N must be >= 2, got {self.N}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_max < self.dt:
            raise ValueError(f"t_max must be >= dt, got t_max={self.t_max} dt={self.dt}")

    @property
    def space(self) -> SpaceSpec:
        return SpaceSpec(spin_dim=2, fock_cutoffs=(self.N, self.N))

    @property
    def times(self) -> np.ndarray:
        """Output grid t = 0, dt, ..., t_max (inclusive up to rounding)."""
        n_steps = int(math.floor(self.t_max / self.dt + 1e-9))
        return self.dt * np.arange(n_steps + 1)


def coupling_strength(G: float, mu: float) -> float:
    """Effective spin-boson coupling ``-sqrt(2 G) / (sqrt(pi) mu^(3/2))``.

    Its magnitude reaches the bosonic self-interaction sqrt(2) at
    ``G = pi`` (for mu = 1), the crossover point of the phenomenology.
    """
    G = float(G)
    mu = float(mu)
    if G < 0:
        raise ValueError(f"G must be non-negative, got {G}")
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    return -math.sqrt(2.0 * G) / (math.sqrt(math.pi) * mu ** 1.5)


@lru_cache(maxsize=32)
def _embedded(space: SpaceSpec) -> dict[str, np.ndarray]:
    """Frequently used operators embedded into the composite space."""
    N_a, N_b = space.fock_cutoffs
    a = annihilation_matrix(N_a)
    b = annihilation_matrix(N_b)
    x_a = OperatorMatrix(a.space, a.entries + a.entries.conj().T, hermitian_hint=True)
    x_b = OperatorMatrix(b.space, b.entries + b.entries.conj().T, hermitian_hint=True)
    ops = {
        "sx": tensor_embed(pauli_matrix("x"), "spin", space),
        "sy": tensor_embed(pauli_matrix("y"), "spin", space),
        "sz": tensor_embed(pauli_matrix("z"), "spin", space),
        "n_a": tensor_embed(number_matrix(N_a), "alpha", space),
        "n_b": tensor_embed(number_matrix(N_b), "beta", space),
        "x_a": tensor_embed(x_a, "alpha", space),
        "x_b": tensor_embed(x_b, "beta", space),
        "a": tensor_embed(a, "alpha", space),
        "b": tensor_embed(b, "beta", space),
    }
    return {k: v.entries for k, v in ops.items()}


@dataclass(eq=False)
class MinimalHamiltonian:
    """Assembled model Hamiltonian with a cached eigendecomposition."""

    params: ModelParams
    g: float
    matrix: OperatorMatrix

    @property
    def space(self) -> SpaceSpec:
        return self.matrix.space

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors, computed once per Hamiltonian."""
        try:
            evals, evecs = np.linalg.eigh(self.matrix.entries)
        except np.linalg.LinAlgError as exc:
            raise NumericalConsistencyError(f"eigensolver failed: {exc}") from exc
        evals.setflags(write=False)
        evecs.setflags(write=False)
        return evals, evecs


def build_minimal_hamiltonian(params: ModelParams, g: float | None = None) -> MinimalHamiltonian:
    """Assemble the model Hamiltonian on the spin (x) alpha (x) beta space.

    ``g`` defaults to ``coupling_strength(params.G, params.mu)``; passing
    an explicit value (e.g. 0 to freeze the spin-boson exchange at any G)
    overrides it.
    """
    if g is None:
        g = coupling_strength(params.G, params.mu)
    g = float(g)
    space = params.space
    ops = _embedded(space)
    m = SQRT2 * ops["sx"] + SQRT2 * (ops["n_a"] + ops["n_b"])
    if g != 0.0:
        m = m + g * (ops["sx"] @ ops["x_b"] + ops["sy"] @ ops["x_a"])
    matrix = OperatorMatrix(space, m, hermitian_hint=True)
    return MinimalHamiltonian(params=params, g=g, matrix=matrix)


_SPIN_STATES = {
    ("x", +1): np.array([1.0, 1.0], dtype=np.complex128) / SQRT2,
    ("x", -1): np.array([1.0, -1.0], dtype=np.complex128) / SQRT2,
    ("y", +1): np.array([1.0, 1.0j], dtype=np.complex128) / SQRT2,
    ("y", -1): np.array([1.0, -1.0j], dtype=np.complex128) / SQRT2,
    ("z", +1): np.array([1.0, 0.0], dtype=np.complex128),
    ("z", -1): np.array([0.0, 1.0], dtype=np.complex128),
}


def initial_state(direction: str, sign: int, space: SpaceSpec) -> StateVector:
    """Product state: spin along +/- direction, both modes in vacuum."""
    key = (direction, int(sign))
    if key not in _SPIN_STATES:
        raise ValueError(f"direction must be x|y|z with sign +-1, got "
                         f"{direction!r}, {sign!r}")
    N_a, N_b = space.fock_cutoffs
    vac = np.zeros(N_a * N_b, dtype=np.complex128)
    vac[0] = 1.0
    return StateVector(space, np.kron(_SPIN_STATES[key], vac))


def evolve(h: MinimalHamiltonian, psi0: StateVector, times) -> list[StateVector]:
    """Evolve ``psi0`` to each requested time by spectral propagation.

    ``times`` must be sorted and non-negative.  The t = 0 entry returns
    the input state unchanged; every propagated state is re-validated to
    unit norm on construction.
    """
    if psi0.space != h.space:
        raise ValueError("initial state does not live on the Hamiltonian's space")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise ValueError("times must be a 1-D sequence")
    if times.size and times[0] < 0:
        raise ValueError("times must be non-negative")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted in increasing order")
    evals, evecs = h.eigensystem
    c0 = evecs.conj().T @ psi0.amplitudes
    out = []
    for t in times:
        if t == 0.0:
            out.append(psi0)
        else:
            amp = evecs @ (np.exp(-1j * evals * t) * c0)
            out.append(StateVector(psi0.space, amp))
    return out


@dataclass(frozen=True)
class ObservableTrace:
    """Time series of spin components, mode populations, energy and norm."""

    times: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    n_alpha: np.ndarray
    n_beta: np.ndarray
    energy: np.ndarray
    norm: np.ndarray
    h11: np.ndarray | None = None
    h12: np.ndarray | None = None

    def __post_init__(self):
        n = self.times.shape[0]
        for name in ("sx", "sy", "sz", "n_alpha", "n_beta", "energy", "norm"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise ValueError(f"column {name} has length {arr.shape}, expected {n}")
        for name in ("h11", "h12"):
            arr = getattr(self, name)
            if arr is not None and arr.shape != (n,):
                raise ValueError(f"column {name} has length {arr.shape}, expected {n}")

    # populations mapped to [0, 1]; plots of the spin curves use these
    @property
    def px(self) -> np.ndarray:
        return 0.5 * (1.0 + self.sx)

    @property
    def py(self) -> np.ndarray:
        return 0.5 * (1.0 + self.sy)

    @property
    def pz(self) -> np.ndarray:
        return 0.5 * (1.0 + self.sz)


def observable_trace(h: MinimalHamiltonian, psi0: StateVector,
                     params: ModelParams | None = None,
                     include_metric: bool = False) -> ObservableTrace:
    """Evaluate all observables on the time grid of ``params``.

    Norm and energy constancy are enforced (``NORM_DRIFT_ATOL``,
    ``ENERGY_DRIFT_RTOL``); a violation raises
    :class:`NumericalConsistencyError` since it signals a broken
    propagation, not physics.
    """
    if params is None:
        params = h.params
    if psi0.space != h.space:
        raise ValueError("initial state does not live on the Hamiltonian's space")
    if params.space != h.space:
        raise ValueError("params describe a different space than the Hamiltonian")
    times = params.times
    evals, evecs = h.eigensystem
    c0 = evecs.conj().T @ psi0.amplitudes
    # states[t, :] = V (exp(-i E t) * c0)
    coeffs = np.exp(-1j * np.outer(times, evals)) * c0
    states = coeffs @ evecs.T

    prob = np.abs(states) ** 2
    norm = np.sqrt(prob.sum(axis=1))
    if np.abs(norm - 1.0).max() > NORM_DRIFT_ATOL:
        raise NumericalConsistencyError(
            f"norm drifted by {np.abs(norm - 1.0).max():.3e} along the trace")

    N = params.N
    half = N * N
    up, down = states[:, :half], states[:, half:]
    cross = np.einsum("ti,ti->t", up.conj(), down)
    sx = 2.0 * cross.real
    sy = 2.0 * cross.imag
    sz = prob[:, :half].sum(axis=1) - prob[:, half:].sum(axis=1)

    n_levels = np.arange(N, dtype=float)
    w_alpha = np.tile(np.repeat(n_levels, N), 2)
    w_beta = np.tile(np.tile(n_levels, N), 2)
    n_alpha = prob @ w_alpha
    n_beta = prob @ w_beta

    H = h.matrix.entries
    energy = np.einsum("ti,ti->t", states.conj(), states @ H.T).real
    drift = np.abs(energy - energy[0]).max()
    if drift > ENERGY_DRIFT_RTOL * (1.0 + abs(energy[0])):
        raise NumericalConsistencyError(
            f"energy drifted by {drift:.3e} along the trace")

    h11 = h12 = None
    if include_metric:
        bp = bogoliubov_params(params.mu)
        scale = SQRT2 * math.exp(-bp.r)
        ops = _embedded(h.space)
        mean_a = np.einsum("ti,ti->t", states.conj(), states @ ops["a"].T)
        mean_b = np.einsum("ti,ti->t", states.conj(), states @ ops["b"].T)
        h11 = scale * mean_a.real
        h12 = scale * mean_b.real

    return ObservableTrace(times=times, sx=sx, sy=sy, sz=sz,
                           n_alpha=n_alpha, n_beta=n_beta,
                           energy=energy, norm=norm, h11=h11, h12=h12)


def symmetry_check(h: MinimalHamiltonian) -> float:
    """Residual ``max |[H, S]|`` for S = sigma_x (x) parity(alpha) (x) 1.

    S commutes with every term of the model for any coupling (the
    sigma_y (a + a^dag) term anticommutes with both factors of S), which
    is the exact reason a spin-x start never develops sigma_y or sigma_z
    components.
    """
    N_a, N_b = h.space.fock_cutoffs
    parity = np.diag((-1.0) ** np.arange(N_a))
    s_op = np.kron(_PAULI_X, np.kron(parity, np.eye(N_b)))
    H = h.matrix.entries
    return float(np.abs(H @ s_op - s_op @ H).max())


def truncation_convergence(params: ModelParams, direction: str, sign: int,
                           N_list) -> list[tuple[int, int, float]]:
    """Max observable deviation between runs at consecutive cutoffs.

    For each consecutive pair of ``N_list`` the reported number is the
    maximum over the time grid and over the five observables
    (sx, sy, sz, n_alpha, n_beta) of the absolute trace difference.
    """
    N_list = [int(n) for n in N_list]
    if len(N_list) < 2:
        raise ValueError("need at least two cutoffs to compare")
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError(f"cutoff list must be strictly increasing, got {N_list}")
    traces = []
    for N in N_list:
        p = replace(params, N=N)
        h = build_minimal_hamiltonian(p)
        psi0 = initial_state(direction, sign, p.space)
        traces.append(observable_trace(h, psi0, p))
    out = []
    for (N_lo, tr_lo), (N_hi, tr_hi) in zip(zip(N_list, traces),
                                            zip(N_list[1:], traces[1:])):
        dev = max(
            float(np.abs(getattr(tr_lo, name) - getattr(tr_hi, name)).max())
            for name in ("sx", "sy", "sz", "n_alpha", "n_beta")
        )
        out.append((N_lo, N_hi, dev))
    return out
