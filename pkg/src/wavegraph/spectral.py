"""Dirichlet wave problems on finite vertex sets, solved by eigen-expansion.

On a finite set Omega with u = 0 on its vertex boundary, the solution is

    u(t, x) = sum_i [a_i cos(t sqrt(l_i)) + b_i sin(t sqrt(l_i)) / sqrt(l_i)] psi_i(x)

where (l_i, psi_i) are the eigenpairs of -Delta with zero boundary data,
orthonormal in l^2(Omega, mu). Everything here is analytic in t, so time
derivatives of every order are exact termwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .graph import GraphError, WeightedGraph, vertex_boundary
from .laplacian import VertexFunction

__all__ = [
    "SpectralError",
    "ConvergenceError",
    "DirichletMatrix",
    "DirichletProblem",
    "SpectralData",
    "WaveSolution",
    "ForcedWaveSolution",
    "ZeroExtension",
    "dirichlet_matrix",
    "eigendecompose",
    "solve_wave",
    "solve_wave_forced",
]

EIGEN_TOL = 1e-12
MAX_SWEEPS = 100


class SpectralError(GraphError):
    pass


class ConvergenceError(SpectralError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class DirichletMatrix:
    """-Delta restricted to Omega with zero boundary data.

    ``L`` is the operator in the vertex basis (not symmetric when mu is not
    constant); ``S = M^{1/2} L M^{-1/2}`` is its symmetric form.
    """

    omega: tuple[int, ...]
    L: np.ndarray
    S: np.ndarray
    mu: np.ndarray


def _components(g: WeightedGraph, omega: Sequence[int]) -> list[list[int]]:
    inside = set(omega)
    left = set(omega)
    comps = []
    for v in omega:
        if v not in left:
            continue
        comp, stack = [], [v]
        left.discard(v)
        while stack:
            a = stack.pop()
            comp.append(a)
            for b, _ in g.adjacency[a]:
                if b in inside and b in left:
                    left.discard(b)
                    stack.append(b)
        comps.append(comp)
    return comps


def dirichlet_matrix(g: WeightedGraph, omega: Iterable[int]) -> DirichletMatrix:
    """Matrix of -Delta on Omega, extension by zero on the vertex boundary.

    Raises:
        SpectralError: Omega is empty, or some component of Omega has no
            boundary vertex (its spectrum would contain 0).
    """
    omega = tuple(dict.fromkeys(int(x) for x in omega))
    if not omega:
        raise SpectralError("Omega must be nonempty")
    for x in omega:
        g.check_vertex(x)
    pos = {x: i for i, x in enumerate(omega)}
    for comp in _components(g, omega):
        if not any(y not in pos for x in comp for y, _ in g.adjacency[x]):
            raise SpectralError(
                "Dirichlet spectrum not strictly positive: the component of Omega "
                f"containing {min(comp)} has an empty vertex boundary"
            )
    n = len(omega)
    mu = np.array([g.mu[x] for x in omega])
    L = np.zeros((n, n))
    S = np.zeros((n, n))
    for i, x in enumerate(omega):
        for y, w in g.adjacency[x]:
            L[i, i] += w / g.mu[x]
            j = pos.get(y)
            if j is not None:
                L[i, j] = -w / g.mu[x]
                S[i, j] = -w / math.sqrt(g.mu[x] * g.mu[y])
        S[i, i] = L[i, i]
    return DirichletMatrix(omega, L, S, mu)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenpairs of -Delta on Omega; ``psi[:, i]`` is the i-th eigenvector."""

    eigenvalues: np.ndarray
    psi: np.ndarray
    mu: np.ndarray
    omega: tuple[int, ...] | None = None
    sweeps: int = 0
    off_diagonal: float = 0.0

    @property
    def N(self) -> int:
        return len(self.eigenvalues)

    def gram(self) -> np.ndarray:
        """mu-weighted Gram matrix of the eigenvectors (identity ideally)."""
        return self.psi.T @ (self.mu[:, None] * self.psi)

    def orthonormality_error(self) -> float:
        return float(np.max(np.abs(self.gram() - np.eye(self.N)))) if self.N else 0.0

    def eigen_residual(self, L: np.ndarray) -> float:
        """max_i ||L psi_i - l_i psi_i||_inf for the unsymmetrized operator."""
        if not self.N:
            return 0.0
        return float(np.max(np.abs(L @ self.psi - self.psi * self.eigenvalues)))


def eigendecompose(
    S: np.ndarray,
    tol: float = EIGEN_TOL,
    mu: Sequence[float] | None = None,
    omega: Sequence[int] | None = None,
    max_sweeps: int = MAX_SWEEPS,
) -> SpectralData:
    """Diagonalize the symmetric matrix ``S`` by cyclic Jacobi rotations.

    Eigenvalues come back ascending. When ``mu`` is given, eigenvectors are
    mapped back through M^{-1/2} and normalized in the mu inner product.

    Raises:
        SpectralError: ``S`` is not symmetric within ``tol``.
        ConvergenceError: off-diagonal mass still above tolerance after
            ``max_sweeps`` sweeps.
    """
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise SpectralError(f"expected a square matrix, got shape {S.shape}")
    n = S.shape[0]
    scale = float(np.linalg.norm(S)) or 1.0
    asym = float(np.max(np.abs(S - S.T))) if n else 0.0
    if asym > tol * scale:
        raise SpectralError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    mu_arr = np.ones(n) if mu is None else np.asarray(mu, dtype=np.float64)

    w, V, sweeps, off = kernels.jacobi_eigh(S, tol, max_sweeps)
    if off > tol * scale:
        raise ConvergenceError(
            f"Jacobi iteration did not converge in {max_sweeps} sweeps "
            f"(off-diagonal norm {off:.3e})",
            off,
        )
    order = np.argsort(w, kind="stable")
    w = w[order]
    psi = V[:, order] / np.sqrt(mu_arr)[:, None]
    norms = np.sqrt(np.sum(mu_arr[:, None] * psi * psi, axis=0))
    psi = psi / norms
    return SpectralData(w, psi, mu_arr, None if omega is None else tuple(omega), int(sweeps), float(off))


def _as_values(data, omega: Sequence[int], name: str) -> np.ndarray:
    if data is None:
        return np.zeros(len(omega))
    if isinstance(data, VertexFunction):
        extra = set(data.support) - set(omega)
        if extra:
            raise SpectralError(f"{name} is defined outside Omega at {sorted(extra)[:5]}")
        return np.array([data(x) for x in omega], dtype=np.float64)
    if callable(data) and not isinstance(data, Mapping):
        return np.array([data(x) for x in omega], dtype=np.float64)
    data = {int(k): v for k, v in dict(data).items()}
    extra = set(data) - set(omega)
    if extra:
        raise SpectralError(f"{name} is defined outside Omega at {sorted(extra)[:5]}")
    return np.array([float(data.get(x, 0.0)) for x in omega], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class DirichletProblem:
    """Homogeneous wave equation on Omega with value data g0, velocity h0.

    Missing entries of mapping data are zero.
    """

    graph: WeightedGraph
    omega: tuple[int, ...]
    boundary: tuple[int, ...]
    g0: np.ndarray
    h0: np.ndarray

    @classmethod
    def create(cls, graph: WeightedGraph, omega: Iterable[int], g0=None, h0=None) -> "DirichletProblem":
        omega = tuple(dict.fromkeys(int(x) for x in omega))
        for x in omega:
            graph.check_vertex(x)
        return cls(
            graph,
            omega,
            vertex_boundary(graph, omega),
            _as_values(g0, omega, "g0"),
            _as_values(h0, omega, "h0"),
        )


def _phase(order: int, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(d/dtheta)^order of cos and sin, evaluated at theta."""
    c, s = np.cos(theta), np.sin(theta)
    r = order % 4
    if r == 0:
        return c, s
    if r == 1:
        return -s, c
    if r == 2:
        return -c, -s
    return s, -c


@dataclass(frozen=True, eq=False)
class WaveSolution:
    """Evaluator for the eigen-expansion of a Dirichlet wave problem."""

    problem: DirichletProblem
    matrix: DirichletMatrix
    spectral: SpectralData
    a: np.ndarray
    b: np.ndarray
    _pos: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._pos.update({x: i for i, x in enumerate(self.problem.omega)})

    @property
    def omega(self) -> tuple[int, ...]:
        return self.problem.omega

    @property
    def boundary(self) -> tuple[int, ...]:
        return self.problem.boundary

    @cached_property
    def frequencies(self) -> np.ndarray:
        return np.sqrt(self.spectral.eigenvalues)

    @cached_property
    def _boundary_set(self) -> frozenset[int]:
        return frozenset(self.boundary)

    def modes(self, t: float, order: int = 0) -> np.ndarray:
        """Coefficient of each psi_i in the order-th time derivative at t."""
        if order < 0:
            raise SpectralError(f"derivative order must be >= 0, got {order}")
        om = self.frequencies
        dc, ds = _phase(order, om * t)
        return self.a * om**order * dc + self.b * om ** (order - 1) * ds

    def slice(self, t: float, order: int = 0) -> np.ndarray:
        """Order-th time derivative at time t over Omega (in ``omega`` order)."""
        return self.spectral.psi @ self.modes(t, order)

    def _locate(self, x: int) -> int | None:
        i = self._pos.get(x)
        if i is None and x not in self._boundary_set:
            raise SpectralError(f"vertex {x} is outside the closure of Omega")
        return i

    def time_derivative(self, t: float, x: int, order: int = 0) -> float:
        i = self._locate(x)
        if i is None:
            return 0.0
        return float(self.spectral.psi[i] @ self.modes(t, order))

    def evaluate(self, t: float, x: int) -> float:
        return self.time_derivative(t, x, 0)

    def __call__(self, t: float, x: int) -> float:
        return self.evaluate(t, x)

    def time_slice(self, t: float, order: int = 0) -> VertexFunction:
        """Order-th derivative at t on Omega plus zeros on the boundary."""
        vals = dict(zip(self.omega, self.slice(t, order)))
        vals.update((y, 0.0) for y in self.boundary)
        return VertexFunction(vals)

    def residual(self, t_samples: Iterable[float]) -> float:
        """max |d^2u/dt^2 - Delta u| over the samples and Omega."""
        worst = 0.0
        for t in t_samples:
            lap = -self.matrix.L @ self.slice(t, 0)
            r = np.max(np.abs(self.slice(t, 2) - lap)) if len(lap) else 0.0
            worst = max(worst, float(r))
        return worst

    def reconstruction_error(self) -> float:
        """Sup-norm mismatch between the expansions and (g0, h0)."""
        psi = self.spectral.psi
        eg = np.max(np.abs(psi @ self.a - self.problem.g0))
        eh = np.max(np.abs(psi @ self.b - self.problem.h0))
        return float(max(eg, eh))

    def energy(self, t: float) -> float:
        """0.5 sum mu (u_t)^2 + 0.5 sum over edges omega (u(y) - u(x))^2.

        Edges are those with at least one end in Omega; u is zero on the
        boundary.
        """
        g = self.problem.graph
        u = dict(zip(self.omega, self.slice(t, 0)))
        ut = self.slice(t, 1)
        kinetic = 0.5 * float(np.sum(self.spectral.mu * ut * ut))
        potential = 0.0
        seen = set()
        for x in self.omega:
            for y, w in g.adjacency[x]:
                key = (min(x, y), max(x, y))
                if key in seen:
                    continue
                seen.add(key)
                potential += w * (u.get(y, 0.0) - u[x]) ** 2
        return kinetic + 0.5 * potential


def solve_wave(problem: DirichletProblem, tol: float = EIGEN_TOL) -> WaveSolution:
    """Eigen-expansion solution of the homogeneous Dirichlet problem."""
    mat = dirichlet_matrix(problem.graph, problem.omega)
    spec = eigendecompose(mat.S, tol, mu=mat.mu, omega=mat.omega)
    weights = spec.mu[:, None] * spec.psi
    a = weights.T @ problem.g0
    b = weights.T @ problem.h0
    return WaveSolution(problem, mat, spec, a, b)


class ZeroExtension:
    """A solution on Omega viewed on the whole graph, zero off its closure."""

    def __init__(self, sol: WaveSolution):
        self.solution = sol
        self._known = set(sol.omega) | set(sol.boundary)

    def time_derivative(self, t: float, x: int, order: int = 0) -> float:
        if x not in self._known:
            return 0.0
        return self.solution.time_derivative(t, x, order)

    def evaluate(self, t: float, x: int) -> float:
        return self.time_derivative(t, x, 0)

    __call__ = evaluate


def _simpson(values: np.ndarray, h: float) -> np.ndarray:
    """Composite Simpson over the first axis (odd number of nodes)."""
    w = np.ones(values.shape[0])
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return h / 3.0 * np.tensordot(w, values, axes=(0, 0))


class ForcedWaveSolution:
    """Homogeneous solution plus a Duhamel term for a source f(t, x).

    Mode i gains int_0^t sin((t - s) w_i) / w_i * f_i(s) ds, where f_i is the
    mu-projection of f(s, .) on psi_i; the integral uses composite Simpson
    with nodes no farther apart than ``step``.
    """

    def __init__(self, base: WaveSolution, forcing: Callable[[float, int], float], step: float):
        if not step > 0:
            raise SpectralError(f"quadrature step must be positive, got {step}")
        self.base = base
        self.forcing = forcing
        self.step = float(step)
        self._weights = base.spectral.mu[:, None] * base.spectral.psi

    @property
    def omega(self) -> tuple[int, ...]:
        return self.base.omega

    def _f_modes(self, s: float) -> np.ndarray:
        fv = np.array([self.forcing(s, x) for x in self.omega], dtype=np.float64)
        return self._weights.T @ fv

    def _duhamel(self, t: float, order: int, step: float | None = None) -> np.ndarray:
        """Order-th t-derivative (0, 1 or 2) of the Duhamel mode amplitudes."""
        step = self.step if step is None else step
        om = self.base.frequencies
        n_modes = len(om)
        if t == 0:
            conv = np.zeros(n_modes)
        else:
            n = max(2, math.ceil(abs(t) / step))
            n += n % 2
            nodes = np.linspace(0.0, t, n + 1)
            fm = np.array([self._f_modes(s) for s in nodes])
            lag = (t - nodes)[:, None] * om[None, :]
            kernel = np.cos(lag) if order == 1 else np.sin(lag) / om
            conv = _simpson(kernel * fm, t / n)
        if order == 2:
            return self._f_modes(t) - om**2 * conv
        return conv

    def modes(self, t: float, order: int = 0, step: float | None = None) -> np.ndarray:
        if order not in (0, 1, 2):
            raise SpectralError("forced solutions support derivative orders 0, 1, 2")
        return self.base.modes(t, order) + self._duhamel(t, order, step)

    def slice(self, t: float, order: int = 0, step: float | None = None) -> np.ndarray:
        return self.base.spectral.psi @ self.modes(t, order, step)

    def time_derivative(self, t: float, x: int, order: int = 0) -> float:
        i = self.base._locate(x)
        if i is None:
            return 0.0
        return float(self.base.spectral.psi[i] @ self.modes(t, order))

    def evaluate(self, t: float, x: int) -> float:
        return self.time_derivative(t, x, 0)

    __call__ = evaluate

    def residual(self, t_samples: Iterable[float]) -> float:
        """max |d^2u/dt^2 - Delta u - f| over the samples and Omega."""
        worst = 0.0
        for t in t_samples:
            f = np.array([self.forcing(t, x) for x in self.omega])
            r = self.slice(t, 2) + self.base.matrix.L @ self.slice(t, 0) - f
            worst = max(worst, float(np.max(np.abs(r))))
        return worst

    def step_error(self, t_samples: Iterable[float]) -> float:
        """Richardson estimate of the quadrature error, |u_h - u_{h/2}| / 15."""
        worst = 0.0
        for t in t_samples:
            coarse = self.slice(t, 0)
            fine = self.slice(t, 0, self.step / 2)
            worst = max(worst, float(np.max(np.abs(coarse - fine))) / 15.0)
        return worst


def solve_wave_forced(
    problem: DirichletProblem,
    forcing: Callable[[float, int], float],
    step: float,
    tol: float = EIGEN_TOL,
) -> ForcedWaveSolution:
    """Dirichlet wave problem with a source term, via Duhamel's principle."""
    if not step > 0:
        raise SpectralError(f"quadrature step must be positive, got {step}")
    return ForcedWaveSolution(solve_wave(problem, tol), forcing, step)
