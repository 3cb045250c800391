"""The four benchmark linear Hamiltonian systems with an index-1 saddle.

Two families on R^4 and R^6: a separable ("decoupled") quadratic Hamiltonian
with one saddle pair and one or two bath oscillators, and its image under a
linear symplectic coupling transform ("coupled").  Coordinate layout is
(q1,..,qN, p1,..,pN) for decoupled systems and (x, y[, z], px, py[, pz]) for
coupled ones, so the coupling matrix acts by a plain matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from .errors import ParameterDomainError, ShapeError, SymplecticViolationError

ModelKind = Literal["decoupled2", "coupled2", "decoupled3", "coupled3"]

MODEL_KINDS: tuple[str, ...] = ("decoupled2", "coupled2", "decoupled3", "coupled3")

SYMPLECTIC_RESIDUAL_TOL = 1e-12

Reactivity = Literal["reactive", "nonreactive"]


def canonical_j(n_dof: int) -> np.ndarray:
    """Canonical 2n x 2n block matrix [[0, I], [-I, 0]]."""
    eye = np.eye(n_dof)
    zero = np.zeros((n_dof, n_dof))
    return np.block([[zero, eye], [-eye, zero]])


def check_symplectic(entries: np.ndarray) -> float:
    """Max-norm residual of C J C^T - J; zero iff C is symplectic.

    Exact 0.0 for integer matrices since all products stay in exact
    float range.  Raises ShapeError for odd or non-square input.
    """
    c = np.asarray(entries, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {c.shape}")
    if c.shape[0] % 2 != 0:
        raise ShapeError(f"matrix dimension must be even, got {c.shape[0]}")
    j = canonical_j(c.shape[0] // 2)
    return float(np.max(np.abs(c @ j @ c.T - j)))


@dataclass(frozen=True)
class SymplecticMatrix:
    """A verified linear symplectic transform C with C J C^T = J."""

    entries: np.ndarray

    def __post_init__(self):
        c = np.array(self.entries, dtype=float)
        residual = check_symplectic(c)
        if residual > SYMPLECTIC_RESIDUAL_TOL:
            raise SymplecticViolationError(residual)
        c.setflags(write=False)
        object.__setattr__(self, "entries", c)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_dof(self) -> int:
        return self.dim // 2

    @cached_property
    def residual(self) -> float:
        return check_symplectic(self.entries)

    @cached_property
    def is_anti_involutive(self) -> bool:
        """Whether C^T = -C holds, i.e. the inverse is literally -C."""
        return bool(np.all(self.entries.T == -self.entries))

    @cached_property
    def inverse(self) -> np.ndarray:
        # For a symplectic C the inverse is -J C^T J, exact in integer
        # arithmetic; fall back to -C only when C is anti-involutive.
        if self.is_anti_involutive:
            inv = -self.entries
        else:
            j = canonical_j(self.n_dof)
            inv = -j @ self.entries.T @ j
        inv = np.array(inv)
        inv.setflags(write=False)
        return inv


# Coupling transforms used throughout; the first of each size is the one the
# coupled benchmark systems are built from, the rest complete the verified set.
COUPLING_2DOF = SymplecticMatrix(np.array([
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [-1, 0, 1, 1],
    [0, -1, 1, 1],
], dtype=float))

COUPLING_3DOF = SymplecticMatrix(np.array([
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 1],
    [-1, 0, 0, 1, 1, 1],
    [0, -1, 0, 1, 1, 1],
    [0, 0, -1, 1, 1, 1],
], dtype=float))

VERIFIED_TRANSFORMS: dict[str, SymplecticMatrix] = {
    "2dof-a": COUPLING_2DOF,
    "2dof-b": SymplecticMatrix(np.array([
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [-1, 0, 1, 0],
        [0, -1, 0, 1],
    ], dtype=float)),
    "2dof-c": SymplecticMatrix(np.array([
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [-1, 0, 0, 1],
        [0, -1, 1, 0],
    ], dtype=float)),
    "3dof-a": COUPLING_3DOF,
    "3dof-b": SymplecticMatrix(np.array([
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 1],
        [-1, 0, 0, 1, 0, 0],
        [0, -1, 0, 0, 1, 0],
        [0, 0, -1, 0, 0, 1],
    ], dtype=float)),
    "3dof-c": SymplecticMatrix(np.array([
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 1],
        [-1, 0, 0, 0, 1, 1],
        [0, -1, 0, 1, 0, 1],
        [0, 0, -1, 1, 1, 0],
    ], dtype=float)),
}


@dataclass(frozen=True)
class ModelParams:
    """Saddle rate and bath frequencies, all strictly positive."""

    lam: float = 1.0
    omega2: float = 1.0
    omega3: float | None = None

    def validate(self, n_dof: int) -> None:
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ParameterDomainError(f"lam must be > 0, got {self.lam}")
        if not (np.isfinite(self.omega2) and self.omega2 > 0):
            raise ParameterDomainError(f"omega2 must be > 0, got {self.omega2}")
        if n_dof == 3:
            if self.omega3 is None or not (np.isfinite(self.omega3) and self.omega3 > 0):
                raise ParameterDomainError(f"omega3 must be > 0 for 3-DoF models, got {self.omega3}")
        elif self.omega3 is not None:
            raise ParameterDomainError("omega3 is only meaningful for 3-DoF models")

    @property
    def frequencies(self) -> tuple[float, ...]:
        """Bath frequencies in DoF order (omega2[, omega3])."""
        if self.omega3 is None:
            return (self.omega2,)
        return (self.omega2, self.omega3)


def as_phase_point(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise ShapeError(f"expected a phase point of shape ({dim},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ParameterDomainError("phase point entries must be finite")
    return x


@dataclass(frozen=True)
class SystemModel:
    """One of the four benchmark systems, with all derived operators cached.

    `grad_form` is the symmetric matrix G with H(x) = x.G.x / 2 and
    `field_matrix` the constant A = J G, so the vector field is A x and the
    Jacobian is A everywhere.  `to_normal` maps native coordinates to the
    decoupled (normal-mode) frame; it is the identity for decoupled kinds.
    """

    kind: str
    params: ModelParams
    transform: SymplecticMatrix | None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ParameterDomainError(f"unknown model kind {self.kind!r}")
        self.params.validate(self.n_dof)
        if self.is_coupled and self.transform is None:
            raise ParameterDomainError(f"kind {self.kind!r} requires a symplectic transform")
        if not self.is_coupled and self.transform is not None:
            raise ParameterDomainError(f"kind {self.kind!r} does not take a transform")
        if self.transform is not None and self.transform.dim != self.dim:
            raise ShapeError(
                f"transform is {self.transform.dim}x{self.transform.dim}, "
                f"model needs {self.dim}x{self.dim}"
            )

    @property
    def n_dof(self) -> int:
        return 3 if self.kind.endswith("3") else 2

    @property
    def dim(self) -> int:
        return 2 * self.n_dof

    @property
    def is_coupled(self) -> bool:
        return self.kind.startswith("coupled")

    @cached_property
    def to_normal(self) -> np.ndarray:
        if self.transform is None:
            return np.eye(self.dim)
        return np.asarray(self.transform.entries)

    @cached_property
    def from_normal(self) -> np.ndarray:
        if self.transform is None:
            return np.eye(self.dim)
        return np.asarray(self.transform.inverse)

    @cached_property
    def grad_form(self) -> np.ndarray:
        n = self.n_dof
        p = self.params
        diag = np.empty(2 * n)
        diag[0], diag[n] = -p.lam, p.lam
        for i, om in enumerate(p.frequencies):
            diag[1 + i] = diag[n + 1 + i] = om
        g = np.diag(diag)
        if self.is_coupled:
            c = self.to_normal
            g = c.T @ g @ c
        return g

    @cached_property
    def field_matrix(self) -> np.ndarray:
        return canonical_j(self.n_dof) @ self.grad_form

    def energy(self, x) -> float:
        x = as_phase_point(x, self.dim)
        return 0.5 * float(x @ self.grad_form @ x)

    def vector_field(self, x) -> np.ndarray:
        x = as_phase_point(x, self.dim)
        return self.field_matrix @ x

    def jacobian(self) -> np.ndarray:
        return self.field_matrix.copy()

    @cached_property
    def decoupled_twin(self) -> "SystemModel":
        """The same system expressed in decoupled coordinates."""
        if not self.is_coupled:
            return self
        return SystemModel("decoupled" + self.kind[-1], self.params, None)

    def hyperbolic_constants(self, x) -> tuple[float, float]:
        """(A, B) = (q1+p1, q1-p1) of the decoupled-frame image of x."""
        eta = self.to_normal @ as_phase_point(x, self.dim)
        return float(eta[0] + eta[self.n_dof]), float(eta[0] - eta[self.n_dof])

    def analytic_flow(self, x0, t):
        """Closed-form flow map; `t` may be a scalar or an array.

        Returns an array of shape t.shape + (dim,).  Coupled systems are
        flowed in the decoupled frame and mapped back through the exact
        symplectic inverse, so energy is conserved to roundoff.
        """
        x0 = as_phase_point(x0, self.dim)
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)

        n = self.n_dof
        lam = self.params.lam
        eta0 = self.to_normal @ x0
        a = eta0[0] + eta0[n]
        b = eta0[0] - eta0[n]

        out = np.empty(t_arr.shape + (self.dim,))
        ep = np.exp(lam * t_arr)
        em = np.exp(-lam * t_arr)
        out[..., 0] = 0.5 * (a * ep + b * em)
        out[..., n] = 0.5 * (a * ep - b * em)
        for i, om in enumerate(self.params.frequencies):
            c, s = np.cos(om * t_arr), np.sin(om * t_arr)
            q0, p0 = eta0[1 + i], eta0[n + 1 + i]
            out[..., 1 + i] = q0 * c + p0 * s
            out[..., n + 1 + i] = p0 * c - q0 * s
        if self.is_coupled:
            out = out @ self.from_normal.T
        return out[0] if scalar else out

    def reaction_coordinate(self, x) -> float:
        """Decoupled-frame q1; its sign change defines a reaction."""
        return float((self.to_normal @ as_phase_point(x, self.dim))[0])

    def classify_reactive(self, x0, tau: float) -> Reactivity:
        """Whether the reaction coordinate changes sign on [0, tau].

        Dense sampling (step 1e-3 tau) of the closed-form saddle-pair
        solution; classification needs only a sign change, no root polish.
        """
        if not (np.isfinite(tau) and tau > 0):
            raise ParameterDomainError(f"tau must be > 0, got {tau}")
        x0 = as_phase_point(x0, self.dim)
        eta0 = self.to_normal @ x0
        n = self.n_dof
        a = eta0[0] + eta0[n]
        b = eta0[0] - eta0[n]
        t = np.linspace(0.0, tau, 1001)
        q1 = 0.5 * (a * np.exp(self.params.lam * t) + b * np.exp(-self.params.lam * t))
        if q1.min() < 0.0 < q1.max():
            return "reactive"
        return "nonreactive"


def build_system(kind: str, params: ModelParams | None = None,
                 transform: SymplecticMatrix | None = None) -> SystemModel:
    """Construct one of the four benchmark systems.

    Coupled kinds default to the standard coupling transform of matching
    size; decoupled kinds reject a transform.  Parameters default to
    lam = omega2 (= omega3) = 1.
    """
    if kind not in MODEL_KINDS:
        raise ParameterDomainError(f"unknown model kind {kind!r}")
    n_dof = 3 if kind.endswith("3") else 2
    if params is None:
        params = ModelParams(1.0, 1.0, 1.0 if n_dof == 3 else None)
    if kind.startswith("coupled") and transform is None:
        transform = COUPLING_3DOF if n_dof == 3 else COUPLING_2DOF
    return SystemModel(kind, params, transform)


def jacobian_spectrum(system: SystemModel) -> np.ndarray:
    """Eigenvalues of the constant Jacobian, sorted by (real, imag)."""
    w = np.linalg.eigvals(system.field_matrix)
    return w[np.lexsort((w.imag, w.real))]
