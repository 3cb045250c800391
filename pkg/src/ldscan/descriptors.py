"""Lagrangian descriptors: trajectory integrals of sum_i |xdot_i|^p.

Two independent evaluation routes: "augmented-integration" carries the
integrand along a fixed-step RK4 pass, while "analytic-quadrature"
integrates the closed-form flow with Gauss panels split at the zero
crossings of each velocity component (Gauss-Jacobi end panels absorb the
|.|^p kink).  Closed-form growth laws for the saddle pair and bath modes
live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_jacobi, roots_legendre

from . import _kernels
from .errors import ParameterDomainError, TrajectoryOverflowError
from .systems import SystemModel, as_phase_point

METHOD_AUGMENTED = "augmented-integration"
METHOD_QUADRATURE = "analytic-quadrature"

_GAUSS_ORDER = 16


@dataclass(frozen=True)
class LDParams:
    """Exponent, half-window, and evaluation settings for one LD run."""

    p: float = 0.5
    tau: float = 10.0
    t0: float = 0.0
    method: str = METHOD_AUGMENTED
    dt: float = 1e-2

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ParameterDomainError(f"p must be in (0, 1], got {self.p}")
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise ParameterDomainError(f"tau must be > 0, got {self.tau}")
        if not (0.0 < self.dt <= self.tau):
            raise ParameterDomainError(f"dt must satisfy 0 < dt <= tau, got {self.dt}")
        if self.method not in (METHOD_AUGMENTED, METHOD_QUADRATURE):
            raise ParameterDomainError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class LDResult:
    """Forward/backward/total LD value plus per-component contributions.

    `hyperbolic` and `elliptic` are the saddle-pair and bath shares in
    decoupled coordinates; for coupled systems they refer to the
    transformed initial condition and sum to the decoupled-frame total,
    not to the native-coordinate one.
    """

    forward: float
    backward: float
    total: float
    per_dof: np.ndarray
    hyperbolic: float | None = None
    elliptic: float | None = None


def integrate_augmented(system: SystemModel, x0, direction: str, params: LDParams):
    """One window of augmented RK4 integration.

    Returns (endpoint, per_dof_accumulators).  Raises
    TrajectoryOverflowError when the state passes 1e150 in magnitude.
    """
    x0 = as_phase_point(x0, system.dim)
    ends, accum, oflow = _kernels.run_ld_batch(
        system.field_matrix, x0[None, :], params.tau, params.dt, params.p, direction)
    if oflow[0] != 0:
        n_steps = max(1, int(round(params.tau / params.dt)))
        t_blow = oflow[0] * params.tau / n_steps
        raise TrajectoryOverflowError(t_blow if direction == "forward" else -t_blow)
    return ends[0], accum[0]


def ld_batch(system: SystemModel, x0s: np.ndarray, params: LDParams):
    """Vectorised augmented integration over a batch of initial states.

    Returns (forward_per_dof, backward_per_dof, oflow) arrays; rows with a
    nonzero oflow entry blew up and hold partial accumulations.
    """
    x0s = np.asarray(x0s, dtype=float)
    _, fwd, of_f = _kernels.run_ld_batch(
        system.field_matrix, x0s, params.tau, params.dt, params.p, "forward")
    _, bwd, of_b = _kernels.run_ld_batch(
        system.field_matrix, x0s, params.tau, params.dt, params.p, "backward")
    return fwd, bwd, np.maximum(of_f, of_b)


@lru_cache(maxsize=32)
def _jacobi_rule(p: float):
    # weight (1+x)^p on [-1, 1]
    return roots_jacobi(_GAUSS_ORDER, 0.0, p)


@lru_cache(maxsize=4)
def _legendre_rule(order: int):
    return roots_legendre(order)


def _find_crossings(f, a: float, b: float, scan_step: float) -> list[float]:
    """Zero crossings of scalar f on [a, b] by scan + bisection to ~1e-14."""
    n = max(8, int(np.ceil((b - a) / scan_step)))
    ts = np.linspace(a, b, n + 1)
    vals = f(ts)
    out = []
    for i in range(n):
        va, vb = vals[i], vals[i + 1]
        if va == 0.0:
            if ts[i] != a:
                out.append(ts[i])
            continue
        if va * vb < 0.0:
            lo, hi = ts[i], ts[i + 1]
            flo = va
            while hi - lo > 1e-14:
                mid = 0.5 * (lo + hi)
                fm = f(np.array([mid]))[0]
                if fm == 0.0:
                    lo = hi = mid
                    break
                if flo * fm < 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            out.append(0.5 * (lo + hi))
    if vals[-1] == 0.0 and ts[-1] != b:
        out.append(ts[-1])
    return out


def _abs_power_integral(f, a: float, b: float, p: float,
                        crossings: list[float], panel_max: float) -> float:
    """Integral of |f|^p over [a, b] with f vanishing only at `crossings`.

    Pieces between crossings use Gauss-Legendre panels; panels that touch
    a crossing switch to a Gauss-Jacobi rule with weight (t - c)^p so the
    fractional-power kink is integrated at full order.
    """
    pts = [a] + [c for c in crossings if a < c < b] + [b]
    xg, wg = _legendre_rule(_GAUSS_ORDER)
    xj, wj = _jacobi_rule(p)
    total = 0.0
    for left, right in zip(pts[:-1], pts[1:]):
        length = right - left
        if length <= 1e-13:
            continue
        n_panels = max(1, int(np.ceil(length / panel_max)))
        edges = np.linspace(left, right, n_panels + 1)
        sing_left = left in pts[1:-1] or (left == a and a in crossings)
        sing_right = right in pts[1:-1] or (right == b and b in crossings)
        for k in range(n_panels):
            lo, hi = edges[k], edges[k + 1]
            h2 = 0.5 * (hi - lo)
            if k == 0 and sing_left:
                ts = lo + h2 * (xj + 1.0)
                u = np.abs(f(ts)) ** p / (ts - lo) ** p
                total += h2 ** (p + 1.0) * float(wj @ u)
            elif k == n_panels - 1 and sing_right:
                ts = hi - h2 * (xj + 1.0)
                u = np.abs(f(ts)) ** p / (hi - ts) ** p
                total += h2 ** (p + 1.0) * float(wj @ u)
            else:
                ts = lo + h2 * (xg + 1.0)
                total += h2 * float(wg @ np.abs(f(ts)) ** p)
    return total


def _quadrature_per_dof(system: SystemModel, x0, params: LDParams):
    """(forward, backward) per-component integrals along the analytic flow."""
    x0 = as_phase_point(x0, system.dim)
    a_mat = system.field_matrix
    lam = system.params.lam
    rate = max(lam, max(system.params.frequencies))
    scan = np.pi / (20.0 * rate)
    panel_max = 0.5 / rate

    def velocities(ts):
        states = system.analytic_flow(x0, ts)
        if np.max(np.abs(states)) > _kernels.OVERFLOW_BOUND:
            raise TrajectoryOverflowError(ts[int(np.argmax(np.max(np.abs(states), axis=-1)))])
        return states @ a_mat.T

    out = []
    for lo, hi in ((0.0, params.tau), (-params.tau, 0.0)):
        per_dof = np.zeros(system.dim)
        probe = velocities(np.linspace(lo, hi, 64))
        scale = np.max(np.abs(probe))
        for i in range(system.dim):
            fi = lambda ts, i=i: velocities(ts)[..., i]
            if np.max(np.abs(probe[:, i])) <= 1e-15 * max(scale, 1.0):
                continue
            crossings = _find_crossings(fi, lo, hi, scan)
            per_dof[i] = _abs_power_integral(fi, lo, hi, params.p, crossings, panel_max)
        out.append(per_dof)
    return out[0], out[1]


def _normal_frame_split(system: SystemModel, x0, params: LDParams):
    """(m_h, m_e) computed in decoupled coordinates."""
    if system.is_coupled:
        twin = system.decoupled_twin
        eta0 = system.to_normal @ as_phase_point(x0, system.dim)
        pd = _per_dof_total(twin, eta0, params)
    else:
        pd = _per_dof_total(system, x0, params)
    n = system.n_dof
    m_h = float(pd[0] + pd[n])
    m_e = float(np.sum(pd) - m_h)
    return m_h, m_e


def _per_dof_total(system: SystemModel, x0, params: LDParams) -> np.ndarray:
    if params.method == METHOD_QUADRATURE:
        fwd, bwd = _quadrature_per_dof(system, x0, params)
    else:
        _, fwd = integrate_augmented(system, x0, "forward", params)
        _, bwd = integrate_augmented(system, x0, "backward", params)
    return fwd + bwd


def ld_point(system: SystemModel, x0, params: LDParams | None = None) -> LDResult:
    """Full LD evaluation at one phase point.

    The per-DoF split is reported in the system's native coordinates; the
    hyperbolic/elliptic split always refers to the decoupled frame.
    """
    params = params or LDParams()
    x0 = as_phase_point(x0, system.dim)
    if params.method == METHOD_QUADRATURE:
        fwd, bwd = _quadrature_per_dof(system, x0, params)
    else:
        _, fwd = integrate_augmented(system, x0, "forward", params)
        _, bwd = integrate_augmented(system, x0, "backward", params)
    per_dof = fwd + bwd
    forward = float(np.sum(fwd))
    backward = float(np.sum(bwd))
    if system.is_coupled:
        m_h, m_e = _normal_frame_split(system, x0, params)
    else:
        n = system.n_dof
        m_h = float(per_dof[0] + per_dof[n])
        m_e = float(np.sum(per_dof) - m_h)
    return LDResult(forward=forward, backward=backward, total=forward + backward,
                    per_dof=per_dof, hyperbolic=m_h, elliptic=m_e)


def split_components(system: SystemModel, x0, params: LDParams | None = None):
    """(m_h, m_e): saddle-pair and bath contributions in decoupled coordinates.

    Their sum equals the decoupled-coordinate total LD; coupled inputs are
    mapped through the coupling transform first.
    """
    params = params or LDParams()
    return _normal_frame_split(system, x0, params)


def hyperbolic_asymptote(lam: float, p: float, a: float, b: float, tau: float) -> float:
    """Large-tau growth law of the saddle-pair LD share.

    lam^(p-1) / (p 2^(p-1)) * (|A|^p + |B|^p) * e^(p lam tau).
    """
    if lam <= 0:
        raise ParameterDomainError(f"lam must be > 0, got {lam}")
    if not (0.0 < p <= 1.0):
        raise ParameterDomainError(f"p must be in (0, 1], got {p}")
    if tau <= 0:
        raise ParameterDomainError(f"tau must be > 0, got {tau}")
    return (lam ** (p - 1.0) / (p * 2.0 ** (p - 1.0))
            * (abs(a) ** p + abs(b) ** p) * np.exp(p * lam * tau))


def beta_function(a: float, b: float) -> float:
    """Euler Beta via log-Gamma differences; avoids overflow and cancellation."""
    return float(np.exp(gammaln(a) + gammaln(b) - gammaln(a + b)))


def elliptic_average_limit(omega: float, h_mode: float, p: float) -> float:
    """Limit of the time-averaged bath-mode LD: (2/pi) (omega R)^p B((p+1)/2, 1/2).

    R = sqrt(2 h_mode / omega) is the radius of the bath-mode circle.
    """
    if omega <= 0:
        raise ParameterDomainError(f"omega must be > 0, got {omega}")
    if h_mode < 0:
        raise ParameterDomainError(f"h_mode must be >= 0, got {h_mode}")
    if not (0.0 < p <= 1.0):
        raise ParameterDomainError(f"p must be in (0, 1], got {p}")
    if h_mode == 0.0:
        return 0.0
    radius = np.sqrt(2.0 * h_mode / omega)
    return (2.0 / np.pi) * (omega * radius) ** p * beta_function((p + 1.0) / 2.0, 0.5)


def elliptic_arclength(omega: float, radius: float, tau: float) -> float:
    """Phase-space arclength of a bath-mode circle over [-tau, tau]: 2 tau omega R."""
    if omega <= 0:
        raise ParameterDomainError(f"omega must be > 0, got {omega}")
    if radius < 0 or tau < 0:
        raise ParameterDomainError("radius and tau must be >= 0")
    return 2.0 * tau * omega * radius
