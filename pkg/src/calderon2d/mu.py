"""The oscillatory integral equation ``mu = I + g(v mu)`` and the
stationary-phase functionals built from its solution.

``solve_mu`` solves the discretized equation at fixed ``(z0, lambda)``:
densely when the grid is small enough, by fixed-point iteration otherwise
(requires the measured contraction below one), or as an exact Neumann
partial sum of a given order.  The measured contraction ``delta`` of the
map ``u -> g(v u)`` drives the method choice and the truncation bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
import scipy.linalg as sla

from .fields import MatrixField, constant_field, field_from_values, norm, phase_values, wirtinger
from .kernels import CauchyPlan, g_scalar_matrix, green_g_apply, make_cauchy_plan

__all__ = [
    "MuSolution",
    "HValue",
    "ContractionError",
    "measure_contraction",
    "solve_mu",
    "solve_mu_conjugate",
    "mu_truncated",
    "h_functional",
    "h_truncated",
    "w_functional",
    "w_bilinear",
    "psi_from_mu",
    "DIRECT_CELL_CAP",
]

DIRECT_CELL_CAP = 4096
_RESIDUAL_TOL = 1e-10
_MAX_FIXED_POINT_ITERS = 400
EXP_GUARD = 700.0


class ContractionError(RuntimeError):
    """The map u -> g(v u) is not a contraction at this (z0, lambda)."""


@dataclass(frozen=True)
class MuSolution:
    z0: complex
    lam: complex
    mu: MatrixField
    method: str
    residual: float
    delta_measured: float

    @property
    def n(self) -> int:
        return self.mu.n


@dataclass(frozen=True)
class HValue:
    """Value of a stationary-phase boundary functional (an n x n matrix)."""

    value: np.ndarray = dataclass_field(repr=False)
    z0: complex = 0.0
    lam: complex = 0.0
    order: int | None = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.value)):
            raise ValueError("functional value must be finite")


def _apply_gv(plan: CauchyPlan, v: MatrixField, u: MatrixField) -> MatrixField:
    """One application of u -> g(v u)."""
    return green_g_apply(plan, v.matmul(u))


def measure_contraction(plan: CauchyPlan, v: MatrixField, iters: int = 10) -> float:
    """Contraction estimate of ``u -> g(v u)`` in the discrete c1_zbar norm.

    Power iteration started from the identity field; returns the largest
    norm ratio observed over the iterations (the head of the Neumann series
    is exactly the orbit of the start vector, so this dominates the ratios
    entering the truncation bounds).
    """
    u = constant_field(v.domain, np.eye(v.n))
    scale = norm(u, "c1_zbar")
    best = 0.0
    for _ in range(iters):
        gu = _apply_gv(plan, v, u)
        new_scale = norm(gu, "c1_zbar")
        if new_scale == 0.0:
            return 0.0
        best = max(best, new_scale / scale)
        u = (1.0 / new_scale) * gu
        scale = 1.0
    return best


def _defect(plan: CauchyPlan, v: MatrixField, mu: MatrixField) -> float:
    ident = constant_field(v.domain, np.eye(v.n))
    return norm(mu - ident - _apply_gv(plan, v, mu), "sup")


def _solve_dense(plan: CauchyPlan, v: MatrixField) -> MatrixField:
    dom = v.domain
    n = v.n
    m_cells = dom.n_cells
    g_mat = g_scalar_matrix(plan)
    if n == 1:
        a_mat = np.eye(m_cells, dtype=np.complex128) - g_mat * v.values[None, :, 0, 0]
        mu_flat = sla.solve(a_mat, np.ones((m_cells, 1), dtype=np.complex128))
        return field_from_values(dom, mu_flat.reshape(m_cells, 1, 1))
    big = np.einsum("ij,jag->iajg", g_mat, v.values).reshape(m_cells * n, m_cells * n)
    a_mat = np.eye(m_cells * n, dtype=np.complex128) - big
    rhs = np.tile(np.eye(n, dtype=np.complex128), (m_cells, 1))
    sol = sla.solve(a_mat, rhs)
    return field_from_values(dom, sol.reshape(m_cells, n, n))


def solve_mu(
    v: MatrixField,
    z0: complex,
    lam: complex,
    method: str = "direct",
    neumann_order: int = 4,
    plan: CauchyPlan | None = None,
) -> MuSolution:
    """Solve the integral equation for ``mu`` at fixed ``(z0, lambda)``.

    method "direct": dense solve when the grid has at most
    ``DIRECT_CELL_CAP`` cells, otherwise fixed-point iteration to the same
    residual (needs measured contraction < 1).  method "neumann": exact
    partial sum of order ``neumann_order`` (needs delta <= 0.9).

    The defining-equation residual (sup norm of ``mu - I - g(v mu)``) is
    recorded on the returned solution.
    """
    if method not in ("direct", "neumann"):
        raise ValueError(f"unknown method {method!r}")
    if plan is None:
        plan = make_cauchy_plan(v.domain, z0, lam)
    delta = measure_contraction(plan, v)
    ident = constant_field(v.domain, np.eye(v.n))

    if method == "neumann":
        if delta > 0.9:
            raise ContractionError(f"measured contraction {delta:.3f} > 0.9")
        mu = _neumann_sum(plan, v, neumann_order)
        return MuSolution(
            z0=complex(z0), lam=complex(lam), mu=mu,
            method=f"neumann({neumann_order})",
            residual=_defect(plan, v, mu), delta_measured=delta,
        )

    if v.domain.n_cells <= DIRECT_CELL_CAP:
        mu = _solve_dense(plan, v)
        return MuSolution(
            z0=complex(z0), lam=complex(lam), mu=mu, method="direct",
            residual=_defect(plan, v, mu), delta_measured=delta,
        )

    if delta > 0.98:
        raise ContractionError(
            f"measured contraction {delta:.3f} too large for fixed-point iteration"
        )
    mu = ident
    for _ in range(_MAX_FIXED_POINT_ITERS):
        new_mu = ident + _apply_gv(plan, v, mu)
        change = norm(new_mu - mu, "sup")
        mu = new_mu
        if change <= _RESIDUAL_TOL:
            break
    return MuSolution(
        z0=complex(z0), lam=complex(lam), mu=mu, method="fixed_point",
        residual=_defect(plan, v, mu), delta_measured=delta,
    )


def _neumann_sum(plan: CauchyPlan, v: MatrixField, order: int) -> MatrixField:
    term = constant_field(v.domain, np.eye(v.n))
    acc = term
    for _ in range(order):
        term = _apply_gv(plan, v, term)
        acc = acc + term
    return acc


def mu_truncated(v: MatrixField, z0: complex, lam: complex, k: int) -> MuSolution:
    """Neumann partial sum of order k (k = 0 gives the identity field)."""
    if k < 0:
        raise ValueError("truncation order must be >= 0")
    return solve_mu(v, z0, lam, method="neumann", neumann_order=k)


def solve_mu_conjugate(
    v: MatrixField, z0: complex, lam: complex, method: str = "direct"
) -> MuSolution:
    """Solution of the integral equation with the conjugated kernel.

    Conjugating the equation shows it equals the conjugate of the ordinary
    solution for the conjugated potential, which is how it is computed.
    """
    sol = solve_mu(v.conj(), z0, lam, method=method)
    return MuSolution(
        z0=sol.z0, lam=sol.lam, mu=sol.mu.conj(),
        method=f"conjugate[{sol.method}]",
        residual=sol.residual, delta_measured=sol.delta_measured,
    )


def _weighted_phase_sum(domain, z0, lam, values: np.ndarray) -> np.ndarray:
    p = phase_values(z0, lam, domain.centers)
    return np.einsum("c,c,cij->ij", domain.weights, p, values)


def w_functional(w: MatrixField, z0: complex, lam: complex) -> HValue:
    """Plain stationary-phase integral of a field."""
    val = _weighted_phase_sum(w.domain, z0, lam, w.values)
    return HValue(value=val, z0=complex(z0), lam=complex(lam))


def h_functional(v: MatrixField, mu_solution: MuSolution) -> HValue:
    """Stationary-phase integral of ``v mu`` for a solved ``mu``."""
    vals = v.values @ mu_solution.mu.values
    val = _weighted_phase_sum(v.domain, mu_solution.z0, mu_solution.lam, vals)
    return HValue(value=val, z0=mu_solution.z0, lam=mu_solution.lam)


def h_truncated(v: MatrixField, z0: complex, lam: complex, k: int) -> HValue:
    """Same with the order-k Neumann partial sum; order 0 reduces to
    :func:`w_functional` of the potential itself."""
    if k == 0:
        out = w_functional(v, z0, lam)
        return HValue(value=out.value, z0=out.z0, lam=out.lam, order=0)
    sol = mu_truncated(v, z0, lam, k)
    vals = v.values @ sol.mu.values
    val = _weighted_phase_sum(v.domain, z0, lam, vals)
    return HValue(value=val, z0=complex(z0), lam=complex(lam), order=k)


def w_bilinear(u: MatrixField, v: MatrixField, z0: complex, lam: complex) -> HValue:
    """Stationary-phase integral of ``u * (g v)``."""
    plan = make_cauchy_plan(u.domain, z0, lam)
    gv = green_g_apply(plan, v)
    vals = u.values @ gv.values
    val = _weighted_phase_sum(u.domain, z0, lam, vals)
    return HValue(value=val, z0=complex(z0), lam=complex(lam))


def psi_from_mu(mu_solution: MuSolution) -> MatrixField:
    """Multiply by the holomorphic exponential ``exp(lam (z - z0)^2)``.

    The factor is not unit modulus; exponents with real part beyond the
    overflow guard (700) are rejected.
    """
    dom = mu_solution.mu.domain
    expo = mu_solution.lam * (dom.centers - mu_solution.z0) ** 2
    worst = expo.real.max()
    if worst > EXP_GUARD:
        raise OverflowError(
            f"exponent real part {worst:.1f} exceeds the overflow guard {EXP_GUARD:.0f}; "
            "reduce |lambda| or move z0"
        )
    vals = np.exp(expo)[:, None, None] * mu_solution.mu.values
    return field_from_values(dom, vals)
