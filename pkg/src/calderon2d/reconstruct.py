"""Boundary/interior pairing identities and pointwise reconstruction.

The central identity pairs two interior solutions against the difference of
DtN kernels on the boundary and against the difference of potentials in the
interior; the phase-conjugated variant with oscillatory solutions feeds the
reconstruction operator.  Data-side reconstruction here is zeroth order
(Born): both oscillatory factors in the boundary pairing are replaced by
the identity, which removes the boundary recovery of the full solutions and
leaves exactly the remainders bounded by the decay estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .fields import MatrixField, norm, phase_values
from .forward import DtnMap
from .mu import EXP_GUARD, HValue, solve_mu, solve_mu_conjugate, w_functional

__all__ = [
    "IdentityCheckReport",
    "ReconstructionReport",
    "BoundaryLayerResult",
    "alessandrini_rhs",
    "alessandrini_lhs",
    "reconstruct_pointwise",
    "reconstruct_from_dtn",
    "i_decomposition",
    "reconstruct_boundary_layer",
]

_MISMATCH_FLOOR = 1e-14


@dataclass(frozen=True)
class IdentityCheckReport:
    lhs: np.ndarray = dataclass_field(repr=False)
    rhs: np.ndarray = dataclass_field(repr=False)
    relative_mismatch: float = 0.0

    @staticmethod
    def from_sides(lhs: np.ndarray, rhs: np.ndarray) -> "IdentityCheckReport":
        scale = max(np.abs(lhs).max(), np.abs(rhs).max(), _MISMATCH_FLOOR)
        mism = float(np.abs(lhs - rhs).max() / scale)
        return IdentityCheckReport(lhs=lhs, rhs=rhs, relative_mismatch=mism)


@dataclass(frozen=True)
class ReconstructionReport:
    z0_points: np.ndarray = dataclass_field(repr=False)
    lambda_rule: str = ""
    reconstructed: np.ndarray = dataclass_field(repr=False, default=None)
    reference: np.ndarray | None = dataclass_field(repr=False, default=None)
    sup_error: float | None = None


@dataclass(frozen=True)
class BoundaryLayerResult:
    """Pointwise reconstruction plus the two-term error-bound structure.

    ``interior_term`` carries the ``layer_delta**-4 * log(3|lam|)/|lam|``
    shape scaled by the c2 norm; ``boundary_term`` carries
    ``log(3 + 1/layer_delta)`` scaled by the boundary sup of the potential.
    Coefficients in front of either term are fitted downstream, not here.
    """

    value: np.ndarray = dataclass_field(repr=False)
    z0: complex = 0.0
    lam: complex = 0.0
    layer_delta: float = 0.0
    interior_term: float = 0.0
    boundary_term: float = 0.0


def alessandrini_rhs(
    v1: MatrixField, v2: MatrixField, u1: MatrixField, u2: MatrixField
) -> np.ndarray:
    """Interior pairing: area quadrature of ``t(u2) (v2 - v1) u1``."""
    doms = {id(f.domain) for f in (v1, v2, u1, u2)}
    if len(doms) != 1:
        raise ValueError("all fields must share one domain")
    integrand = np.swapaxes(u2.values, 1, 2) @ (v2.values - v1.values) @ u1.values
    return np.einsum("c,cij->ij", v1.domain.weights, integrand)


def alessandrini_lhs(
    phi1: DtnMap, phi2: DtnMap, u1_trace: np.ndarray, u2_trace: np.ndarray
) -> np.ndarray:
    """Boundary pairing: double quadrature of ``t(u2)(x) dK(x,y) u1(y)``."""
    if phi1.kernel.shape != phi2.kernel.shape:
        raise ValueError("DtN maps live on different boundaries")
    m, n = phi1.m, phi1.n
    if u1_trace.shape != (m, n, n) or u2_trace.shape != (m, n, n):
        raise ValueError("traces must have shape (m, n, n) matching the boundary")
    dk = phi2.kernel - phi1.kernel
    w = phi1.weights
    return np.einsum("x,y,xji,xyjk,ykl->il", w, w, u2_trace, dk, u1_trace)


def reconstruct_pointwise(v: MatrixField, z0: complex, lam: complex) -> np.ndarray:
    """Scaled zeroth-order stationary-phase functional of the potential.

    Returns ``(2/pi) |lam|`` times the phase-weighted integral of ``v``; for
    potentials vanishing to first order at the boundary this converges to
    ``v(z0)`` as ``|lam|`` grows, at the logarithmic rate checked in the
    decay suite.
    """
    h0 = w_functional(v, z0, lam)
    return (2.0 / np.pi) * abs(lam) * h0.value


def reconstruct_from_dtn(
    phi_v: DtnMap, phi_ref: DtnMap, z0: complex, lam: complex
) -> np.ndarray:
    """Born reconstruction from boundary data against a known reference.

    Boundary double integral of
    ``exp(-conj(lam) (xbar-z0bar)^2) dK(x, y) exp(lam (y-z0)^2)`` scaled by
    ``(2/pi)|lam|``; the oscillatory-solution factors are replaced by the
    identity (zeroth order), and the two exponentials are combined into one
    exponent per node pair before exponentiating (overflow-safe form).
    """
    if phi_v.kernel.shape != phi_ref.kernel.shape:
        raise ValueError("DtN maps live on different boundaries")
    x = phi_v.positions
    expo = (
        lam * (x[None, :] - z0) ** 2
        - np.conj(lam * (x[:, None] - z0) ** 2)
    )
    worst = expo.real.max()
    if worst > EXP_GUARD:
        raise OverflowError(
            f"boundary exponent real part {worst:.1f} exceeds the guard {EXP_GUARD:.0f}"
        )
    pair_phase = np.exp(expo)
    dk = phi_v.kernel - phi_ref.kernel
    w = phi_v.weights
    val = np.einsum("x,y,xy,xyij->ij", w, w, pair_phase, dk)
    return (2.0 / np.pi) * abs(lam) * val


def i_decomposition(
    v1: MatrixField,
    v2: MatrixField,
    z0: complex,
    lam: complex,
    method: str = "direct",
    _mu1=None,
    _mubar2=None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split the phase-weighted interior pairing into its four remainders.

    The oscillatory factors are the solution for the first potential at
    ``lam`` and the conjugated-kernel solution for the transposed second
    potential at ``-lam``.  The first term is the plain phase integral of
    the difference; the other three carry one or both ``mu - I`` factors.
    Their sum equals the full phase-weighted pairing by construction.
    """
    dom = v1.domain
    mu1 = _mu1 if _mu1 is not None else solve_mu(v1, z0, lam, method=method)
    mubar2 = (
        _mubar2
        if _mubar2 is not None
        else solve_mu_conjugate(v2.transpose(), z0, -lam, method=method)
    )
    e = phase_values(z0, lam, dom.centers)
    dv = v2.values - v1.values
    ident = np.eye(v1.n)
    m1 = mu1.mu.values - ident
    m2t = np.swapaxes(mubar2.mu.values - ident, 1, 2)
    w = dom.weights
    i1 = np.einsum("c,c,cij->ij", w, e, dv)
    i2 = np.einsum("c,c,cij->ij", w, e, m2t @ dv @ m1)
    i3 = np.einsum("c,c,cij->ij", w, e, m2t @ dv)
    i4 = np.einsum("c,c,cij->ij", w, e, dv @ m1)
    return i1, i2, i3, i4


def reconstruct_boundary_layer(
    v: MatrixField, z0: complex, lam: complex, layer_delta: float
) -> BoundaryLayerResult:
    """Pointwise reconstruction without boundary conditions on ``v``.

    Valid for points at distance at least ``layer_delta`` from the boundary;
    the result records the two error-term shapes (interior, boundary) whose
    fitted coefficients replace the constants of the continuum bound.
    """
    if not 0.0 < layer_delta < 1.0:
        raise ValueError(f"layer_delta must lie in (0, 1), got {layer_delta}")
    dom = v.domain
    dist = dom.radius - abs(z0)
    if dist < layer_delta:
        raise ValueError(
            f"z0 at distance {dist:.3f} from the boundary lies inside the layer {layer_delta:.3f}"
        )
    value = reconstruct_pointwise(v, z0, lam)
    la = max(abs(lam), 1.0)
    rim = np.abs(v.values.reshape(dom.n_r, dom.n_theta, v.n, v.n)[-1]).max()
    interior = layer_delta ** -4.0 * np.log(3.0 * la) / la * norm(v, "c2")
    boundary = np.log(3.0 + 1.0 / layer_delta) * float(rim)
    return BoundaryLayerResult(
        value=value,
        z0=complex(z0),
        lam=complex(lam),
        layer_delta=float(layer_delta),
        interior_term=float(interior),
        boundary_term=float(boundary),
    )
