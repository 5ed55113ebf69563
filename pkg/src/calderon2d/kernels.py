"""Phase-weighted Cauchy transforms and the composed Green-type operator.

The two building blocks act on matrix fields entrywise:

* ``cauchy_tbar``: (1/pi) * integral of phase(zeta) * u(zeta) / (zbar - zetabar)
* ``cauchy_t``   : (1/pi) * integral of inverse phase * u(zeta) / (z - zeta)

with ``phase = exp(lam*(zeta-z0)^2 - conj(lam)*(zetabar-z0bar)^2)``.  Their
composition ``green_g_apply = 1/4 * T(Tbar(u))`` realizes the quadrature of
the oscillatory Green-type kernel on the same grid, term for term.

Quadrature: midpoint sum over cells with the self-cell excluded (the kernel
is odd over a symmetric neighborhood, so dropping it costs one order locally
and is absorbed by the advertised tolerances).

Two evaluation paths are available and agree to rounding:

* direct summation (compiled extension if built, blocked NumPy otherwise),
  which also supports restricted source/target index sets;
* an FFT fast path exploiting the angular convolution structure of
  ``1/(z - zeta)`` on the polar grid (full-grid targets only; the radial
  pair table costs ``n_r**2 * n_theta`` complex entries and is cached
  per grid shape while it fits the memory budget).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .fields import MatrixField, field_from_values, phase_values
from .grid import DomainGrid

try:  # compiled hot loop; pure-NumPy fallback keeps everything working
    from . import _kernels as _direct_impl

    HAVE_COMPILED_KERNELS = True
except ImportError:  # pragma: no cover - depends on build environment
    from . import _kernels_py as _direct_impl

    HAVE_COMPILED_KERNELS = False

from . import _kernels_py

__all__ = [
    "CauchyPlan",
    "make_cauchy_plan",
    "cauchy_tbar",
    "cauchy_t",
    "green_g_apply",
    "dbar_of_g",
    "cauchy_apply_values",
    "green_g_apply_indexed",
    "g_scalar_matrix",
    "HAVE_COMPILED_KERNELS",
    "direct_backend_name",
]

FFT_TABLE_BUDGET_BYTES = 160 * 2**20
_FFT_TABLE_CACHE: dict[tuple, np.ndarray] = {}
_FFT_CACHE_SLOTS = 3


def direct_backend_name() -> str:
    return "compiled" if HAVE_COMPILED_KERNELS else "numpy"


@dataclass(frozen=True)
class CauchyPlan:
    """Cached phases and method choice for transforms at one ``(z0, lam)``.

    ``p_plus`` is the unit-modulus phase at the cell centers and ``p_minus``
    its reciprocal (= conjugate).  Plans are immutable and cheap; the FFT
    table is shared per grid shape, not per plan.
    """

    domain: DomainGrid
    z0: complex
    lam: complex
    method: str
    p_plus: np.ndarray = dataclass_field(repr=False)
    p_minus: np.ndarray = dataclass_field(repr=False)


def make_cauchy_plan(
    domain: DomainGrid, z0: complex, lam: complex, method: str = "auto"
) -> CauchyPlan:
    """Build a transform plan; ``method`` is one of auto, direct, fft."""
    if method not in ("auto", "direct", "fft"):
        raise ValueError(f"unknown method {method!r}")
    p_plus = phase_values(z0, lam, domain.centers)
    p_plus.flags.writeable = False
    p_minus = np.conj(p_plus)
    p_minus.flags.writeable = False
    return CauchyPlan(
        domain=domain,
        z0=complex(z0),
        lam=complex(lam),
        method=method,
        p_plus=p_plus,
        p_minus=p_minus,
    )


def _fft_table_bytes(domain: DomainGrid) -> int:
    return domain.n_r * domain.n_r * domain.n_theta * 16


def _fft_table(domain: DomainGrid) -> np.ndarray:
    """Angular-spectrum table K[a, c, k] for the kernel 1/(z - zeta).

    ``K[a, c, k] = sum_m exp(+2i pi k m / N) / (r_a - r_c e^{i theta_m})``
    with the self-cell entry (a == c, m == 0) removed.
    """
    key = (domain.n_r, domain.n_theta, round(domain.radius, 12))
    table = _FFT_TABLE_CACHE.get(key)
    if table is not None:
        return table
    if _fft_table_bytes(domain) > 1536 * 2**20:
        raise MemoryError(
            f"FFT table for a {domain.n_r} x {domain.n_theta} grid would exceed 1.5 GiB; "
            "use the direct method"
        )
    r = domain.radii
    theta = domain.thetas
    denom = r[:, None, None] - r[None, :, None] * np.exp(1j * theta)[None, None, :]
    idx = np.arange(domain.n_r)
    denom[idx, idx, 0] = 1.0
    kappa = 1.0 / denom
    kappa[idx, idx, 0] = 0.0
    table = domain.n_theta * np.fft.ifft(kappa, axis=2)
    while len(_FFT_TABLE_CACHE) >= _FFT_CACHE_SLOTS:
        _FFT_TABLE_CACHE.pop(next(iter(_FFT_TABLE_CACHE)))
    _FFT_TABLE_CACHE[key] = table
    return table


def _fft_raw_apply(domain: DomainGrid, q_full: np.ndarray) -> np.ndarray:
    """Full-grid sum of q[s, :] / (z_t - zeta_s) via angular FFTs."""
    n_r, n_t = domain.n_r, domain.n_theta
    n_c = q_full.shape[1]
    table = _fft_table(domain)
    x = np.fft.fft(q_full.reshape(n_r, n_t, n_c), axis=1)
    # batched over the angular frequency axis: (n_t, n_r, n_r) @ (n_t, n_r, n_c)
    y = np.matmul(table.transpose(2, 0, 1), x.transpose(1, 0, 2))
    out = np.fft.ifft(y.transpose(1, 0, 2), axis=1)
    out *= np.exp(-1j * domain.thetas)[None, :, None]
    return out.reshape(n_r * n_t, n_c)


def _direct_raw_apply(targets: np.ndarray, sources: np.ndarray, q: np.ndarray) -> np.ndarray:
    return _direct_impl.cauchy_apply(
        np.ascontiguousarray(targets, dtype=np.complex128),
        np.ascontiguousarray(sources, dtype=np.complex128),
        np.ascontiguousarray(q, dtype=np.complex128),
    )


def cauchy_apply_values(
    plan: CauchyPlan,
    u_flat: np.ndarray,
    kind: str,
    source_idx: np.ndarray | None = None,
    target_idx: np.ndarray | None = None,
    target_points: np.ndarray | None = None,
    method: str | None = None,
) -> np.ndarray:
    """Low-level transform on flat channel values.

    Parameters
    ----------
    u_flat : (S, C) complex
        Field values at the source cells (full grid order, or the cells
        selected by ``source_idx``).
    kind : "t" or "tbar"
        Kernel ``1/(z - zeta)`` with the inverse phase, or
        ``1/(zbar - zetabar)`` with the forward phase.
    source_idx, target_idx : int arrays, optional
        Restrict quadrature sources / evaluation cells.
    target_points : complex array, optional
        Evaluate at arbitrary points instead of grid cells (direct path
        only; no self-exclusion applies unless points coincide exactly).

    Returns the transform values, shape (targets, C).
    """
    if kind not in ("t", "tbar"):
        raise ValueError(f"kind must be 't' or 'tbar', got {kind!r}")
    if u_flat.ndim != 2:
        raise ValueError("u_flat must be 2-D (sources, channels)")
    dom = plan.domain
    method = method or plan.method
    phase_arr = plan.p_minus if kind == "t" else plan.p_plus
    wp = dom.weights * phase_arr
    if source_idx is not None:
        if u_flat.shape[0] != len(source_idx):
            raise ValueError("u_flat rows must match source_idx")
        q = wp[source_idx, None] * u_flat
    else:
        if u_flat.shape[0] != dom.n_cells:
            raise ValueError("u_flat rows must match the cell count")
        q = wp[:, None] * u_flat

    use_fft = False
    if target_points is None:
        if method == "fft":
            use_fft = True
        elif method == "auto":
            use_fft = _fft_table_bytes(dom) <= FFT_TABLE_BUDGET_BYTES
    elif method == "fft":
        raise ValueError("fft path cannot evaluate at off-grid points")

    if use_fft:
        q_full = q
        if source_idx is not None:
            q_full = np.zeros((dom.n_cells, q.shape[1]), dtype=np.complex128)
            q_full[source_idx] = q
        if kind == "t":
            out = _fft_raw_apply(dom, q_full)
        else:
            out = np.conj(_fft_raw_apply(dom, np.conj(q_full)))
        if target_idx is not None:
            out = out[target_idx]
        return out / np.pi

    sources = dom.centers if source_idx is None else dom.centers[source_idx]
    if target_points is not None:
        targets = np.asarray(target_points, dtype=np.complex128)
    elif target_idx is not None:
        targets = dom.centers[target_idx]
    else:
        targets = dom.centers
    if kind == "t":
        out = _direct_raw_apply(targets, sources, q)
    else:
        out = _direct_raw_apply(np.conj(targets), np.conj(sources), q)
    return out / np.pi


def _field_transform(plan: CauchyPlan, u: MatrixField, kind: str) -> MatrixField:
    n = u.n
    flat = u.values.reshape(u.domain.n_cells, n * n)
    out = cauchy_apply_values(plan, flat, kind)
    return field_from_values(u.domain, out.reshape(u.domain.n_cells, n, n))


def cauchy_tbar(plan: CauchyPlan, u: MatrixField) -> MatrixField:
    """Phase-weighted conjugate-Cauchy transform of a field."""
    return _field_transform(plan, u, "tbar")


def cauchy_t(plan: CauchyPlan, u: MatrixField) -> MatrixField:
    """Inverse-phase Cauchy transform of a field."""
    return _field_transform(plan, u, "t")


def green_g_apply(plan: CauchyPlan, u: MatrixField) -> MatrixField:
    """Oscillatory Green-type operator: ``1/4 * T(Tbar(u))``."""
    return 0.25 * cauchy_t(plan, cauchy_tbar(plan, u))


def dbar_of_g(plan: CauchyPlan, u: MatrixField) -> MatrixField:
    """z-bar Wirtinger derivative of ``green_g_apply(u)``, in closed form.

    Equals ``1/4 * p_minus(z) * Tbar(u)(z)``; no finite differencing, so the
    modulus is exactly ``|Tbar u| / 4`` pointwise.
    """
    tbar = cauchy_tbar(plan, u)
    vals = 0.25 * plan.p_minus[:, None, None] * tbar.values
    return field_from_values(u.domain, vals)


def green_g_apply_indexed(
    plan: CauchyPlan,
    u_flat: np.ndarray,
    source_idx: np.ndarray,
    target_idx: np.ndarray,
) -> np.ndarray:
    """``1/4 T(Tbar u)`` for sources restricted to ``source_idx``, read at ``target_idx``.

    The inner transform is evaluated on the full grid (its quadrature feeds
    the outer one); only the outer read-out is restricted.  Used by the
    sweep engine where the integrand is compactly supported.
    """
    inner = cauchy_apply_values(plan, u_flat, "tbar", source_idx=source_idx, method="direct")
    outer = cauchy_apply_values(plan, inner, "t", target_idx=target_idx, method="direct")
    return 0.25 * outer


def g_scalar_matrix(plan: CauchyPlan) -> np.ndarray:
    """Dense matrix of the scalar Green-type operator on the grid.

    ``G = 1/4 * T_mat @ Tbar_mat`` with the per-apply self-exclusions on both
    factors; row i gives the quadrature of the composed kernel against cell
    values.  Memory is O(cells^2); intended for grids of a few thousand cells.
    """
    dom = plan.domain
    z = dom.centers
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    inv = 1.0 / diff
    np.fill_diagonal(inv, 0.0)
    t_mat = inv * (dom.weights * plan.p_minus)[None, :] / np.pi
    tbar_mat = np.conj(inv) * (dom.weights * plan.p_plus)[None, :] / np.pi
    return 0.25 * (t_mat @ tbar_mat)
