"""Matrix Dirichlet problem and the discrete Dirichlet-to-Neumann map.

The interior operator is the 5-point polar finite-difference Laplacian plus
the matrix potential, assembled in weight-symmetrized form: conjugating by
``sqrt(r)`` makes the Laplacian part exactly symmetric, so the operator for
the transposed potential is the exact transpose of the operator for the
potential.  Boundary values enter through ghost elimination at the outer
ring (second order), and the normal derivative is read with a one-sided
three-point stencil through the boundary value itself.

Conventions: the DtN kernel K is an (m, m) array of n x n blocks with
``(Phi f)(x) = sum_y weight(y) K(x, y) f(y)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dataclass_field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fields import MatrixField, field_from_values
from .grid import DomainGrid, boundary_arrays

__all__ = [
    "DtnMap",
    "SpectrumReport",
    "SpectrumError",
    "interior_matrix",
    "solve_dirichlet",
    "assemble_dtn",
    "check_dirichlet_spectrum",
    "dtn_op_norm",
    "dtn_norm1",
    "dtn_to_json",
    "dtn_from_json",
]


class SpectrumError(RuntimeError):
    """Zero is (numerically) a Dirichlet eigenvalue of the interior operator."""


@dataclass(frozen=True)
class SpectrumReport:
    min_singular_value: float
    threshold: float
    passes: bool


@dataclass(frozen=True)
class DtnMap:
    """Discrete DtN operator as a block boundary kernel with quadrature weights."""

    n: int
    positions: np.ndarray = dataclass_field(repr=False)
    normals: np.ndarray = dataclass_field(repr=False)
    weights: np.ndarray = dataclass_field(repr=False)
    kernel: np.ndarray = dataclass_field(repr=False)

    @property
    def m(self) -> int:
        return len(self.positions)

    def apply(self, f: np.ndarray) -> np.ndarray:
        """Apply to boundary data of shape (m, n, n)."""
        return np.einsum("y,xyij,yjk->xik", self.weights, self.kernel, f)

    def __sub__(self, other: "DtnMap") -> "DtnMap":
        if self.kernel.shape != other.kernel.shape:
            raise ValueError("DtN maps live on different boundaries")
        return DtnMap(
            n=self.n,
            positions=self.positions,
            normals=self.normals,
            weights=self.weights,
            kernel=self.kernel - other.kernel,
        )


_LAPLACE_CACHE: dict[tuple, tuple] = {}


def _laplacian_parts(domain: DomainGrid):
    """Symmetrized -Laplacian, boundary injection and the similarity diagonal.

    Returns ``(S, DB, d_scale)`` with ``S`` the (cells x cells) real symmetric
    matrix of -Laplacian after the sqrt(r) similarity, ``DB`` the (cells x m)
    injection of boundary values into the scaled right-hand side, and
    ``d_scale`` the per-cell similarity diagonal.
    """
    key = (domain.n_r, domain.n_theta, round(domain.radius, 12))
    cached = _LAPLACE_CACHE.get(key)
    if cached is not None:
        return cached
    n_r, n_t = domain.n_r, domain.n_theta
    dr, dth = domain.dr, domain.dtheta
    r = domain.radii
    m_cells = n_r * n_t

    a = 1.0 / dr**2 - 1.0 / (2.0 * r * dr)  # to ring i-1 (a[0] == 0 exactly)
    b = 1.0 / dr**2 + 1.0 / (2.0 * r * dr)  # to ring i+1
    c = 1.0 / (r**2 * dth**2)  # angular neighbors
    d = -2.0 / dr**2 - 2.0 / (r**2 * dth**2)

    rows, cols, vals = [], [], []
    cell = np.arange(m_cells).reshape(n_r, n_t)
    for i in range(n_r):
        here = cell[i]
        # -Laplacian: negate the stencil
        diag = -d[i] + (b[i] if i == n_r - 1 else 0.0)  # ghost elimination at the rim
        rows.append(here)
        cols.append(here)
        vals.append(np.full(n_t, diag))
        if i > 0:
            rows.append(here)
            cols.append(cell[i - 1])
            vals.append(np.full(n_t, -a[i]))
        if i < n_r - 1:
            rows.append(here)
            cols.append(cell[i + 1])
            vals.append(np.full(n_t, -b[i]))
        for shift in (-1, 1):
            rows.append(here)
            cols.append(np.roll(here, -shift))
            vals.append(np.full(n_t, -c[i]))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    lap = sp.csr_matrix((vals, (rows, cols)), shape=(m_cells, m_cells))

    d_scale = np.repeat(np.sqrt(r), n_t)
    s_mat = sp.diags(d_scale) @ lap @ sp.diags(1.0 / d_scale)
    s_mat = ((s_mat + s_mat.T) * 0.5).tocsr()

    bnd_rows = cell[n_r - 1]
    inject = sp.csr_matrix(
        (np.full(n_t, 2.0 * b[n_r - 1]), (bnd_rows, np.arange(n_t))),
        shape=(m_cells, n_t),
    )
    db = (sp.diags(d_scale) @ inject).tocsr()

    result = (s_mat, db, d_scale)
    _LAPLACE_CACHE[key] = result
    return result


def interior_matrix(v: MatrixField) -> sp.csr_matrix:
    """Symmetrized discrete interior operator ``-Laplacian + v`` (Dirichlet).

    Unknown layout is cell-major, channel-minor.  The Laplacian part is
    exactly symmetric, so the matrix for the transposed potential equals the
    exact transpose of this one.
    """
    dom = v.domain
    s_mat, _, _ = _laplacian_parts(dom)
    n = v.n
    if n == 1:
        return (s_mat + sp.diags(v.values[:, 0, 0])).tocsr()
    a_full = sp.kron(s_mat, sp.identity(n), format="csr").astype(np.complex128)
    cells = np.arange(dom.n_cells)
    alpha = np.arange(n)
    rows = np.broadcast_to(cells[:, None, None] * n + alpha[None, :, None], (dom.n_cells, n, n)).ravel()
    cols = np.broadcast_to(cells[:, None, None] * n + alpha[None, None, :], (dom.n_cells, n, n)).ravel()
    pot = sp.csr_matrix((v.values.ravel(), (rows, cols)), shape=a_full.shape)
    return (a_full + pot).tocsr()


def _factorize(v: MatrixField):
    a_mat = interior_matrix(v).tocsc()
    return spla.splu(a_mat)


_ZERO_SIGMA_CACHE: dict[tuple, float] = {}


def _min_singular_value(lu, size: int, iters: int = 40, tol: float = 1e-10) -> float:
    """Smallest singular value via inverse power iteration on A A^H."""
    rng = np.random.default_rng(7)
    x = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    x /= np.linalg.norm(x)
    rho_old = 0.0
    for _ in range(iters):
        y = lu.solve(lu.solve(x), trans="H")
        rho = np.linalg.norm(y)
        x = y / rho
        if abs(rho - rho_old) <= tol * rho:
            break
        rho_old = rho
    return 1.0 / np.sqrt(rho)


def check_dirichlet_spectrum(v: MatrixField, threshold: float | None = None) -> SpectrumReport:
    """Non-degeneracy check of the discrete Dirichlet operator for ``v``.

    Reports the smallest singular value (inverse power iteration on the
    sparse factorization).  The default threshold is ``1e-6`` times the
    smallest singular value of the potential-free operator on the same grid.
    """
    dom = v.domain
    if threshold is None:
        key = (dom.n_r, dom.n_theta, round(dom.radius, 12))
        sigma0 = _ZERO_SIGMA_CACHE.get(key)
        if sigma0 is None:
            zero = field_from_values(dom, np.zeros((dom.n_cells, 1, 1), dtype=np.complex128))
            sigma0 = _min_singular_value(_factorize(zero), dom.n_cells)
            _ZERO_SIGMA_CACHE[key] = sigma0
        threshold = 1e-6 * sigma0
    try:
        lu = _factorize(v)
        sigma = _min_singular_value(lu, dom.n_cells * v.n)
    except RuntimeError:  # exactly singular factorization
        sigma = 0.0
    return SpectrumReport(min_singular_value=float(sigma), threshold=float(threshold), passes=bool(sigma > threshold))


def _boundary_rhs(dom: DomainGrid, f: np.ndarray, n: int) -> np.ndarray:
    """Scaled right-hand side for boundary data ``f`` of shape (m, n, n)."""
    _, db, _ = _laplacian_parts(dom)
    rhs = db @ f.reshape(dom.n_theta, n * n)
    return rhs.reshape(dom.n_cells * n, n)


def solve_dirichlet(
    v: MatrixField,
    f: np.ndarray,
    check_spectrum: bool = True,
    _lu=None,
) -> MatrixField:
    """Solve ``(-Laplacian + v) psi = 0`` with ``psi = f`` on the boundary.

    ``f`` holds n x n boundary matrices at the boundary nodes, shape
    (n_theta, n, n); columns of ``psi`` solve independent vector problems.
    Returns the interior solution as a field.
    """
    dom = v.domain
    n = v.n
    f = np.asarray(f, dtype=np.complex128)
    if f.shape != (dom.n_theta, n, n):
        raise ValueError(f"boundary data must have shape ({dom.n_theta}, {n}, {n}), got {f.shape}")
    if check_spectrum:
        report = check_dirichlet_spectrum(v)
        if not report.passes:
            raise SpectrumError(
                f"near-eigenvalue: min singular value {report.min_singular_value:.3e} "
                f"<= threshold {report.threshold:.3e}"
            )
    lu = _lu if _lu is not None else _factorize(v)
    _, _, d_scale = _laplacian_parts(dom)
    y = lu.solve(_boundary_rhs(dom, f, n))
    psi = (y.reshape(dom.n_cells, n, n) / d_scale[:, None, None]).reshape(dom.n_cells, n, n)
    return field_from_values(dom, psi)


def _normal_derivative_reader(dom: DomainGrid):
    """Coefficients of the one-sided boundary flux reading.

    ``d/dr at r = R  ~  2/dr * (f - u_last)``, the flux consistent with the
    ghost convention of the interior scheme.  On discrete solutions this
    reading is second-order accurate; wider Lagrange stencils lose an order
    to the ghost-elimination boundary layer.
    """
    dr = dom.dr
    return 2.0 / dr, -2.0 / dr


def assemble_dtn(v: MatrixField, check_spectrum: bool = True) -> DtnMap:
    """Assemble the discrete DtN kernel column by column.

    Column (y, channel) is the normal-derivative reading of the solution
    with a unit nodal-hat boundary trace at node y, divided by the node
    weight.  All columns share one sparse factorization.
    """
    dom = v.domain
    n = v.n
    if check_spectrum:
        report = check_dirichlet_spectrum(v)
        if not report.passes:
            raise SpectrumError(
                f"near-eigenvalue: min singular value {report.min_singular_value:.3e} "
                f"<= threshold {report.threshold:.3e}"
            )
    lu = _factorize(v)
    _, db, d_scale = _laplacian_parts(dom)
    m = dom.n_theta
    n_cells = dom.n_cells

    # responses to unit nodal values, all channels at once: rhs = kron(db, I_n)
    rhs = sp.kron(db, sp.identity(n), format="csc")
    sol = lu.solve(rhs.toarray())
    u = sol.reshape(n_cells, n, m, n) / d_scale[:, None, None, None]

    c_f, c_1 = _normal_derivative_reader(dom)
    grid = u.reshape(dom.n_r, dom.n_theta, n, m, n)
    reading = c_1 * grid[-1]  # (n_theta, n_out, m, n_in)

    positions, normals, weights = boundary_arrays(dom)
    kernel = np.transpose(reading, (0, 2, 1, 3)).copy()  # (x, y, n_out, n_in)
    x_idx = np.arange(m)
    kernel[x_idx, x_idx] += c_f * np.eye(n)[None, :, :]
    kernel /= weights[None, :, None, None]
    kernel.flags.writeable = False
    return DtnMap(n=n, positions=positions, normals=normals, weights=weights, kernel=kernel)


def dtn_op_norm(a: DtnMap) -> float:
    """Induced norm for sup-in-x, max-entry matrix magnitudes.

    ``max over x, i of sum_y w_y sum_j |K_ij(x, y)|``.
    """
    sums = np.einsum("y,xyij->xi", a.weights, np.abs(a.kernel))
    return float(sums.max()) if sums.size else 0.0


def dtn_norm1(a: DtnMap) -> float:
    """Kernel norm ``sup_{x != y} |K(x,y)| / log(3 + 1/|x-y|)``, max-entry |.|."""
    m = a.m
    dist = np.abs(a.positions[:, None] - a.positions[None, :])
    mags = np.abs(a.kernel).max(axis=(2, 3))
    off = ~np.eye(m, dtype=bool)
    return float((mags[off] / np.log(3.0 + 1.0 / dist[off])).max())


def dtn_to_json(a: DtnMap) -> str:
    """Serialize to ``{n, m, weights, positions, blocks}`` with [re, im] pairs."""
    flat = a.kernel.reshape(-1)
    doc = {
        "n": a.n,
        "m": a.m,
        "weights": a.weights.tolist(),
        "positions": np.column_stack([a.positions.real, a.positions.imag]).tolist(),
        "blocks": np.column_stack([flat.real, flat.imag]).tolist(),
    }
    return json.dumps(doc)


def dtn_from_json(text: str) -> DtnMap:
    doc = json.loads(text)
    n, m = int(doc["n"]), int(doc["m"])
    pos = np.asarray(doc["positions"], dtype=float)
    positions = pos[:, 0] + 1j * pos[:, 1]
    blocks = np.asarray(doc["blocks"], dtype=float)
    kernel = (blocks[:, 0] + 1j * blocks[:, 1]).reshape(m, m, n, n)
    radius = float(np.abs(positions[0]))
    return DtnMap(
        n=n,
        positions=positions,
        normals=positions / radius,
        weights=np.asarray(doc["weights"], dtype=float),
        kernel=kernel,
    )
