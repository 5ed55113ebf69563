"""Matrix-valued grid functions, Wirtinger derivatives and discrete norms.

A field assigns an ``n x n`` complex matrix to every cell of a
:class:`~calderon2d.grid.DomainGrid`.  The magnitude of a matrix is the
maximum entry modulus throughout, and the sup norm of a field is the maximum
over cells.  ``c1_zbar`` adds the z-bar Wirtinger derivative and ``c2`` adds
all second Wirtinger derivatives (finite-difference surrogates for the
continuous norms; they converge as the grid refines).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dataclass_field
from typing import Callable

import numpy as np

from .grid import DomainGrid

__all__ = [
    "MatrixField",
    "PhaseField",
    "sample_field",
    "field_from_values",
    "constant_field",
    "wirtinger",
    "norm",
    "phase",
    "phase_values",
    "field_to_json",
    "field_from_json",
]


@dataclass(frozen=True)
class MatrixField:
    """``n x n`` complex matrix samples at every cell center.

    ``values`` has shape ``(n_cells, n, n)`` and is frozen after construction;
    operations return new fields.
    """

    domain: DomainGrid
    values: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self):
        v = self.values
        if v.ndim != 3 or v.shape[1] != v.shape[2]:
            raise ValueError(f"values must have shape (cells, n, n), got {v.shape}")
        if v.shape[0] != self.domain.n_cells:
            raise ValueError(
                f"value count {v.shape[0]} != cell count {self.domain.n_cells}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def __add__(self, other: "MatrixField") -> "MatrixField":
        return field_from_values(self.domain, self.values + other.values)

    def __sub__(self, other: "MatrixField") -> "MatrixField":
        return field_from_values(self.domain, self.values - other.values)

    def __mul__(self, scalar) -> "MatrixField":
        return field_from_values(self.domain, self.values * scalar)

    __rmul__ = __mul__

    def matmul(self, other: "MatrixField") -> "MatrixField":
        """Pointwise matrix product (self @ other at every cell)."""
        return field_from_values(self.domain, self.values @ other.values)

    def transpose(self) -> "MatrixField":
        return field_from_values(self.domain, np.swapaxes(self.values, 1, 2))

    def conj(self) -> "MatrixField":
        return field_from_values(self.domain, np.conj(self.values))


@dataclass(frozen=True)
class PhaseField:
    """Unit-modulus stationary-phase weight ``exp(lam*(z-z0)^2 - conj(lam)*(zbar-z0bar)^2)``.

    The exponent is purely imaginary, so every value has modulus one.
    """

    domain: DomainGrid
    z0: complex
    lam: complex
    values: np.ndarray = dataclass_field(repr=False)


def field_from_values(domain: DomainGrid, values: np.ndarray) -> MatrixField:
    """Wrap a (cells, n, n) array as an immutable field."""
    values = np.ascontiguousarray(values, dtype=np.complex128)
    values.flags.writeable = False
    return MatrixField(domain=domain, values=values)


def constant_field(domain: DomainGrid, matrix: np.ndarray | float, n: int | None = None) -> MatrixField:
    """Field with the same matrix at every cell; scalars mean ``scalar * I``."""
    if np.isscalar(matrix):
        if n is None:
            n = 1
        matrix = matrix * np.eye(n)
    matrix = np.asarray(matrix, dtype=np.complex128)
    values = np.broadcast_to(matrix, (domain.n_cells,) + matrix.shape).copy()
    return field_from_values(domain, values)


def sample_field(generator: Callable[[complex], np.ndarray], domain: DomainGrid) -> MatrixField:
    """Evaluate a pointwise matrix function at every cell center.

    The generator maps a complex coordinate to an ``n x n`` array (or a
    scalar, taken as ``1 x 1``).  Non-finite output is rejected.
    """
    first = np.atleast_2d(np.asarray(generator(complex(domain.centers[0])), dtype=np.complex128))
    n = first.shape[0]
    values = np.empty((domain.n_cells, n, n), dtype=np.complex128)
    values[0] = first
    for k in range(1, domain.n_cells):
        values[k] = np.atleast_2d(np.asarray(generator(complex(domain.centers[k])), dtype=np.complex128))
    return field_from_values(domain, values)


def _radial_derivative(grid_vals: np.ndarray, dr: float) -> np.ndarray:
    """Second-order d/dr on axis 0: centered inside, one-sided at both ends."""
    out = np.empty_like(grid_vals)
    out[1:-1] = (grid_vals[2:] - grid_vals[:-2]) / (2.0 * dr)
    out[0] = (-3.0 * grid_vals[0] + 4.0 * grid_vals[1] - grid_vals[2]) / (2.0 * dr)
    out[-1] = (3.0 * grid_vals[-1] - 4.0 * grid_vals[-2] + grid_vals[-3]) / (2.0 * dr)
    return out


def _angular_derivative(grid_vals: np.ndarray, dtheta: float) -> np.ndarray:
    """Centered periodic d/dtheta on axis 1."""
    return (np.roll(grid_vals, -1, axis=1) - np.roll(grid_vals, 1, axis=1)) / (2.0 * dtheta)


def wirtinger(f: MatrixField, direction: str) -> MatrixField:
    """Discrete Wirtinger derivative d/dz or d/dzbar.

    Uses the polar chain rule
    ``d/dz = exp(-i theta)/2 (d/dr - i/r d/dtheta)`` and
    ``d/dzbar = exp(+i theta)/2 (d/dr + i/r d/dtheta)``
    with centered differences (one-sided at the first and last ring).
    Second-order accurate in the interior; needs ``n_r >= 3``.
    """
    if direction not in ("z", "zbar"):
        raise ValueError(f"direction must be 'z' or 'zbar', got {direction!r}")
    dom = f.domain
    if dom.n_r < 3:
        raise ValueError("wirtinger derivatives need n_r >= 3")
    n = f.n
    grid_vals = f.values.reshape(dom.n_r, dom.n_theta, n, n)
    d_r = _radial_derivative(grid_vals, dom.dr)
    d_t = _angular_derivative(grid_vals, dom.dtheta)
    r = dom.radii[:, None, None, None]
    th = dom.thetas[None, :, None, None]
    if direction == "z":
        out = 0.5 * np.exp(-1j * th) * (d_r - 1j / r * d_t)
    else:
        out = 0.5 * np.exp(1j * th) * (d_r + 1j / r * d_t)
    return field_from_values(dom, out.reshape(dom.n_cells, n, n))


def _cellwise_max(values: np.ndarray) -> np.ndarray:
    """Max entry modulus per cell."""
    return np.abs(values).max(axis=(1, 2))


def norm(f: MatrixField, kind: str = "sup") -> float:
    """Discrete field norm.

    ``sup``      : max over cells of the max entry modulus.
    ``c1_zbar``  : max(sup(f), sup(d/dzbar f)).
    ``c2``       : adds d/dz and all second Wirtinger derivatives.
    """
    if kind == "sup":
        return float(_cellwise_max(f.values).max())
    if kind == "c1_zbar":
        return max(norm(f, "sup"), norm(wirtinger(f, "zbar"), "sup"))
    if kind == "c2":
        fz = wirtinger(f, "z")
        fzb = wirtinger(f, "zbar")
        seconds = (
            norm(wirtinger(fz, "z"), "sup"),
            norm(wirtinger(fz, "zbar"), "sup"),
            norm(wirtinger(fzb, "zbar"), "sup"),
        )
        return max(norm(f, "sup"), norm(fz, "sup"), norm(fzb, "sup"), *seconds)
    raise ValueError(f"unknown norm kind {kind!r}")


def phase_values(z0: complex, lam: complex, points: np.ndarray) -> np.ndarray:
    """Stationary-phase weight at arbitrary points (purely imaginary exponent)."""
    w2 = (points - z0) ** 2
    return np.exp(lam * w2 - np.conj(lam * w2))


def phase(z0: complex, lam: complex, domain: DomainGrid) -> PhaseField:
    """Unit-modulus phase field on the cell centers."""
    vals = phase_values(z0, lam, domain.centers)
    vals.flags.writeable = False
    return PhaseField(domain=domain, z0=complex(z0), lam=complex(lam), values=vals)


def field_to_json(f: MatrixField) -> str:
    """Serialize to the documented JSON layout.

    ``{"n": n, "n_r": .., "n_theta": .., "radius": .., "values": [...]}`` with
    values in cell-major, then row-major matrix order, each entry a
    ``[re, im]`` pair.
    """
    flat = f.values.reshape(-1)
    pairs = np.column_stack([flat.real, flat.imag]).tolist()
    doc = {
        "n": f.n,
        "n_r": f.domain.n_r,
        "n_theta": f.domain.n_theta,
        "radius": f.domain.radius,
        "values": pairs,
    }
    return json.dumps(doc)


def field_from_json(text: str, domain: DomainGrid) -> MatrixField:
    """Inverse of :func:`field_to_json`; the domain must match the header."""
    doc = json.loads(text)
    if (doc["n_r"], doc["n_theta"]) != (domain.n_r, domain.n_theta):
        raise ValueError("grid shape in JSON does not match the domain")
    n = int(doc["n"])
    pairs = np.asarray(doc["values"], dtype=float)
    flat = pairs[:, 0] + 1j * pairs[:, 1]
    return field_from_values(domain, flat.reshape(domain.n_cells, n, n))
