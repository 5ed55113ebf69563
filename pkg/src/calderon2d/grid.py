"""Polar discretization of the disk: area quadrature cells and boundary nodes.

The disk of radius ``R`` is cut into ``n_r`` rings and ``n_theta`` angular
sectors.  Cell centers sit at the midpoint radii ``r_i = (i + 1/2) dr`` and
angles ``theta_j = j dtheta``; the quadrature weight of a cell is
``r_i * dr * dtheta``, so the weights sum to ``pi R**2`` exactly (the midpoint
radii telescope).  Cell index is ``i * n_theta + j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DomainGrid",
    "BoundaryNode",
    "build_disk_domain",
    "boundary_nodes",
    "boundary_arrays",
    "max_boundary_distance",
]


@dataclass(frozen=True)
class DomainGrid:
    """Polar cell-centered quadrature grid on a disk.

    Attributes
    ----------
    radius : float
        Disk radius.
    n_r, n_theta : int
        Number of radial rings and angular sectors.
    centers : complex ndarray, shape (n_r * n_theta,)
        Cell centers, strictly inside the disk.
    weights : float ndarray, shape (n_r * n_theta,)
        Area quadrature weights ``r_i * dr * dtheta``.
    dr, dtheta : float
        Grid spacings.
    """

    radius: float
    n_r: int
    n_theta: int
    centers: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)
    thetas: np.ndarray = field(repr=False)
    dr: float
    dtheta: float

    @property
    def n_cells(self) -> int:
        return self.n_r * self.n_theta

    def grid_shape(self) -> tuple[int, int]:
        return (self.n_r, self.n_theta)


@dataclass(frozen=True)
class BoundaryNode:
    """Quadrature node on the circle ``|z| = radius``."""

    position: complex
    normal: complex
    weight: float


def build_disk_domain(radius: float = 1.0, n_r: int = 64, n_theta: int = 128) -> DomainGrid:
    """Build the polar quadrature grid for the disk of the given radius.

    Parameters
    ----------
    radius : float
        Must be positive.
    n_r : int
        Radial cell count, at least 1.
    n_theta : int
        Angular cell count, at least 4.
    """
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if n_r < 1:
        raise ValueError(f"n_r must be >= 1, got {n_r}")
    if n_theta < 4:
        raise ValueError(f"n_theta must be >= 4, got {n_theta}")

    dr = radius / n_r
    dtheta = 2.0 * np.pi / n_theta
    radii = (np.arange(n_r) + 0.5) * dr
    thetas = np.arange(n_theta) * dtheta
    centers = (radii[:, None] * np.exp(1j * thetas)[None, :]).ravel()
    weights = np.broadcast_to((radii * dr * dtheta)[:, None], (n_r, n_theta)).ravel().copy()

    centers.flags.writeable = False
    weights.flags.writeable = False
    radii.flags.writeable = False
    thetas.flags.writeable = False
    return DomainGrid(
        radius=float(radius),
        n_r=int(n_r),
        n_theta=int(n_theta),
        centers=centers,
        weights=weights,
        radii=radii,
        thetas=thetas,
        dr=dr,
        dtheta=dtheta,
    )


def boundary_arrays(domain: DomainGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Boundary node positions, outward unit normals and arclength weights.

    Nodes sit at the same angles as the cell columns, so radial stencils at
    the boundary line up with the grid.
    """
    positions = domain.radius * np.exp(1j * domain.thetas)
    normals = positions / domain.radius
    weights = np.full(domain.n_theta, domain.radius * domain.dtheta)
    return positions, normals, weights


def boundary_nodes(domain: DomainGrid) -> list[BoundaryNode]:
    """Boundary quadrature nodes as a list, one per angular column."""
    positions, normals, weights = boundary_arrays(domain)
    return [
        BoundaryNode(position=complex(p), normal=complex(nu), weight=float(w))
        for p, nu, w in zip(positions, normals, weights)
    ]


def max_boundary_distance(domain: DomainGrid) -> float:
    """Largest distance between a boundary point and an interior point.

    For the disk this is the diameter; it sets the admissible range of the
    spectral-parameter schedule (see :func:`calderon2d.stability.lambda_schedule`).
    """
    return 2.0 * domain.radius
