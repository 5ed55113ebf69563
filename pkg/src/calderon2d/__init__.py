"""Numerical lab for the 2D multi-channel zero-energy Schrodinger inverse
boundary problem on the unit disk.

Layers, bottom up: polar grid and quadrature (:mod:`~calderon2d.grid`),
matrix fields and discrete norms (:mod:`~calderon2d.fields`), phase-weighted
Cauchy transforms (:mod:`~calderon2d.kernels`), the Dirichlet problem and
DtN maps (:mod:`~calderon2d.forward`), the oscillatory integral equation and
stationary-phase functionals (:mod:`~calderon2d.mu`), boundary/interior
identity checks and reconstruction (:mod:`~calderon2d.reconstruct`), and the
experiment harness (:mod:`~calderon2d.stability`).
"""

from .grid import (
    BoundaryNode,
    DomainGrid,
    build_disk_domain,
    boundary_nodes,
    max_boundary_distance,
)
from .fields import (
    MatrixField,
    PhaseField,
    constant_field,
    field_from_json,
    field_from_values,
    field_to_json,
    norm,
    phase,
    sample_field,
    wirtinger,
)
from .kernels import (
    HAVE_COMPILED_KERNELS,
    CauchyPlan,
    cauchy_t,
    cauchy_tbar,
    dbar_of_g,
    direct_backend_name,
    green_g_apply,
    make_cauchy_plan,
)

__version__ = "0.1.0"
