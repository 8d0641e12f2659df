"""flowcert: certified fixed-point load flow for distribution networks.

Builds the nodal admittance system of a positive-sequence network,
certifies existence and uniqueness of the load-flow solution from
explicit scalar conditions, computes the solution by contraction
fixed-point iteration (cross-checked against an independent
Newton-Raphson solver), and maps certificate feasibility intervals by
continuation sweeps.
"""

from .admittance import (
    AdmittanceSystem,
    build_admittance,
    full_admittance,
    structural_invertibility_check,
)
from .certificate import (
    CertificateReport,
    KernelMatrix,
    SolutionBall,
    build_kernel,
    certify,
    check_corollary,
    check_prior_conditions,
    check_theorem,
    corollary_condition,
    solution_ball,
    theorem_conditions,
    xi,
    xi_radial,
)
from .continuation import SweepResult, bisect_boundary, sweep, sweep_table
from .errors import (
    ConvergenceError,
    DegenerateNetworkError,
    InvalidNetworkError,
    SingularMatrixError,
    VoltageCollapseError,
)
from .fixed_point import (
    SolveResult,
    iterate_once,
    solve_fixed_point,
    verify_containment,
)
from .network import (
    Branch,
    Bus,
    NetworkDescription,
    OperatingPoint,
    build_network,
    load_injections,
    load_network,
    load_operating_point,
    parse_injections,
    parse_network,
    parse_operating_point,
    serialize_network,
    to_per_unit,
)
from .newton import NewtonResult, power_mismatch, solve_newton
from .pipeline import PreparedGrid, prepare_grid
from .sparse_lu import LuFactors, factorize, solve, solve_many, solve_transpose
from .zero_load import ZeroLoadProfile, compute_w, denormalize, normalize, u_min

__version__ = "0.1.0"
