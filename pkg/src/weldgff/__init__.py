"""Conformal welding of boundary Gaussian fields.

Subpackage map:

* ``constants``  -- coupling constants locked to the diffusivity kappa
* ``series``     -- truncated series conformal maps and Schwarzian calculus
* ``quadrature`` -- annulus/contour quadrature and the two tensor pairings
* ``kernels``    -- cancellation-free ghost-kernel evaluation
* ``fields``     -- boundary Gaussian fields, actions, stress tensors, GMC
* ``beltrami``   -- Cauchy transforms, first-order flows, ghost kernel sums
* ``homeo``      -- circle homeomorphisms and measure matching
* ``geometry``   -- curves, Hausdorff distances, welding triples
* ``riemann``    -- Riemann maps of Jordan curves (forward problem)
* ``welding``    -- conformal welding solver and curve functionals
* ``virasoro``   -- exact symbolic Witt/Virasoro/Heisenberg engine
* ``sle``        -- Loewner traces, dimension and local-time estimators
* ``manifest``   -- named verification checks and run manifests
* ``cli``        -- command-line entry point
"""

from .beltrami import (
    BeltramiSpec,
    FlowSpec,
    beta_coefficients,
    cauchy_transform,
    first_order_flow,
    ghost_sum_check,
    iota_pullback,
    laurent_beltrami,
    psi_kernel,
    pushforward_beltrami,
)
from .constants import Constants, constants_from_gamma, constants_from_kappa
from .fields import (
    FourierField,
    GmcMeasure,
    dirichlet_energy,
    gmc_measure,
    harmonic_extension,
    liouville_action_disc,
    sample_field,
    stress_tensors,
)
from .geometry import CurvePolyline, WeldingTriple, hausdorff_distance
from .homeo import CircleHomeo, homeo_from_measures, invert_homeo
from .manifest import CHECKS, RunConfig, RunManifest, verify_suite
from .quadrature import QuadDiffFn, VectorFieldSeries, pair_q_beltrami, pair_q_vector
from .riemann import curve_from_series, riemann_maps_of_curve
from .series import PowerSeriesMap, series_compose_invert, series_from_boundary
from .sle import (
    DrivingPath,
    TraceResult,
    box_dimension,
    brownian_local_time,
    loewner_trace,
    minkowski_content,
    sample_driving,
)
from .welding import (
    curve_liouville_action,
    directional_derivative,
    omega,
    tt06_residual,
    vw_residual,
    welding_energies,
    zipper_weld,
)

__all__ = [
    "BeltramiSpec", "FlowSpec", "beta_coefficients", "cauchy_transform",
    "first_order_flow", "ghost_sum_check", "iota_pullback", "laurent_beltrami",
    "psi_kernel", "pushforward_beltrami",
    "Constants", "constants_from_gamma", "constants_from_kappa",
    "FourierField", "GmcMeasure", "dirichlet_energy", "gmc_measure",
    "harmonic_extension", "liouville_action_disc", "sample_field", "stress_tensors",
    "CurvePolyline", "WeldingTriple", "hausdorff_distance",
    "CircleHomeo", "homeo_from_measures", "invert_homeo",
    "CHECKS", "RunConfig", "RunManifest", "verify_suite",
    "QuadDiffFn", "VectorFieldSeries", "pair_q_beltrami", "pair_q_vector",
    "curve_from_series", "riemann_maps_of_curve",
    "PowerSeriesMap", "series_compose_invert", "series_from_boundary",
    "DrivingPath", "TraceResult", "box_dimension", "brownian_local_time",
    "loewner_trace", "minkowski_content", "sample_driving",
    "curve_liouville_action", "directional_derivative", "omega",
    "tt06_residual", "vw_residual", "welding_energies", "zipper_weld",
]

__version__ = "0.1.0"
