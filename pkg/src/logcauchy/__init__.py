"""Cauchy singular integrals with parameters, log-weighted Holder seminorm
estimation, and the composed dbar solution operator on products of discs."""

__version__ = "0.1.0"

from .geometry import (BoundarySystem, Contour, Disc, GeometryError,
                       HolderIndex, ProductDomain, boundary_constants,
                       chord_arc_constant, contour_from_json, make_circle,
                       make_fourier_contour, nontangential_contains)
from .quadrature import (QuadratureError, QuadratureResult, ToleranceError,
                         area_cauchy, contour_integral, log_weight_integral,
                         pv_cauchy)
from .holder import (BoundaryCurve, DiscRegion, Interval, ProductPairs,
                     SeminormEstimate, holder_extension, log_holder_weight,
                     recombination_check, seminorm_estimate, slice_seminorms)
from .operators import (GridFunction, cauchy_interior, grid_function_from_callable,
                        plemelj_boundary, slice_S, slice_T)
from .counterexample import (TumanovParams, remark_divergence_experiment,
                             tumanov_S_at_one, tumanov_boundary,
                             tumanov_middle_closed_form)
from .dbar import (Form01, example_form, example_witness, residual_report,
                   solve_dbar, wirtinger_dbar, witness_target)
