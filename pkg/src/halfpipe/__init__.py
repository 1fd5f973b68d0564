"""Harmonic Lagrangian extension of circle vector fields.

Extends continuous vector fields on the circle to the hyperbolic plane by
solving the mean-surface Plateau problem over the Klein disk, verifies the
coincidence with the conformally natural integral extension, and runs the
width / dbar-norm estimate suites.
"""
from .circle import (BoundaryField, Quadruple, boundary_action, cross_ratio,
                     cross_ratio_distortion, cross_ratio_norm_estimate,
                     from_fourier, killing_boundary)
from .douady_earle import QuadratureSpec, l0_dbar, l0_eval, naturality_check
from .envelope import EnvelopeData, PolarGrid, earthquake_eval, envelopes, \
    recenter_isometry, width
from .estimates import (EstimateReport, little_zygmund_decay, pointwise_check,
                        random_suite, two_sided_check)
from .hl import (dbar_norm_fd, divergence_check, hl_eval, hl_field_poincare,
                 shape_operator)
from .minkowski import (HPIsometry, PlaneField, dual_plane_eval,
                        hp_isometry_act, hyp_to_poincare, killing_eval,
                        klein_to_poincare, mink_cross, mink_inner,
                        poincare_to_hyp, poincare_to_klein, pushforward_field,
                        radial_proj, radial_unproj)
from .surface import (DiskField, SolveReport, SurfaceEvaluator,
                      hyperbolic_residual, radial_mode_oracle,
                      solve_mean_surface, to_hyperboloid)

__version__ = "0.1.0"
