"""Transversality, extremality and stationarity of finite collections of sets in R^d."""

from .cones import ConeRep, dist_to_cone, normal_cone
from .distances import (check_distance_inequalities, d1_points, d1_sets, d2_points, d2_sets, d3_points,
                        d3_sets, localized_distance)
from .ekeland import FiniteMetricSpace, agevp, agevp_n, evp, extremal_localize, gevp, nonintersect_localize
from .errors import (DimensionMismatch, NearestPointFailure, NotFoundAtBudget, NumericalFailure,
                     PreconditionFailed, TransversalError, UnsupportedClass)
from .geometry import Bracket, dist_point_set, dist_set_set, intersection_distance, nearest_point, project
from .norms import EUCLIDEAN, MAXIMUM, SUM, NormSpec, dual_norm, norm
from .perturbation import (DualFamily, ParamSet, asymmetric_snap, normalize_then_rebalance,
                           normalize_then_snap, pairing_bound, rebalance_to_zero_sum, snap_to_cones,
                           two_set_exact_flip)
from .scene import Scene, load_scene
from .sets import (AffineSubspace, Ball, FiniteUnion, HPolyhedron, PointCloud, SetRep, Shifted, box,
                   halfspace, line, set_from_dict, singleton, whole_space)
from .stationarity import (CertBundle, ModulusReport, alpha_stationarity_test,
                           asymmetric_separation_certificate, certificate_convert, dual_alpha_sup,
                           dual_certificate_search, nonintersection_separation_certificate,
                           symmetric_separation_certificate, transversality_modulus)
from .translations import (TranslationSet, check_primal_condition, dual_to_primal_translations,
                           extremal_to_metric_condition, localized_reversal, metric_to_alpha_stationary,
                           theta_rho,
                           translations_from_near_closest)

__version__ = "0.1.0"
