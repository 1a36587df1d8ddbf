"""Calabi-affine geometry of convex graphs ``x_{n+1} = f(x_1, ..., x_n)``.

The metric is the Hessian of ``f``; everything else (connection, cubic
form, curvature, fourth-order PDE operators) is computed from exact Taylor
jets of ``f`` up to order four.
"""

from .catalog import CatalogEntry, get as catalog_entry
from .core import connection_and_pick, curvature, invariants, metric_data, sectional_curvature
from .errors import CalabiError, InputError, NumericError
from .expr import ConvexFunction, convex_function, evaluate, parse, to_source
from .frames import EjiriData, theta_bruteforce, theta_max
from .geodesics import GeodesicPath, LengthResult, geodesic, length_to_boundary
from .jets import Jet4, SymmetricTensor, finite_difference_jet, jet4, taylor_jet
from .legendre import AffineTransform, LegendrePair, duality_defect, legendre_point
from .pde import (PdeReport, exponent_window, in_window, pde_report, power_identity,
                  power_identity_coefficient)
from .report import AnalysisReport, analyze, dumps, to_json
from .warped import EtaTrajectory, ParamCase, integrate_eta, param_case

__version__ = "0.1.0"

__all__ = [
    "AffineTransform", "AnalysisReport", "CalabiError", "CatalogEntry", "ConvexFunction",
    "EjiriData", "EtaTrajectory", "GeodesicPath", "InputError", "Jet4", "LegendrePair",
    "LengthResult", "NumericError", "ParamCase", "PdeReport", "SymmetricTensor", "analyze",
    "catalog_entry", "connection_and_pick", "convex_function", "curvature", "dumps",
    "duality_defect", "evaluate", "exponent_window", "finite_difference_jet", "geodesic",
    "in_window", "integrate_eta", "invariants", "jet4", "legendre_point", "length_to_boundary",
    "metric_data", "param_case", "parse", "pde_report", "power_identity",
    "power_identity_coefficient", "sectional_curvature", "taylor_jet", "theta_bruteforce",
    "theta_max", "to_json", "to_source",
]
