"""Exact analysis of piecewise-linear interval maps and their inverse limits."""

__version__ = "0.1.0"

from .numerics import Interval, IntervalSet, Q, fmt_rat, parse_rat  # noqa: E402
from .plmap import BudgetExceeded, DomainError, PLMap, SpecError, gallery, gallery_map  # noqa: E402
from .verdict import Status, Verdict  # noqa: E402
from .mapspec import ConsistencyError, OrbitSpec, ParseError, parse_map, parse_orbit, serialize  # noqa: E402
from .certify import (leo_certify, long_zigzag_certify, raines_property_probe,  # noqa: E402
                      zigzag_scan)
from .asymptotics import (non_contraction_check, omega_approx, pull_back,  # noqa: E402
                          recurrence_check, retract_probe, rn_limit_classifier)
from .ilim import (arc_check, b_endpoint_test, basic_arc, double_spiral_probe,  # noqa: E402
                   endpoint_classify, endpoint_construct, folding_test,
                   virtually_increasing_preimage)

__all__ = [
    "__version__", "Interval", "IntervalSet", "Q", "fmt_rat", "parse_rat", "BudgetExceeded",
    "DomainError", "PLMap", "SpecError", "gallery", "gallery_map", "Status", "Verdict",
    "ConsistencyError", "OrbitSpec", "ParseError", "parse_map", "parse_orbit", "serialize",
    "leo_certify", "long_zigzag_certify", "raines_property_probe", "zigzag_scan",
    "non_contraction_check", "omega_approx", "pull_back", "recurrence_check", "retract_probe",
    "rn_limit_classifier", "arc_check", "b_endpoint_test", "basic_arc", "double_spiral_probe",
    "endpoint_classify", "endpoint_construct", "folding_test", "virtually_increasing_preimage",
]
