"""Effectively closed subshifts: presentations, co-language enumeration,
language decisions for property-minimal shifts, and exact analytics."""

from .grid import (BudgetExceeded, GroupElement, GroupSpec, InputError, Pattern, Z, Zd, ball, enumerate_patterns,
                   extensions, format_pattern, free_group, normalize, occurs_in, parse_pattern, translate, word)
from .streams import (ApproxReal, Certificate, CoLanguage, Enumeration, ForbiddenPresentation, Outcome, Verdict,
                      builtin_real, co_language, compare_log_ratio, emptiness_certificate, forbid_pattern,
                      golden_ratio_conjugate, log_golden_mean, rational, verify_certificate)
from .properties import (ContainsPatternsRefuter, CylinderRefuter, EntropyAtLeastRefuter, IntersectRefuter,
                         NonemptyRefuter, PeriodsAtLeastRefuter, RefutationRun, Refuter, run_refuter)
from .engine import (DecisionRun, NotSeparated, decide_pattern, disjoint_separation_radius, enumerate_language,
                     product_co_language, separating_predicate, union_co_language)
from .zoo import (ZooShift, fibonacci, from_name, golden_mean, periodic_orbit, product_shift, sft, single_one,
                  sturmian_window, substitution_shift)
from .analytics import (EntropyInterval, PerVector, complexity_count, entropy_interval_si, gluing_constant_sturmian,
                        invariance_check, per_vector_brute, per_vector_transfer, recover_slope_max, recover_window)

__version__ = "0.1.0"
