"""Zero-sum invariants of finite abelian groups: exhaustive search, counting and congruence checks."""

from .bounds import BoundReport, bound_report, cross_validate
from .cache import InvariantCache
from .congruences import CongruenceReport, LinearSystem, baker_schmidt_parity, fuzz, lucas_binom
from .groups import FiniteAbelianGroup, GroupElement, PGroupSpec, davenport_formula, make_group, parse_group, parse_pgroup
from .lengths import LengthSet
from .search import (
    InvariantResult,
    compute_davenport,
    compute_egz,
    compute_eta,
    compute_s_interval,
    compute_s_interval_plus_N,
    compute_s_L,
    verify_witness,
)
from .sequences import GSequence
from .zscount import ZeroSumProfile, profile

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CongruenceReport",
    "FiniteAbelianGroup",
    "GSequence",
    "GroupElement",
    "InvariantCache",
    "InvariantResult",
    "LengthSet",
    "LinearSystem",
    "PGroupSpec",
    "ZeroSumProfile",
    "baker_schmidt_parity",
    "bound_report",
    "compute_davenport",
    "compute_egz",
    "compute_eta",
    "compute_s_L",
    "compute_s_interval",
    "compute_s_interval_plus_N",
    "cross_validate",
    "davenport_formula",
    "fuzz",
    "lucas_binom",
    "make_group",
    "parse_group",
    "parse_pgroup",
    "profile",
    "verify_witness",
]
