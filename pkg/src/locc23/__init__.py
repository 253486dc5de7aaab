"""Perfect local discrimination of small orthogonal sets in 2 x 3 systems."""

from .classifiers import Status, Verdict, classify
from .families import gen_multiround, gen_thm5_family, gen_thm6_family, gen_thm7_family, paper_examples
from .protocol import ProtocolTree, count_rounds, verify_perfect_discrimination
from .search import lpcc_grid_search, min_rounds_search, random_orthogonal_set
from .states import StateSet

__all__ = [
    "ProtocolTree",
    "StateSet",
    "Status",
    "Verdict",
    "classify",
    "count_rounds",
    "gen_multiround",
    "gen_thm5_family",
    "gen_thm6_family",
    "gen_thm7_family",
    "lpcc_grid_search",
    "min_rounds_search",
    "paper_examples",
    "random_orthogonal_set",
    "verify_perfect_discrimination",
]
