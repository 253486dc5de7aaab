"""Decision procedures for small 2 x 3 orthogonal sets."""

from .alice_first import walgate_hardy_alice_first
from .decide import (
    ClassificationError,
    classify,
    classify_five,
    classify_four,
    classify_six,
    classify_three,
    classify_two,
)
from .lpcc import lpcc_decidable_2x3
from .matching import FamilyMatch, match_family_thm5, match_family_thm6, match_family_thm7
from .three_state import SolverResult, SolverState, three_state_povm_solver
from .verdict import Status, Verdict, WitnessError

__all__ = [
    "ClassificationError",
    "FamilyMatch",
    "SolverResult",
    "SolverState",
    "Status",
    "Verdict",
    "WitnessError",
    "classify",
    "classify_five",
    "classify_four",
    "classify_six",
    "classify_three",
    "classify_two",
    "lpcc_decidable_2x3",
    "match_family_thm5",
    "match_family_thm6",
    "match_family_thm7",
    "three_state_povm_solver",
    "walgate_hardy_alice_first",
]
