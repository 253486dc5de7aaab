"""Classification of 2 x 3 orthogonal sets by cardinality."""

from ..states import as_state_set, count_entangled, count_product, pairwise_orthogonal
from .alice_first import walgate_hardy_alice_first
from .lpcc import lpcc_decidable_2x3
from .matching import match_family_thm5, match_family_thm6, match_family_thm7
from .three_state import three_state_povm_solver
from .verdict import Status, Verdict

RULES = {
    2: "two orthogonal pure states are always locally distinguishable",
    3: "three-state pipeline: projective check, explicit family, POVM search",
    4: "four states: at least two product members are necessary; LOCC-only iff one of the two explicit families",
    5: "five states: distinguishable iff at most one member is entangled (LOCC and LPCC coincide)",
    6: "six states: distinguishable iff they form a complete orthogonal product basis",
}


class ClassificationError(ValueError):
    pass


def _checked(states, count, tol):
    states = as_state_set(states)
    if count is not None and len(states) != count:
        raise ClassificationError(f"expected {count} states, got {len(states)}")
    if count is None or count > 2:
        if states.dims != (2, 3):
            raise ClassificationError(f"expected 2x3 states, got {states.dims[0]}x{states.dims[1]}")
    elif states.dims[0] != 2:
        raise ClassificationError("Alice must hold a qubit")
    ok, pair = pairwise_orthogonal(states, tol)
    if not ok:
        raise ClassificationError(f"states {pair[0]} and {pair[1]} are not orthogonal")
    return states


def classify_two(states, tol=1e-9):
    states = _checked(states, 2, tol)
    tree = walgate_hardy_alice_first(states)
    if tree is None:  # cannot happen for two orthogonal states
        raise ClassificationError("no Alice basis found for two orthogonal states")
    return Verdict.positive(Status.LPCC_DISTINGUISHABLE, tree, states, RULES[2])


def classify_six(states, tol=1e-9):
    states = _checked(states, 6, tol)
    ent = count_entangled(states)
    if ent:
        return Verdict.negative(RULES[6], f"{ent} member(s) entangled", entangled=ent)
    tree = lpcc_decidable_2x3(states)
    if tree is None:
        return Verdict.negative(RULES[6], "product basis but no protocol constructed",
                                Status.UNDECIDED)
    return Verdict.positive(Status.LPCC_DISTINGUISHABLE, tree, states, RULES[6])


def classify_five(states, tol=1e-9):
    states = _checked(states, 5, tol)
    ent = count_entangled(states)
    if ent > 1:
        return Verdict.negative(RULES[5], f"{ent} members entangled", entangled=ent)
    tree = lpcc_decidable_2x3(states)
    if tree is None:
        return Verdict.negative(RULES[5], "criterion holds but no protocol constructed",
                                Status.UNDECIDED)
    return Verdict.positive(Status.LPCC_DISTINGUISHABLE, tree, states, RULES[5], entangled=ent)


def classify_four(states, tol=1e-9):
    states = _checked(states, 4, tol)
    prod = count_product(states)
    if prod < 2:
        return Verdict.negative(RULES[4], f"only {prod} product member(s)", product=prod)
    tree = lpcc_decidable_2x3(states)
    if tree is not None:
        return Verdict.positive(Status.LPCC_DISTINGUISHABLE, tree, states, RULES[4])
    for name, matcher in (("first family", match_family_thm5), ("second family", match_family_thm6)):
        m = matcher(states)
        if m is not None:
            return Verdict.positive(Status.LOCC_ONLY, m.protocol, states, RULES[4],
                                    family=m.family, params=m.params)
    return Verdict.negative(RULES[4], "not projectively separable and matches neither family")


def classify_three(states, tol=1e-9, starts=None):
    states = _checked(states, 3, tol)
    tree = lpcc_decidable_2x3(states)
    if tree is not None:
        return Verdict.positive(Status.LPCC_DISTINGUISHABLE, tree, states, RULES[3])
    m = match_family_thm7(states)
    if m is not None:
        return Verdict.positive(Status.LOCC_ONLY, m.protocol, states, RULES[3],
                                family=m.family, params=m.params)
    kw = {} if starts is None else {"starts": starts}
    sol = three_state_povm_solver(states, **kw)
    if sol is not None:
        return Verdict.positive(Status.LOCC_ONLY, sol.protocol, states, RULES[3],
                                solver=sol.state)
    return Verdict.negative(RULES[3], "no POVM found within the search budget", Status.UNDECIDED)


CLASSIFIERS = {2: classify_two, 3: classify_three, 4: classify_four, 5: classify_five, 6: classify_six}


def classify(states, tol=1e-9):
    states = as_state_set(states)
    fn = CLASSIFIERS.get(len(states))
    if fn is None:
        raise ClassificationError(f"no classifier for {len(states)} states (supported: 2-6)")
    return fn(states, tol)
