import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locc23.classifiers import (
    ClassificationError,
    Status,
    classify,
    classify_four,
    classify_three,
    classify_two,
    lpcc_decidable_2x3,
    match_family_thm5,
    match_family_thm6,
    match_family_thm7,
    three_state_povm_solver,
    walgate_hardy_alice_first,
)
from locc23.classifiers.alice_first import bloch_to_vector, unit_bloch_solutions, vector_to_bloch
from locc23.families import gen_thm7_family, sample_thm7_params
from locc23.protocol import verify_perfect_discrimination
from locc23.search import random_orthogonal_set
from locc23.states import StateSet

from helpers import random_local_unitaries


def test_bloch_roundtrip():
    n = np.array([0.3, -0.4, np.sqrt(1 - 0.25)])
    assert np.allclose(vector_to_bloch(bloch_to_vector(n)), n)


def test_unit_bloch_solutions_plane():
    # n_z = 0.5 meets the sphere in a circle: every returned point is a solution
    sols = unit_bloch_solutions(np.array([[0.0, 0, 1]]), np.array([0.5]))
    assert sols
    for n in sols:
        assert abs(np.linalg.norm(n) - 1) < 1e-9 and abs(n[2] - 0.5) < 1e-9
    assert unit_bloch_solutions(np.array([[0.0, 0, 1]]), np.array([2.0])) == []


def test_alice_first_profile_is_found():
    for seed in range(20):
        s = random_orthogonal_set(2, 3, 3 + seed % 2, "alice-first", seed=seed)
        tree = walgate_hardy_alice_first(s)
        assert tree is not None and verify_perfect_discrimination(tree, s).perfect


def test_two_states_always_distinguishable():
    for seed in range(10):
        v = classify_two(random_orthogonal_set(2, 3, 2, "generic", seed=seed))
        assert v.status is Status.LPCC_DISTINGUISHABLE
        assert v.rounds == 2


def test_two_states_in_qubit_by_qudit():
    rng = np.random.default_rng(0)
    z = rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2))
    q, _ = np.linalg.qr(z)
    s = StateSet(q.T.reshape(2, 2, 4))
    assert classify(s).status is Status.LPCC_DISTINGUISHABLE


def test_fixtures_are_locc_only(fixtures):
    for name, f in fixtures.items():
        assert lpcc_decidable_2x3(f.states) is None
        v = classify(f.states)
        assert v.status is Status.LOCC_ONLY, name
        assert verify_perfect_discrimination(v.protocol, f.states).perfect


def test_each_matcher_accepts_only_its_family(fixtures):
    assert match_family_thm5(fixtures["thm5"].states) is not None
    assert match_family_thm5(fixtures["thm6"].states) is None
    assert match_family_thm6(fixtures["thm6"].states) is not None
    assert match_family_thm6(fixtures["thm5"].states) is None
    assert match_family_thm7(fixtures["thm7"].states) is not None


def test_matcher_recovers_rotated_permuted_members():
    rng = np.random.default_rng(11)
    for seed in range(5):
        states, _ = gen_thm7_family(sample_thm7_params(seed))
        ua, ub = random_local_unitaries(rng)
        perm = rng.permutation(3)
        moved = StateSet(states.local_transform(ua, ub).states[perm])
        m = match_family_thm7(moved)
        assert m is not None
        assert verify_perfect_discrimination(m.protocol, moved).perfect


def test_three_state_solver_on_rotated_fixture(fixtures):
    rng = np.random.default_rng(5)
    ua, ub = random_local_unitaries(rng)
    moved = fixtures["thm7"].states.local_transform(ua, ub)
    sol = three_state_povm_solver(moved)
    assert sol is not None
    assert verify_perfect_discrimination(sol.protocol, moved).perfect
    assert abs(abs(sol.state.a) ** 2 + abs(sol.state.b) ** 2 - 1) < 1e-9


def test_three_lpcc_sets():
    for seed in range(5):
        s = random_orthogonal_set(2, 3, 3, "all-product", seed=seed)
        assert classify_three(s).status is Status.LPCC_DISTINGUISHABLE


def test_four_entangled_states_indistinguishable():
    v = classify_four(random_orthogonal_set(2, 3, 4, "generic", seed=0))
    assert v.status is Status.LOCC_INDISTINGUISHABLE
    assert v.protocol is None


def test_five_and_six_state_rules():
    for seed in range(6):
        assert classify(random_orthogonal_set(2, 3, 5, "one-entangled", seed=seed)).status.distinguishable
        assert classify(random_orthogonal_set(2, 3, 5, "two-entangled", seed=seed)).status \
            is Status.LOCC_INDISTINGUISHABLE
        assert classify(random_orthogonal_set(2, 3, 6, "all-product", seed=seed)).status \
            is Status.LPCC_DISTINGUISHABLE
        assert classify(random_orthogonal_set(2, 3, 6, "two-entangled", seed=seed)).status \
            is Status.LOCC_INDISTINGUISHABLE


def test_classify_input_errors():
    with pytest.raises(ClassificationError, match="not orthogonal"):
        classify(StateSet([np.outer([1, 0], [1, 0, 0])] * 3))
    with pytest.raises(ClassificationError):
        classify(random_orthogonal_set(3, 3, 4, "generic", seed=0))
    with pytest.raises(ClassificationError):
        classify(StateSet(np.eye(6).reshape(6, 2, 3)[:1]))


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from(["thm5", "thm6", "thm7"]))
def test_status_invariant_under_local_unitaries(fixtures, seed, name):
    rng = np.random.default_rng(seed)
    ua, ub = random_local_unitaries(rng)
    f = fixtures[name]
    v = classify(f.states.local_transform(ua, ub))
    assert v.status is Status.LOCC_ONLY
