import numpy as np
import pytest

from locc23.measurements import Party, basis_measurement
from locc23.protocol import (
    Leaf,
    Node,
    ProtocolError,
    ProtocolTree,
    count_rounds,
    identification,
    identify_after,
    simulate_run,
    transform_protocol,
    verify_perfect_discrimination,
)
from locc23.search import random_orthogonal_set
from locc23.states import StateSet

from helpers import random_local_unitaries


def _computational_basis_protocol():
    states = StateSet([np.outer(np.eye(2)[a], np.eye(3)[b]) for a in range(2) for b in range(3)])
    alice = basis_measurement(Party.ALICE, np.eye(2))
    tree = ProtocolTree(identify_after(alice, states.states, Party.BOB), (2, 3))
    return states, tree


def test_product_basis_two_rounds():
    states, tree = _computational_basis_protocol()
    rep = verify_perfect_discrimination(tree, states)
    assert rep.perfect
    assert np.allclose(rep.success, 1)
    assert count_rounds(tree) == 2


def test_wrong_claim_is_caught():
    states, tree = _computational_basis_protocol()
    tree.root.children[0].children[0].claim = 1
    rep = verify_perfect_discrimination(tree, states)
    assert not rep.perfect
    assert rep.failing_leaf == (0, 0)


def test_dims_mismatch_raises():
    states, tree = _computational_basis_protocol()
    with pytest.raises(ProtocolError):
        verify_perfect_discrimination(tree, StateSet(np.zeros((1, 3, 3)) + 1))


def test_node_child_count_checked():
    m = basis_measurement(Party.ALICE, np.eye(2))
    with pytest.raises(ProtocolError):
        Node(m, [Leaf(0)])


def test_identification_single_state_is_leaf():
    branch = np.zeros((3, 2, 3), dtype=complex)
    branch[1] = np.outer([1, 0], [0, 1, 0])
    assert identification(Party.BOB, branch) == Leaf(1)


def test_simulate_run_agrees_with_claims():
    states, tree = _computational_basis_protocol()
    for i, c in enumerate(states):
        claim, path = simulate_run(tree, c, rng_seed=i)
        assert claim == i and len(path) == 2


def test_fixture_protocols_verify(fixtures):
    for f in fixtures.values():
        assert verify_perfect_discrimination(f.protocol, f.states).perfect
        assert count_rounds(f.protocol) == 3


def test_transform_protocol_tracks_local_unitaries(fixtures):
    rng = np.random.default_rng(3)
    for f in fixtures.values():
        ua, ub = random_local_unitaries(rng)
        moved = f.states.local_transform(ua, ub)
        assert verify_perfect_discrimination(transform_protocol(f.protocol, ua, ub), moved).perfect
        assert count_rounds(transform_protocol(f.protocol, ua, ub)) == 3


def test_random_product_sets_have_verified_protocols():
    from locc23.classifiers import lpcc_decidable_2x3

    for seed in range(10):
        s = random_orthogonal_set(2, 3, 6, "all-product", seed=seed)
        tree = lpcc_decidable_2x3(s)
        assert tree is not None and verify_perfect_discrimination(tree, s).perfect
