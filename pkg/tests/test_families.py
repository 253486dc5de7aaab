import numpy as np
import pytest

from locc23.families import (
    FamilyConstraintError,
    MultiroundSpec,
    Thm5Params,
    Thm6Params,
    Thm7Params,
    canonical_multiround_protocol,
    gen_multiround,
    gen_thm5_family,
    gen_thm6_family,
    gen_thm7_family,
    perp,
    sample_thm5_params,
    sample_thm6_params,
    sample_thm7_params,
    thm5_paper_params,
    thm6_paper_params,
    thm7_paper_params,
)
from locc23.measurements import is_projective
from locc23.protocol import count_rounds, iter_nodes, verify_perfect_discrimination
from locc23.states import count_entangled, pairwise_orthogonal


def test_perp_is_orthogonal():
    a = np.array([0.6, 0.8j])
    assert abs(np.vdot(a, perp(a))) < 1e-15


def test_thm5_reference_instance():
    p = thm5_paper_params()
    assert abs(p.validate() - 0.5) < 1e-12
    states, tree = gen_thm5_family(p)
    assert count_entangled(states) == 2
    assert count_rounds(tree) == 3
    root = tree.root.measurement
    assert not is_projective(root)
    # diag(1, 1, sqrt(k)) and its complement
    assert np.allclose(root.elements[0], np.diag([1, 1, np.sqrt(0.5)]))


def test_thm6_reference_instance():
    p = thm6_paper_params()
    assert abs(p.validate() - 0.5) < 1e-9
    states, tree = gen_thm6_family(p)
    assert verify_perfect_discrimination(tree, states).perfect


def test_thm7_reference_instance():
    p = thm7_paper_params()
    assert max(abs(s) for s in p.constraint_sums()) < 1e-12
    states, tree = gen_thm7_family(p)
    assert len(states) == 3
    assert verify_perfect_discrimination(tree, states).perfect


def test_thm5_rejects_k_outside_unit_interval():
    # a1*conj(a2) = -b1*conj(b2) gives k = 1
    with pytest.raises(FamilyConstraintError, match="k"):
        Thm5Params(1, 1, 1, -1, -1, 1, 1, 1, alpha=[0, 1]).validate()


def test_thm5_rejects_broken_orthogonality():
    with pytest.raises(FamilyConstraintError, match="a1"):
        Thm5Params(1, 1, 1, -2, 1, -2, 1, -1, alpha=[0, 1]).validate()


def test_thm6_rejects_computational_alpha():
    with pytest.raises(FamilyConstraintError):
        Thm6Params(1, 1, 1, 1, 1, 1, alpha=[0, 1]).validate()


def test_thm7_detects_nonzero_sum():
    p = thm7_paper_params()
    bad = Thm7Params(p.a + np.array([0, 0, 0.5, 0, 0]), p.b, p.alpha, p.beta)
    with pytest.raises(FamilyConstraintError):
        bad.validate()


@pytest.mark.parametrize("sampler,gen", [
    (sample_thm5_params, gen_thm5_family),
    (sample_thm6_params, gen_thm6_family),
    (sample_thm7_params, gen_thm7_family),
])
def test_random_members_verify(sampler, gen):
    for seed in range(10):
        states, tree = gen(sampler(seed))
        assert pairwise_orthogonal(states)[0]
        assert verify_perfect_discrimination(tree, states).perfect


@pytest.mark.parametrize("n", [2, 3, 4])
def test_multiround_counts(n):
    states = gen_multiround(n)
    assert len(states) == n * n - 2 * n + 3
    assert pairwise_orthogonal(states, 1e-10)[0]
    tree = canonical_multiround_protocol(n)
    assert count_rounds(tree) == 2 * n - 2
    assert all(is_projective(node.measurement) for node in iter_nodes(tree.root))


def test_multiround_spec_margins_positive():
    for n in range(2, 6):
        spec = MultiroundSpec.default(n)
        spec.validate()
        assert min(spec.margins().values()) > 1e-3


def test_multiround_spec_wrong_n():
    with pytest.raises(ValueError):
        gen_multiround(3, MultiroundSpec.default(2))
