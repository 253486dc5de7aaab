import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locc23.linalg import (
    as_mat,
    as_vec,
    dual_basis,
    ket,
    numerical_rank,
    normalize,
    orthonormal_complement,
    projector,
    same_ray,
    span_basis,
)

complexes = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


def test_ket_and_normalize():
    assert np.allclose(ket(1, 3), [0, 1, 0])
    v = normalize([3, 4j])
    assert np.isclose(np.linalg.norm(v), 1)
    with pytest.raises(ValueError):
        normalize([0, 0])


def test_as_vec_rejects_bad_shapes():
    with pytest.raises(ValueError):
        as_vec(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        as_mat(np.zeros(3))


def test_rank_and_span():
    a = np.array([[1, 2], [2, 4]], dtype=complex)
    assert numerical_rank(a) == 1
    b = span_basis([[1, 0, 0], [2, 0, 0], [0, 1j, 0]])
    assert b.shape[1] == 2
    assert np.allclose(b.conj().T @ b, np.eye(2))


def test_complement_is_orthogonal():
    comp = orthonormal_complement([[1, 1j, 0]], 3)
    m = np.column_stack([np.array([1, 1j, 0]) / np.sqrt(2)] + list(comp))
    assert np.allclose(m.conj().T @ m, np.eye(3))


def test_dual_basis_pairs_up():
    vs = [np.array([1, 1, 0]), np.array([0, 1, 1j]), np.array([1, 0, 2])]
    ds = dual_basis(vs)
    g = np.array([[np.vdot(d, v) for v in vs] for d in ds])
    assert np.allclose(g, np.eye(3))


def test_projector_idempotent():
    p = projector([[1, 1j, 0], [0, 0, 1]])
    assert np.allclose(p @ p, p)
    assert np.isclose(np.trace(p).real, 2)


@settings(max_examples=50, deadline=None)
@given(st.lists(complexes, min_size=3, max_size=3), st.floats(0, 2 * np.pi))
def test_same_ray_ignores_phase(v, phi):
    v = np.array(v)
    if np.linalg.norm(v) < 1e-3:
        return
    assert same_ray(v, np.exp(1j * phi) * v)
