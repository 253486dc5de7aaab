import numpy as np
import pytest

from locc23.measurements import (
    LocalPOVM,
    MeasurementError,
    Party,
    apply_matrix,
    as_party,
    basis_measurement,
    is_projective,
    projective,
    validate_povm,
)


def test_party_parsing():
    assert as_party("alice") is Party.ALICE
    assert as_party("B") is Party.BOB
    assert Party.ALICE.other is Party.BOB
    with pytest.raises(ValueError):
        as_party("carol")


def test_incomplete_povm_reported():
    p = LocalPOVM(Party.BOB, [np.diag([1, 1, 0])])
    problems = validate_povm(p)
    assert problems and problems[0].check == "completeness"


def test_nonprojective_povm():
    k = 0.5
    m1 = np.diag([1, 1, np.sqrt(k)])
    m2 = np.diag([0, 0, np.sqrt(1 - k)])
    p = LocalPOVM(Party.BOB, [m1, m2])
    assert validate_povm(p) == []
    assert not is_projective(p)


def test_projective_rejects_overlapping_projectors():
    with pytest.raises(MeasurementError):
        projective(Party.ALICE, [np.eye(2), np.eye(2)])


def test_basis_measurement_and_action():
    m = basis_measurement(Party.ALICE, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    assert is_projective(m)
    c = np.arange(6).reshape(2, 3).astype(complex)
    out = apply_matrix(m.elements[0], Party.ALICE, c)
    assert np.allclose(out, m.elements[0] @ c)
    out = apply_matrix(np.eye(3)[::-1], Party.BOB, c)
    assert np.allclose(out, c @ np.eye(3)[::-1].T)


def test_mismatched_shapes():
    with pytest.raises(MeasurementError):
        LocalPOVM(Party.ALICE, [np.eye(2), np.eye(3)])
