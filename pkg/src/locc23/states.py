"""Bipartite pure states stored as coefficient matrices.

A state sum_ij c_ij |i>_A |j>_B is the dimA x dimB matrix ``c``.  States
are kept unnormalized; every comparison below is scale invariant.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import ORTH_TOL, RANK_RTOL, as_mat, svd_singular_values


class StateError(ValueError):
    pass


def as_state(c):
    c = as_mat(c)
    return c


def norm(c):
    return float(np.linalg.norm(c))


def inner(c1, c2):
    """<psi_1|psi_2> for coefficient matrices."""
    return complex(np.vdot(c1, c2))


def product_state(a, b):
    return np.outer(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def schmidt_coefficients(c):
    return svd_singular_values(c)


def schmidt_rank(c, tol=RANK_RTOL):
    s = schmidt_coefficients(c)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def is_product(c, tol=RANK_RTOL):
    s = schmidt_coefficients(as_state(c))
    if s[0] == 0:
        raise StateError("the zero vector is not a state")
    return len(s) < 2 or s[1] < tol * s[0]


def product_factors(c):
    """Local factors (a, b) of a product state, with ||a|| = 1."""
    u, s, vh = np.linalg.svd(as_state(c))
    return u[:, 0], s[0] * vh[0]


@dataclass
class StateSet:
    """An ordered list of bipartite states sharing local dimensions."""

    states: np.ndarray
    labels: list = field(default=None)

    def __post_init__(self):
        arr = np.asarray(self.states, dtype=np.complex128)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[0] == 0:
            raise StateError(f"expected a stack of coefficient matrices, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise StateError("non-finite coefficients")
        self.states = arr
        if self.labels is not None and len(self.labels) != len(arr):
            raise StateError("one label per state")

    @property
    def dims(self):
        return self.states.shape[1], self.states.shape[2]

    def __len__(self):
        return self.states.shape[0]

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def normalized(self):
        n = np.linalg.norm(self.states.reshape(len(self), -1), axis=1)
        if np.any(n == 0):
            raise StateError("set contains the zero vector")
        return StateSet(self.states / n[:, None, None], self.labels)

    def local_transform(self, ua, ub):
        """Apply U_A (x) U_B to every member."""
        return StateSet(np.einsum("ij,kjl,ml->kim", ua, self.states, ub), self.labels)

    def gram(self):
        flat = self.states.reshape(len(self), -1)
        return flat.conj() @ flat.T


def as_state_set(obj):
    if isinstance(obj, StateSet):
        return obj
    return StateSet(obj)


def pairwise_orthogonal(states, tol=ORTH_TOL):
    """(True, None) if every pair is orthogonal, else (False, (k, l))."""
    states = as_state_set(states)
    g = states.gram()
    n = np.sqrt(np.abs(np.diag(g)))
    for k in range(len(states)):
        for l in range(k + 1, len(states)):
            if abs(g[k, l]) >= tol * n[k] * n[l] or n[k] == 0 or n[l] == 0:
                return False, (k, l)
    return True, None


def count_entangled(states, tol=RANK_RTOL):
    return sum(not is_product(c, tol) for c in as_state_set(states))


def count_product(states, tol=RANK_RTOL):
    return len(as_state_set(states)) - count_entangled(states, tol)


@dataclass(frozen=True)
class AliceBasis:
    """Qubit basis |0'> = a|0> + b|1>, |1'> = -b*|0> + a*|1>."""

    a: complex
    b: complex

    def __post_init__(self):
        if abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1) > 1e-9:
            raise StateError("|a|^2 + |b|^2 must be 1")

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=np.complex128)
        v = v / np.linalg.norm(v)
        return cls(complex(v[0]), complex(v[1]))

    @property
    def zero(self):
        return np.array([self.a, self.b], dtype=np.complex128)

    @property
    def one(self):
        return np.array([-np.conj(self.b), np.conj(self.a)], dtype=np.complex128)

    def unitary(self):
        """Columns are |0'> and |1'>."""
        return np.column_stack([self.zero, self.one])


COMPUTATIONAL = AliceBasis(1, 0)


def split_by_alice_basis(c, basis):
    """Return (eta, xi) with c = |0'>|eta> + |1'>|xi>."""
    c = as_state(c)
    if c.shape[0] != 2:
        raise StateError("Alice must hold a qubit")
    a, b = basis.a, basis.b
    eta = np.conj(a) * c[0] + np.conj(b) * c[1]
    xi = -b * c[0] + a * c[1]
    return eta, xi
