"""Local Kraus operators, POVMs and projective measurements."""

import enum
from dataclasses import dataclass

import numpy as np

from .linalg import ORTH_TOL, as_mat


class Party(str, enum.Enum):
    ALICE = "A"
    BOB = "B"

    @property
    def other(self):
        return Party.BOB if self is Party.ALICE else Party.ALICE

    @property
    def axis(self):
        return 0 if self is Party.ALICE else 1


def as_party(p):
    if isinstance(p, Party):
        return p
    p = str(p).upper()
    if p in ("A", "ALICE"):
        return Party.ALICE
    if p in ("B", "BOB"):
        return Party.BOB
    raise ValueError(f"unknown party {p!r}")


class MeasurementError(ValueError):
    pass


@dataclass(frozen=True)
class LocalKraus:
    party: Party
    M: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "party", as_party(self.party))
        object.__setattr__(self, "M", as_mat(self.M))
        if self.M.shape[0] != self.M.shape[1]:
            raise MeasurementError("Kraus operators are square in this package")

    @property
    def effect(self):
        return self.M.conj().T @ self.M


@dataclass(frozen=True)
class Violation:
    element: int  # -1 for the completeness check
    check: str
    residual: float


class LocalPOVM:
    """Finite list of Kraus matrices on one party with sum M^dag M = I."""

    def __init__(self, party, elements):
        self.party = as_party(party)
        self.elements = tuple(as_mat(m) for m in elements)
        if not self.elements:
            raise MeasurementError("a measurement needs at least one outcome")
        d = self.elements[0].shape[0]
        for m in self.elements:
            if m.shape != (d, d):
                raise MeasurementError("all Kraus operators must share one square shape")

    @property
    def dim(self):
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    def effects(self):
        return [m.conj().T @ m for m in self.elements]

    def kraus(self, i):
        return LocalKraus(self.party, self.elements[i])

    def conjugated(self, u):
        """Same measurement expressed after the local change of frame u."""
        return type(self)(self.party, [u @ m @ u.conj().T for m in self.elements])

    def __repr__(self):
        return f"{type(self).__name__}(party={self.party.value}, outcomes={len(self)}, dim={self.dim})"


class ProjectiveMeasurement(LocalPOVM):
    """POVM whose Kraus operators are orthogonal projectors."""

    def __init__(self, party, projectors, tol=ORTH_TOL):
        super().__init__(party, projectors)
        problems = validate_povm(self, tol)
        if problems:
            raise MeasurementError(f"not a complete measurement: {problems[0]}")
        if not is_projective(self, tol):
            raise MeasurementError("elements are not mutually orthogonal projectors")

    @property
    def projectors(self):
        return self.elements


def validate_povm(p, tol=ORTH_TOL):
    """Empty list when p is a valid POVM, otherwise the violations found."""
    out = []
    total = np.zeros((p.dim, p.dim), dtype=np.complex128)
    for i, e in enumerate(p.effects()):
        total += e
        lo = float(np.linalg.eigvalsh((e + e.conj().T) / 2)[0])
        if lo < -tol:
            out.append(Violation(i, "positivity", -lo))
    r = float(np.linalg.norm(total - np.eye(p.dim), 2))
    if r > tol:
        out.append(Violation(-1, "completeness", r))
    return out


def is_projective(p, tol=ORTH_TOL):
    effects = p.effects()
    for e in effects:
        if np.linalg.norm(e @ e - e) > tol:
            return False
    for i in range(len(effects)):
        for j in range(i + 1, len(effects)):
            if np.linalg.norm(effects[i] @ effects[j]) > tol:
                return False
    return True


def apply_matrix(m, party, c):
    """(M (x) I) c or (I (x) M) c on a coefficient matrix (or a stack of them)."""
    if as_party(party) is Party.ALICE:
        return np.matmul(m, c)
    return np.matmul(c, m.T)


def apply_local_kraus(k, c):
    c = np.asarray(c, dtype=np.complex128)
    d = c.shape[-2] if k.party is Party.ALICE else c.shape[-1]
    if k.M.shape[0] != d:
        raise MeasurementError(
            f"{k.party.name} operator of size {k.M.shape[0]} on a state with local dimension {d}"
        )
    return apply_matrix(k.M, k.party, c)


def projective(party, projectors, tol=ORTH_TOL):
    return ProjectiveMeasurement(party, projectors, tol)


def basis_measurement(party, vectors, tol=ORTH_TOL):
    """Rank-1 projective measurement onto an orthonormal basis."""
    return ProjectiveMeasurement(party, [np.outer(v, np.conj(v)) for v in vectors], tol)
