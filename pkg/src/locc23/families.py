"""Explicit state families with their discrimination protocols.

Three parametrized 2x3 families that LOCC distinguishes only with a
non-projective first measurement by Bob, and an n x n construction whose
canonical protocol needs 2n-2 rounds.  Every generator validates its
parameters, builds the protocol and verifies it before returning.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import ket, orthonormal_complement, same_ray
from .measurements import LocalPOVM, Party, basis_measurement, projective
from .protocol import (
    Leaf,
    ProtocolTree,
    identification,
    identify_after,
    measure_then,
    verify_perfect_discrimination,
)
from .states import StateSet, pairwise_orthogonal

CONSTRAINT_TOL = 1e-9
INTERVAL_MARGIN = 1e-9
SAMPLE_EPS = 0.05


class FamilyConstraintError(ValueError):
    """A family parameter set violates one of its defining relations."""

    def __init__(self, equation, value=None):
        self.equation = equation
        self.value = value
        msg = f"constraint violated: {equation}"
        if value is not None:
            msg += f" (got {value:.3g})" if np.isscalar(value) else f" (got {value})"
        super().__init__(msg)


def _c(x):
    return complex(x)


def _qubit(v):
    v = np.asarray(v, dtype=np.complex128).ravel()
    if v.shape != (2,) or np.linalg.norm(v) == 0:
        raise FamilyConstraintError("alpha must be a nonzero qubit vector")
    return v / np.linalg.norm(v)


def perp(v):
    """The qubit vector orthogonal to v, (conj v1, -conj v0)."""
    return np.array([np.conj(v[1]), -np.conj(v[0])])


def _zero(value, scale, equation):
    if abs(value) > CONSTRAINT_TOL * max(scale, 1e-300):
        raise FamilyConstraintError(equation, abs(value))


def _nonzero(value, scale, equation, margin=CONSTRAINT_TOL):
    if abs(value) <= margin * max(scale, 1e-300):
        raise FamilyConstraintError(equation, abs(value))


def _unit_interval(x, name):
    """Real part of x after checking it is real and strictly inside (0, 1)."""
    if abs(np.imag(x)) > CONSTRAINT_TOL * max(1.0, abs(x)):
        raise FamilyConstraintError(f"{name} is real", float(abs(np.imag(x))))
    x = float(np.real(x))
    if not INTERVAL_MARGIN < x < 1 - INTERVAL_MARGIN:
        raise FamilyConstraintError(f"0 < {name} < 1", x)
    return x


def _embed(v, n=3):
    out = np.zeros(n, dtype=np.complex128)
    out[: len(v)] = v
    return out


def _two_outcome_bob(diag1, diag2):
    return LocalPOVM(Party.BOB, [np.diag(diag1), np.diag(diag2)])


def _checked(states, root, what):
    states = StateSet(states)
    ok, pair = pairwise_orthogonal(states, 1e-10)
    if not ok:
        raise FamilyConstraintError(f"{what}: states {pair} orthogonal")
    tree = ProtocolTree(root, states.dims)
    rep = verify_perfect_discrimination(tree, states)
    if not rep.perfect:
        raise FamilyConstraintError(f"{what}: protocol verification ({rep.reason})")
    return states, tree


def _rand_c(rng, size=None):
    return rng.uniform(-2, 2, size) + 1j * rng.uniform(-2, 2, size)


def _rand_qubit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


# --- first four-state family ------------------------------------------------


@dataclass
class Thm5Params:
    """|0>|0>, |1>|alpha>, |0>(a|1>+b|2>) + |1>(c|alpha_perp>+d|2>) twice."""

    a1: complex
    b1: complex
    c1: complex
    d1: complex
    a2: complex
    b2: complex
    c2: complex
    d2: complex
    alpha: np.ndarray = field(default_factory=lambda: np.array([0, 1], dtype=np.complex128))

    def __post_init__(self):
        for name in ("a1", "b1", "c1", "d1", "a2", "b2", "c2", "d2"):
            setattr(self, name, _c(getattr(self, name)))
        self.alpha = _qubit(self.alpha)

    @property
    def k(self):
        den = self.b1 * np.conj(self.b2)
        if den == 0:
            raise FamilyConstraintError("b1*conj(b2) != 0")
        return -self.a1 * np.conj(self.a2) / den

    def validate(self):
        a1, b1, c1, d1, a2, b2, c2, d2 = (
            self.a1, self.b1, self.c1, self.d1, self.a2, self.b2, self.c2, self.d2
        )
        if same_ray(self.alpha, [1, 0]):
            raise FamilyConstraintError("alpha != |0>")
        x, y = a1 * np.conj(a2), c1 * np.conj(c2)
        _zero(x + y, abs(x) + abs(y), "a1*conj(a2) + c1*conj(c2) = 0")
        x, y = b1 * np.conj(b2), d1 * np.conj(d2)
        _zero(x + y, abs(x) + abs(y), "b1*conj(b2) + d1*conj(d2) = 0")
        _nonzero(x, abs(b1) * abs(b2) + 1e-300, "b1*conj(b2) != 0")
        return _unit_interval(self.k, "k = -a1*conj(a2) / (b1*conj(b2))")


def _thm5_states(p):
    al = _embed(p.alpha)
    ap = _embed(perp(p.alpha))
    e0, e1, e2 = np.eye(3)
    out = [np.outer([1, 0], e0), np.outer([0, 1], al)]
    for a, b, c, d in ((p.a1, p.b1, p.c1, p.d1), (p.a2, p.b2, p.c2, p.d2)):
        out.append(np.outer([1, 0], a * e1 + b * e2) + np.outer([0, 1], c * ap + d * e2))
    return np.array(out)


def gen_thm5_family(p):
    """States and the three-round protocol (Bob POVM, Alice, Bob)."""
    k = p.validate()
    psi = _thm5_states(p)
    bob = _two_outcome_bob([1, 1, np.sqrt(k)], [0, 0, np.sqrt(1 - k)])
    alice = basis_measurement(Party.ALICE, np.eye(2))

    def follow(i, sub):
        if i == 0:
            return identify_after(alice, sub, Party.BOB)
        return identification(Party.ALICE, sub)

    return _checked(psi, measure_then(bob, psi, follow), "first four-state family")


def sample_thm5_params(rng):
    rng = np.random.default_rng(rng)
    while True:
        alpha = _rand_qubit(rng)
        if 1 - abs(alpha[0]) < SAMPLE_EPS:
            continue
        k = rng.uniform(SAMPLE_EPS, 1 - SAMPLE_EPS)
        a1, b1, c1, d1, a2 = _rand_c(rng, 5)
        if min(abs(a1), abs(b1), abs(c1), abs(d1), abs(a2)) < 0.1:
            continue
        x = a1 * np.conj(a2)
        c2 = np.conj(-x / c1)
        b2 = np.conj(-x / (k * b1))
        d2 = np.conj(x / (k * d1))
        p = Thm5Params(a1, b1, c1, d1, a2, b2, c2, d2, alpha)
        try:
            p.validate()
        except FamilyConstraintError:
            continue
        return p


# --- second four-state family -----------------------------------------------


@dataclass
class Thm6Params:
    """|0>|0>, |alpha>|1>, a|1>|0> + b|alpha_perp>|1> + c|x>|2> with x = |1>, |alpha_perp>."""

    a1: complex
    b1: complex
    c1: complex
    a2: complex
    b2: complex
    c2: complex
    alpha: np.ndarray = field(
        default_factory=lambda: np.array([1, 1], dtype=np.complex128) / np.sqrt(2)
    )

    def __post_init__(self):
        for name in ("a1", "b1", "c1", "a2", "b2", "c2"):
            setattr(self, name, _c(getattr(self, name)))
        self.alpha = _qubit(self.alpha)

    @property
    def overlap(self):
        """<alpha_perp|1>."""
        return complex(np.conj(perp(self.alpha)[1]))

    @property
    def k(self):
        den = self.c1 * np.conj(self.c2) * self.overlap
        if den == 0:
            raise FamilyConstraintError("c1*conj(c2)*<alpha_perp|1> != 0")
        return -self.a1 * np.conj(self.a2) / den

    def validate(self):
        if same_ray(self.alpha, [1, 0]) or same_ray(self.alpha, [0, 1]):
            raise FamilyConstraintError("alpha not in {|0>, |1>}")
        x = self.a1 * np.conj(self.a2)
        y = self.b1 * np.conj(self.b2)
        z = self.c1 * np.conj(self.c2) * self.overlap
        _zero(x + y + z, abs(x) + abs(y) + abs(z),
              "a1*conj(a2) + b1*conj(b2) + c1*conj(c2)*<alpha_perp|1> = 0")
        _nonzero(z, abs(self.c1) * abs(self.c2) + 1e-300, "c1*conj(c2)*<alpha_perp|1> != 0")
        return _unit_interval(self.k, "k = -a1*conj(a2) / (c1*conj(c2)*<alpha_perp|1>)")


def _thm6_states(p):
    al, ap = p.alpha, perp(p.alpha)
    e0, e1, e2 = np.eye(3)
    one = np.array([0, 1])
    return np.array([
        np.outer([1, 0], e0),
        np.outer(al, e1),
        p.a1 * np.outer(one, e0) + p.b1 * np.outer(ap, e1) + p.c1 * np.outer(one, e2),
        p.a2 * np.outer(one, e0) + p.b2 * np.outer(ap, e1) + p.c2 * np.outer(ap, e2),
    ])


def gen_thm6_family(p):
    """States and the protocol: Bob POVM, Alice in {0,1} or {alpha, alpha_perp}, Bob."""
    k = p.validate()
    psi = _thm6_states(p)
    bob = _two_outcome_bob([1, 0, np.sqrt(k)], [0, 1, np.sqrt(1 - k)])
    comp = basis_measurement(Party.ALICE, np.eye(2))
    tilted = basis_measurement(Party.ALICE, [p.alpha, perp(p.alpha)])

    def follow(i, sub):
        return identify_after(comp if i == 0 else tilted, sub, Party.BOB)

    return _checked(psi, measure_then(bob, psi, follow), "second four-state family")


def sample_thm6_params(rng):
    rng = np.random.default_rng(rng)
    while True:
        alpha = _rand_qubit(rng)
        if min(abs(alpha[0]), abs(alpha[1])) < 0.1:
            continue
        k = rng.uniform(SAMPLE_EPS, 1 - SAMPLE_EPS)
        a1, b1, c1, a2 = _rand_c(rng, 4)
        if min(abs(a1), abs(b1), abs(c1), abs(a2)) < 0.1:
            continue
        ov = np.conj(perp(alpha)[1])
        x = a1 * np.conj(a2)
        c2 = np.conj(-x / (k * c1 * ov))
        b2 = np.conj(x * (1 / k - 1) / b1)
        p = Thm6Params(a1, b1, c1, a2, b2, c2, alpha)
        try:
            p.validate()
        except FamilyConstraintError:
            continue
        return p


# --- three-state family -----------------------------------------------------


@dataclass
class Thm7Params:
    """|0>|0> and |0>(x1|1>+x2|2>) + |1>(x3|0>+x4|1>+x5|2>) for x = a, b."""

    a: np.ndarray
    b: np.ndarray
    alpha: float
    beta: float

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.complex128).ravel()
        self.b = np.asarray(self.b, dtype=np.complex128).ravel()
        if self.a.shape != (5,) or self.b.shape != (5,):
            raise FamilyConstraintError("five coefficients a_i and b_i")

    def eta(self, x):
        return np.array([0, x[0], x[1]])

    def xi(self, x):
        return np.array([x[2], x[3], x[4]])

    def constraint_sums(self):
        a, b, al, be = self.a, self.b, self.alpha, self.beta
        t = a * np.conj(b)
        return (
            complex(t.sum()),
            complex(al * t[0] + be * t[1]),
            complex(t[2] + al * t[3] + be * t[4]),
        )

    def validate(self, margin=CONSTRAINT_TOL):
        """Check every relation; ``margin`` is the relative size required of the != 0 ones."""
        _unit_interval(self.alpha, "alpha")
        _unit_interval(self.beta, "beta")
        a, b = self.a, self.b
        t = np.abs(a * np.conj(b))
        s0, s1, s2 = self.constraint_sums()
        _zero(s0, t.sum(), "sum_i a_i*conj(b_i) = 0")
        _zero(s1, t[0] + t[1], "alpha*a1*conj(b1) + beta*a2*conj(b2) = 0")
        _zero(s2, t[2] + t[3] + t[4], "a3*conj(b3) + alpha*a4*conj(b4) + beta*a5*conj(b5) = 0")
        e2, e3, x2, x3 = self.eta(a), self.eta(b), self.xi(a), self.xi(b)
        n = np.linalg.norm
        _nonzero(np.vdot(e2, e3), n(e2) * n(e3), "<eta2|eta3> != 0", margin)
        _nonzero(np.vdot(x2, x3), n(x2) * n(x3), "<xi2|xi3> != 0", margin)
        # scale-correct forms of the two mixed conditions
        m2 = n(e2) ** 2 * np.vdot(e2, e3) + np.vdot(x2, e2) * np.vdot(e2, x3)
        _nonzero(m2, n(e2) ** 2 * (n(e2) * n(e3) + n(x2) * n(x3)),
                 "|eta2|^2 <eta2|eta3> + <xi2|eta2><eta2|xi3> != 0", margin)
        m3 = n(e3) ** 2 * np.vdot(e2, e3) + np.vdot(x2, e3) * np.vdot(e3, x3)
        _nonzero(m3, n(e3) ** 2 * (n(e2) * n(e3) + n(x2) * n(x3)),
                 "|eta3|^2 <eta2|eta3> + <xi2|eta3><eta3|xi3> != 0", margin)
        if same_ray(e2, e3, margin):
            raise FamilyConstraintError("|eta2> != |eta3>")
        _nonzero(a[2] * np.conj(b[2]), abs(a[2]) * abs(b[2]) + 1e-300, "a3*conj(b3) != 0", margin)
        return self.alpha, self.beta


def _thm7_states(p):
    out = [np.outer([1, 0], [1, 0, 0])]
    for x in (p.a, p.b):
        out.append(np.outer([1, 0], p.eta(x)) + np.outer([0, 1], p.xi(x)))
    return np.array(out)


def gen_thm7_family(p):
    """States and the protocol: Bob POVM, then Alice, then Bob."""
    from .classifiers.alice_first import alice_first_node

    al, be = p.validate()
    psi = _thm7_states(p)
    bob = _two_outcome_bob([1, np.sqrt(al), np.sqrt(be)], [0, np.sqrt(1 - al), np.sqrt(1 - be)])
    comp = basis_measurement(Party.ALICE, np.eye(2))

    def follow(i, sub):
        if i == 0:
            return identify_after(comp, sub, Party.BOB)
        node = alice_first_node(sub)
        if node is None:
            raise FamilyConstraintError("second branch: no Alice basis separates the two states")
        return node

    return _checked(psi, measure_then(bob, psi, follow), "three-state family")


def sample_thm7_params(rng, margin=1e-2):
    rng = np.random.default_rng(rng)
    while True:
        al, be = rng.uniform(SAMPLE_EPS, 1 - SAMPLE_EPS, 2)
        a = _rand_c(rng, 5)
        rows = np.array([a, [al * a[0], be * a[1], 0, 0, 0], [0, 0, a[2], al * a[3], be * a[4]]])
        _, s, vh = np.linalg.svd(rows)
        null = vh[3:].conj().T  # rows @ null = 0
        cb = null @ _rand_c(rng, 2)  # conj(b)
        b = np.conj(cb)
        b = b * 2 / np.abs(b).max()
        p = Thm7Params(a, b, al, be)
        try:
            p.validate(margin)
        except FamilyConstraintError:
            continue
        return p


# --- multi-round construction -----------------------------------------------

MARGIN = 1e-3
DEFAULT_ANGLE = 0.3


def rotation_basis(offset, n, angle=DEFAULT_ANGLE):
    """Orthonormal basis of span{|offset>, ..., |n-1>}.

    Consecutive-plane Givens rotations, plane j turned by angle*(j+1),
    applied to the standard vectors; this keeps every overlap used by the
    construction away from zero for small n.
    """
    d = n - offset
    r = np.eye(d)
    for j in range(d - 1):
        c, s = np.cos(angle * (j + 1)), np.sin(angle * (j + 1))
        g = np.eye(d)
        g[j, j], g[j, j + 1], g[j + 1, j], g[j + 1, j + 1] = c, -s, s, c
        r = g @ r
    out = []
    for i in range(d):
        v = np.zeros(n, dtype=np.complex128)
        v[offset:] = r[:, i]
        out.append(v)
    return out


@dataclass
class MultiroundSpec:
    """Complement bases for the n x n construction.

    ``eta_bases[k]`` spans the complement of span{|0>..|k-1>} (k = 0..n-2)
    and ``alpha_bases[l]`` the complement of span{|0>..|l>} (l = 0..n-2).
    """

    n: int
    eta_bases: list
    alpha_bases: list

    @property
    def m(self):
        return self.n

    @classmethod
    def default(cls, n, angle=DEFAULT_ANGLE):
        if n < 2:
            raise ValueError("n >= 2")
        eta = [rotation_basis(k, n, angle) for k in range(n - 1)]
        alpha = [rotation_basis(l + 1, n, angle) for l in range(n - 1)]
        return cls(n, eta, alpha)

    def margins(self):
        """Name -> |overlap| for every non-orthogonality condition."""
        n, eta, al = self.n, self.eta_bases, self.alpha_bases
        out = {}
        for k in range(n - 1):
            for l in range(k + 1, n - 1):
                out[f"<eta_{k}1|eta_{l}1>"] = abs(np.vdot(eta[k][1], eta[l][1]))
        for k in range(n - 2):
            for l in range(k + 1, n - 2):
                out[f"<alpha_{k}1|alpha_{l}1>"] = abs(np.vdot(al[k][1], al[l][1]))
        for k in range(n - 1):
            for i in range(k, n):
                out[f"<eta_{k}0|{i}>"] = abs(eta[k][0][i])
        for l in range(n - 1):
            for j in range(l + 1, n):
                out[f"<alpha_{l}0|{j}>"] = abs(al[l][0][j])
        return out

    def validate(self):
        n = self.n
        if len(self.eta_bases) != n - 1 or len(self.alpha_bases) != n - 1:
            raise FamilyConstraintError("one eta and one alpha basis per level 0..n-2")
        for name, bases, shift in (("eta", self.eta_bases, 0), ("alpha", self.alpha_bases, 1)):
            for k, basis in enumerate(bases):
                q = np.array(basis).T
                lo = k + shift
                if q.shape != (n, n - lo):
                    raise FamilyConstraintError(f"{name}_{k} has {n - lo} vectors of length {n}")
                if np.abs(q.conj().T @ q - np.eye(n - lo)).max() > 1e-10:
                    raise FamilyConstraintError(f"{name}_{k} orthonormal")
                if np.abs(q[:lo]).max(initial=0) > 1e-10:
                    raise FamilyConstraintError(f"{name}_{k} orthogonal to |0>..|{lo - 1}>")
        for name, v in self.margins().items():
            if v < MARGIN:
                raise FamilyConstraintError(f"{name} != 0 (margin {MARGIN})", v)


def gen_multiround(n, spec=None):
    """The n^2 - 2n + 3 states of the multi-round construction."""
    spec = MultiroundSpec.default(n) if spec is None else spec
    if spec.n != n:
        raise ValueError("spec built for a different n")
    spec.validate()
    eta, al = spec.eta_bases, spec.alpha_bases
    e = [ket(i, n) for i in range(n)]
    spine = sum(np.outer(e[k], eta[k][0]) + np.outer(al[k][0], e[k]) for k in range(n - 1))
    states, labels = [spine], ["spine"]
    for k in range(n - 1):
        for i in range(1, n - k):
            states.append(np.outer(e[k], eta[k][i]))
            labels.append(f"{k}|eta_{k}{i}")
        for i in range(1, n - k - 1):
            states.append(np.outer(al[k][i], e[k]))
            labels.append(f"alpha_{k}{i}|{k}")
    states.append(np.outer(e[n - 1], e[n - 1]))
    labels.append(f"{n - 1}|{n - 1}")
    out = StateSet(np.array(states), labels)
    ok, pair = pairwise_orthogonal(out, 1e-10)
    if not ok:
        raise FamilyConstraintError(f"states {pair} orthogonal")
    return out


def canonical_multiround_protocol(n, spec=None):
    """Alternating rank-1-versus-rest projective splits, 2n-2 rounds deep."""
    states = gen_multiround(n, spec)
    psi = states.normalized().states

    def split(party, k):
        p = np.zeros((n, n))
        p[k, k] = 1
        return projective(party, [p, np.eye(n) - p])

    def level(k, branch):
        def after_alice(i, sub):
            if i == 0 or k == n - 2:
                return identification(Party.BOB, sub)

            def after_bob(j, sub2):
                return identification(Party.ALICE, sub2) if j == 0 else level(k + 1, sub2)

            return measure_then(split(Party.BOB, k), sub, after_bob)

        return measure_then(split(Party.ALICE, k), branch, after_alice)

    tree = ProtocolTree(level(0, psi), (n, n))
    if not verify_perfect_discrimination(tree, states).perfect:
        raise FamilyConstraintError("multi-round protocol verification")
    return tree


# --- fixtures ---------------------------------------------------------------


@dataclass
class Fixture:
    name: str
    params: object
    states: StateSet
    protocol: ProtocolTree


def thm5_paper_params():
    """Printed instance with its orthogonality typo repaired."""
    return Thm5Params(1, 1, 1, -2, 1, -2, -1, -1, alpha=[0, 1])


def thm6_paper_params():
    r = 1 / np.sqrt(2)
    return Thm6Params(-0.5, 0.5, 1, r, -r, -1, alpha=[r, r])


def thm7_paper_params():
    """Printed instance with its subscript typos repaired."""
    return Thm7Params([3, 3, 1, 3, -2], [3, -2, 2, -1, 1], 1 / 3, 1 / 2)


def paper_examples():
    out = {}
    for name, params, gen in (
        ("thm5", thm5_paper_params(), gen_thm5_family),
        ("thm6", thm6_paper_params(), gen_thm6_family),
        ("thm7", thm7_paper_params(), gen_thm7_family),
    ):
        states, tree = gen(params)
        out[name] = Fixture(name, params, states, tree)
    return out


GENERATORS = {"thm5": gen_thm5_family, "thm6": gen_thm6_family, "thm7": gen_thm7_family}
SAMPLERS = {"thm5": sample_thm5_params, "thm6": sample_thm6_params, "thm7": sample_thm7_params}
PAPER_PARAMS = {"thm5": thm5_paper_params, "thm6": thm6_paper_params, "thm7": thm7_paper_params}
