"""LOCC protocol trees: verification, round counting and sampled runs.

A round is one local measurement whose outcome is broadcast to the other
party.  Two consecutive measurements by the same party count as two
rounds, so ``count_rounds`` is simply the number of internal nodes on the
deepest root-to-leaf path.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import RANK_RTOL
from .measurements import LocalPOVM, Party, ProjectiveMeasurement, apply_matrix, as_party
from .states import as_state_set

VERIFY_TOL = 1e-9


class ProtocolError(ValueError):
    pass


@dataclass
class Leaf:
    claim: int = None


@dataclass
class Node:
    measurement: LocalPOVM
    children: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.children) != len(self.measurement):
            raise ProtocolError(
                f"{len(self.measurement)} outcomes but {len(self.children)} children"
            )

    @property
    def party(self):
        return self.measurement.party


@dataclass
class ProtocolTree:
    root: object
    dims: tuple

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        for node in iter_nodes(self.root):
            d = self.dims[node.party.axis]
            if node.measurement.dim != d:
                raise ProtocolError(
                    f"{node.party.name} measurement of size {node.measurement.dim}, local dimension {d}"
                )


def iter_nodes(node):
    if isinstance(node, Node):
        yield node
        for ch in node.children:
            yield from iter_nodes(ch)


def iter_leaves(node, path=()):
    if isinstance(node, Leaf):
        yield path, node
    else:
        for i, ch in enumerate(node.children):
            yield from iter_leaves(ch, path + (i,))


def count_rounds(tree):
    def depth(node):
        if isinstance(node, Leaf):
            return 0
        return 1 + max(depth(ch) for ch in node.children)

    root = tree.root if isinstance(tree, ProtocolTree) else tree
    return depth(root)


@dataclass
class LeafOutcome:
    path: tuple
    claim: object
    probs: np.ndarray


@dataclass
class VerificationReport:
    success: np.ndarray  # per-state probability of a correct claim
    total: np.ndarray  # per-state probability summed over all leaves
    perfect: bool
    failing_leaf: tuple = None
    reason: str = ""
    leaves: list = field(default_factory=list)


def _propagate(node, branch, path, out):
    if isinstance(node, Leaf):
        out.append(LeafOutcome(path, node.claim, np.sum(np.abs(branch) ** 2, axis=(1, 2))))
        return
    m = node.measurement
    for i, (k, ch) in enumerate(zip(m.elements, node.children)):
        sub = apply_matrix(k, m.party, branch)
        if not np.any(np.abs(sub) > 1e-150):
            out.append(LeafOutcome(path + (i,), None, np.zeros(len(branch))))
            continue
        _propagate(ch, sub, path + (i,), out)


def verify_perfect_discrimination(tree, states, tol=VERIFY_TOL):
    states = as_state_set(states)
    if tuple(states.dims) != tuple(tree.dims):
        raise ProtocolError(f"state dims {states.dims} vs protocol dims {tree.dims}")
    psi = states.normalized().states
    n = len(psi)
    leaves = []
    _propagate(tree.root, psi, (), leaves)
    success = np.zeros(n)
    total = np.zeros(n)
    failing, reason = None, ""
    for lf in leaves:
        total += lf.probs
        present = np.flatnonzero(lf.probs > tol)
        if lf.claim is not None:
            if not 0 <= lf.claim < n:
                raise ProtocolError(f"leaf {lf.path} claims index {lf.claim} of {n}")
            success[lf.claim] += lf.probs[lf.claim]
        if failing is None:
            if len(present) > 1:
                failing, reason = lf.path, f"states {present.tolist()} reach this leaf"
            elif len(present) == 1 and lf.claim != present[0]:
                failing, reason = lf.path, f"state {present[0]} reaches a leaf claiming {lf.claim}"
    perfect = failing is None
    bad = np.flatnonzero(np.abs(total - 1) > tol)
    if perfect and len(bad):
        perfect, reason = False, f"probabilities of states {bad.tolist()} do not sum to 1"
    bad = np.flatnonzero(success < 1 - tol)
    if perfect and len(bad):
        perfect, reason = False, f"states {bad.tolist()} are not identified with certainty"
    return VerificationReport(success, total, perfect, failing, reason, leaves)


def simulate_run(tree, state, rng_seed):
    """Sample one run of the protocol on ``state``; returns (claim, outcomes)."""
    rng = np.random.default_rng(rng_seed)
    c = np.asarray(state, dtype=np.complex128)
    c = c / np.linalg.norm(c)
    node, transcript = tree.root, []
    while isinstance(node, Node):
        m = node.measurement
        branches = [apply_matrix(k, m.party, c) for k in m.elements]
        p = np.array([np.sum(np.abs(b) ** 2) for b in branches])
        if p.sum() <= 1e-300:
            raise ProtocolError(f"state annihilated at node {tuple(transcript)}")
        i = int(rng.choice(len(p), p=p / p.sum()))
        transcript.append(i)
        c = branches[i] / np.sqrt(p[i])
        node = node.children[i]
    return node.claim, transcript


# --- building blocks --------------------------------------------------------


def local_support(c, party, rtol=RANK_RTOL):
    """Orthonormal basis (columns) of the local support of c on ``party``."""
    m = c if as_party(party) is Party.ALICE else c.T
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s[0] == 0:
        return u[:, :0]
    return u[:, : int(np.sum(s > rtol * s[0]))]


def support_overlap(ck, cl, party):
    """Frobenius norm of the cross Gram matrix of the two local supports."""
    if as_party(party) is Party.ALICE:
        return float(np.linalg.norm(ck.conj().T @ cl))
    return float(np.linalg.norm(ck.conj() @ cl.T))


def present_indices(branch, tol=1e-13):
    return [i for i, c in enumerate(branch) if np.sum(np.abs(c) ** 2) > tol]


def identification(party, branch, tol=1e-13):
    """Node in which ``party`` alone names the state, or a Leaf.

    ``branch`` is the stack of current (unnormalized) states indexed like
    the original set.  One projector per surviving state onto its local
    support, orthogonalized in order, plus the complement; correctness is
    left to verification.
    """
    party = as_party(party)
    alive = present_indices(branch, tol)
    if len(alive) <= 1:
        return Leaf(alive[0] if alive else None)
    d = branch.shape[1 + party.axis]
    basis = np.zeros((d, 0), dtype=np.complex128)
    projs, claims = [], []
    for i in alive:
        s = local_support(branch[i], party)
        s = s - basis @ (basis.conj().T @ s)
        u, sv, _ = np.linalg.svd(s, full_matrices=False)
        u = u[:, sv > 1e-6]
        if u.shape[1] == 0:
            continue
        basis = np.column_stack([basis, u])
        projs.append(u @ u.conj().T)
        claims.append(i)
    rest = np.eye(d) - basis @ basis.conj().T
    if np.linalg.norm(rest) > 1e-9:
        projs.append(rest)
        claims.append(None)
    if len(projs) == 1:
        return Leaf(claims[0])
    meas = ProjectiveMeasurement(party, projs, tol=1e-7)
    return Node(meas, [Leaf(c) for c in claims])


def measure_then(measurement, branch, follow):
    """Node for ``measurement`` whose children are ``follow(i, sub_branch)``."""
    children = []
    for i, k in enumerate(measurement.elements):
        sub = apply_matrix(k, measurement.party, branch)
        children.append(follow(i, sub))
    return Node(measurement, children)


def identify_after(measurement, branch, finisher):
    """Measurement followed by one identification round by ``finisher``."""
    return measure_then(measurement, branch, lambda i, sub: identification(finisher, sub))


def transform_protocol(tree, ua, ub):
    """The protocol that acts on (U_A (x) U_B)|psi> as ``tree`` acts on |psi>."""

    def walk(node):
        if isinstance(node, Leaf):
            return Leaf(node.claim)
        u = ua if node.party is Party.ALICE else ub
        m = node.measurement
        new = LocalPOVM(m.party, [u @ k @ u.conj().T for k in m.elements])
        return Node(new, [walk(ch) for ch in node.children])

    return ProtocolTree(walk(tree.root), tree.dims)
