"""Decide projective (LPCC) distinguishability of a 2 x n set.

Alice holds a qubit, so her only nontrivial projective measurement is a
basis, after which Bob alone must separate the Bob-side vectors.  If Bob
goes first, some outcome is a rank-1 projector |theta><theta|; on that
branch Alice alone finishes, so the surviving Alice vectors C_k conj(theta)
must be pairwise orthogonal.  A qubit admits at most two such vectors, so
all but two states are annihilated, which pins theta to the orthogonal
complement of their Bob supports.  The remaining branch lives on
theta-perp and is again finished either by Alice first or by a Bob basis
of theta-perp.
"""

from itertools import combinations

import numpy as np

from ..linalg import span_basis
from ..measurements import Party, apply_matrix, projective
from ..protocol import (
    Node,
    ProtocolTree,
    identification,
    measure_then,
    verify_perfect_discrimination,
)
from ..states import as_state_set
from .alice_first import (
    PRESENT,
    alice_first_node,
    bloch_to_vector,
    form_rows,
    unit_bloch_solutions,
    walgate_hardy_alice_first,
)

ORTH = 1e-8


def _alice_vectors(psi, theta):
    """Alice-side vectors <theta|_B psi_k, one row per state."""
    return psi @ np.conj(theta)


def _offdiag(vs):
    g = vs.conj() @ vs.T
    return np.abs(g - np.diag(np.diag(g))).max(initial=0.0)


def _restricted_form(psi, k, l, basis):
    """2x2 matrix G with f_kl(basis @ conj(u)) = u^dag G u."""
    q = psi[k].conj().T @ psi[l]
    return basis.T @ q @ basis.conj()


def _vectors_in(basis, ns):
    return [basis @ np.conj(bloch_to_vector(n)) for n in ns]


def _structured(psi, basis):
    """Candidate directions inside span(basis) built from the states."""
    out = [basis[:, 0], basis[:, 1]]
    for c in psi:
        for r in span_basis(list(c), psi.shape[2]).T if np.any(c) else []:
            p = basis @ (basis.conj().T @ r)
            if np.linalg.norm(p) > 1e-8:
                p = p / np.linalg.norm(p)
                coords = basis.conj().T @ p
                q = basis @ np.array([-np.conj(coords[1]), np.conj(coords[0])])
                out += [p, q]
    return out


def _dedupe(vectors, tol=1e-9):
    kept = []
    for v in vectors:
        v = v / np.linalg.norm(v)
        if all(1 - abs(np.vdot(w, v)) > tol for w in kept):
            kept.append(v)
    return kept


def _theta_candidates(psi, zero_set, survivors, samples=12):
    n_bob = psi.shape[2]
    rows = [r for k in zero_set for r in psi[k]]
    supp = span_basis(rows, n_bob) if rows else np.zeros((n_bob, 0))
    if supp.shape[1] == 0:
        return []
    u, _, _ = np.linalg.svd(supp, full_matrices=True)
    v = u[:, supp.shape[1]:]
    if v.shape[1] == 0:
        return []
    if v.shape[1] == 1:
        return [v[:, 0]]
    if v.shape[1] > 2:
        return []
    cands = []
    if len(survivors) == 2:
        a, c = form_rows(_restricted_form(psi, survivors[0], survivors[1], v))
        ns = unit_bloch_solutions(a, c, circle_samples=samples)
        cands += _vectors_in(v, ns)
        free = len(ns) > 2
    else:
        free = True
    if free:
        cands += _structured(psi, v)
        ts = np.linspace(0, np.pi, 5)[1:-1]
        ps = np.linspace(0, 2 * np.pi, samples, endpoint=False)
        cands += [v @ np.array([np.cos(t / 2), np.exp(1j * p) * np.sin(t / 2)]) for t in ts for p in ps]
    return _dedupe(cands)


def _chi_candidates(psi, perp_basis):
    """Bob bases {chi, chi'} of span(perp_basis) keeping Alice vectors orthogonal."""
    rows = []
    for k, l in combinations(range(len(psi)), 2):
        a, _ = form_rows(_restricted_form(psi, k, l, perp_basis))
        rows.append(a)
    a = np.vstack(rows) if rows else np.zeros((0, 3))
    ns = unit_bloch_solutions(a, np.zeros(a.shape[0]))
    out = []
    for n in ns:
        w = np.conj(bloch_to_vector(n))
        chi = perp_basis @ w
        chi2 = perp_basis @ np.array([-np.conj(w[1]), np.conj(w[0])])
        out.append((chi, chi2))
    return out


def _rest_node(psi, branch, theta, tol):
    """Finishing node for the theta-perp branch, or None."""
    node = alice_first_node(branch)
    if node is not None:
        return node
    u, _, _ = np.linalg.svd(theta[:, None], full_matrices=True)
    perp_basis = u[:, 1:]
    alive = [i for i, c in enumerate(branch) if np.linalg.norm(c) ** 2 > PRESENT]
    sub = branch[alive] / np.linalg.norm(branch[alive].reshape(len(alive), -1), axis=1)[:, None, None]
    for chi, chi2 in _chi_candidates(sub, perp_basis):
        if _offdiag(_alice_vectors(sub, chi)) < tol and _offdiag(_alice_vectors(sub, chi2)) < tol:
            ps = [np.outer(x, x.conj()) for x in (theta, chi, chi2)]
            meas = projective(Party.BOB, ps, tol=1e-7)
            return measure_then(meas, branch, lambda i, s: identification(Party.ALICE, s))
    return None


def _theta_protocol(psi, theta, tol):
    if _offdiag(_alice_vectors(psi, theta)) > tol:
        return None
    p = np.outer(theta, theta.conj())
    meas = projective(Party.BOB, [p, np.eye(len(theta)) - p], tol=1e-7)
    children = []
    for i, k in enumerate(meas.elements):
        sub = apply_matrix(k, Party.BOB, psi)
        if i == 0:
            children.append(identification(Party.ALICE, sub))
        else:
            node = _rest_node(psi, sub, theta, tol)
            if node is None:
                return None
            children.append(node)
    return Node(meas, children)


def lpcc_candidates(states, tol=ORTH):
    """Yield candidate projective protocols (roots) for a 2 x n set."""
    states = as_state_set(states)
    psi = states.normalized().states
    yield identification(Party.BOB, psi)
    wh = walgate_hardy_alice_first(states)
    if wh is not None:
        yield wh.root
    n = len(psi)
    seen = []
    for size in range(max(n - 2, 1), n + 1):
        for zero_set in combinations(range(n), size):
            survivors = [i for i in range(n) if i not in zero_set]
            for theta in _theta_candidates(psi, zero_set, survivors):
                if any(1 - abs(np.vdot(t, theta)) < 1e-9 for t in seen):
                    continue
                seen.append(theta)
                root = _theta_protocol(psi, theta, tol)
                if root is not None:
                    yield root


def lpcc_decidable_2x3(states, tol=1e-9):
    """Verified projective protocol for the set, or None if none exists."""
    states = as_state_set(states)
    if states.dims[0] != 2:
        raise ValueError("Alice must hold a qubit")
    for root in lpcc_candidates(states):
        if isinstance(root, ProtocolTree):
            root = root.root
        tree = ProtocolTree(root, states.dims)
        if verify_perfect_discrimination(tree, states, tol).perfect:
            return tree
    return None
