"""Qubit-owner-first discrimination and qubit Hermitian-form equations.

For a qubit basis vector w, the condition <eta_k|eta_l> = w^dag G w = 0
is complex-linear in the Bloch vector of w, so a family of such
conditions reduces to a small real linear system intersected with the
unit sphere.
"""

import numpy as np

from ..measurements import Party, basis_measurement
from ..protocol import ProtocolTree, identify_after, verify_perfect_discrimination
from ..states import AliceBasis, as_state_set

PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128
)
NULL_TOL = 1e-7
# branch weight below which a state counts as eliminated
PRESENT = 1e-13


def form_rows(g):
    """Real rows (A, c) with w^dag g w = 0  <=>  A n = c for the Bloch vector n."""
    t = np.einsum("xy,kyx->k", g, PAULI)
    tr = np.trace(g)
    return np.array([t.real, t.imag]), np.array([-tr.real, -tr.imag])


def bloch_to_vector(n):
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    theta = np.arccos(np.clip(n[2], -1, 1))
    phi = np.arctan2(n[1], n[0])
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def vector_to_bloch(w):
    w = np.asarray(w, dtype=np.complex128)
    w = w / np.linalg.norm(w)
    rho = np.outer(w, w.conj())
    return np.real(np.einsum("xy,kyx->k", rho, PAULI))


def _circle_points(center, u1, u2, count):
    r2 = 1 - center @ center
    if r2 < -1e-12:
        return []
    r = np.sqrt(max(r2, 0.0))
    ts = np.arange(count) * 2 * np.pi / count
    return [center + r * (np.cos(t) * u1 + np.sin(t) * u2) for t in ts]


def unit_bloch_solutions(a, c, tol=NULL_TOL, circle_samples=12):
    """Unit vectors n with A n = c (up to ``tol``).

    Finite solution sets are returned exactly; a circle or the whole sphere
    of solutions is represented by ``circle_samples`` points, listed after
    any coordinate axes that happen to solve the system.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    c = np.asarray(c, dtype=float).ravel()
    scale = max(1.0, float(np.abs(a).max()) if a.size else 1.0)
    if a.size == 0 or np.abs(a).max() < tol:
        if c.size and np.abs(c).max() > tol * scale:
            return []
        pts = [np.eye(3)[i] * s for i in (2, 0, 1) for s in (1, -1)]
        return pts
    _, s, vt = np.linalg.svd(a)
    rank = int(np.sum(s > tol * scale))
    n0 = np.linalg.lstsq(a, c, rcond=None)[0]
    # keep the minimum-norm particular solution
    null = vt[rank:]
    n0 = n0 - null.T @ (null @ n0)
    if np.linalg.norm(a @ n0 - c) > 10 * tol * scale:
        return []
    if rank == 3:
        cands = [n0]
    elif rank == 2:
        u = null[0]
        r2 = 1 - n0 @ n0
        if r2 < -1e-9:
            return []
        t = np.sqrt(max(r2, 0.0))
        cands = [n0 + t * u, n0 - t * u] if t > 1e-12 else [n0]
    else:
        u1, u2 = null[0], null[1]
        cands = []
        for i in (2, 0, 1):
            for sgn in (1, -1):
                e = np.eye(3)[i] * sgn
                if np.linalg.norm(a @ e - c) < tol * scale:
                    cands.append(e)
        cands += _circle_points(n0, u1, u2, circle_samples)
    out = []
    for n in cands:
        nn = np.linalg.norm(n)
        if abs(nn - 1) < 1e-6:
            out.append(n / nn)
    return out


def _pair_forms(rows_k, rows_l):
    """Cross matrix G_xy = <r_{x,k}|r_{y,l}> for two-row coefficient blocks."""
    return rows_k.conj() @ rows_l.T


def alice_first_candidates(states, tol=NULL_TOL):
    """Alice bases making both Bob-side families pairwise orthogonal."""
    states = as_state_set(states).normalized()
    if states.dims[0] != 2:
        raise ValueError("Alice must hold a qubit")
    psi = states.states
    rows, rhs = [], []
    for k in range(len(psi)):
        for l in range(k + 1, len(psi)):
            a, c = form_rows(_pair_forms(psi[k], psi[l]))
            rows.append(a)
            rhs.append(c)
    if not rows:
        return [AliceBasis(1, 0)]
    a = np.vstack(rows)
    # the trace terms vanish for an orthogonal set; drop them so that
    # antipodal Bloch solutions (the same basis) both survive
    c = np.zeros(a.shape[0])
    out = []
    for n in unit_bloch_solutions(a, c, tol):
        if n[2] < -1 + 1e-12:
            continue
        out.append(AliceBasis.from_vector(np.conj(bloch_to_vector(n))))
    return out


def alice_first_protocol(states, basis):
    states = as_state_set(states)
    meas = basis_measurement(Party.ALICE, [basis.zero, basis.one])
    root = identify_after(meas, states.normalized().states, Party.BOB)
    return ProtocolTree(root, states.dims)


def walgate_hardy_alice_first(states, tol=1e-9):
    """Two-round protocol with the qubit owner measuring first, or None."""
    states = as_state_set(states)
    for basis in alice_first_candidates(states):
        tree = alice_first_protocol(states, basis)
        if verify_perfect_discrimination(tree, states, tol).perfect:
            return tree
    return None


def alice_first_node(branch, tol=1e-8):
    """Alice-basis node finishing a sub-branch, or None.

    ``branch`` may contain eliminated (zero) states; the node keeps the
    original indexing so it can be grafted into a larger tree.
    """
    norms = np.linalg.norm(branch.reshape(len(branch), -1), axis=1)
    alive = np.flatnonzero(norms**2 > PRESENT)
    if len(alive) == 0:
        return None
    sub = branch[alive] / norms[alive, None, None]
    for basis in alice_first_candidates(sub):
        u = basis.unitary()
        parts = np.einsum("xa,kab->kxb", u.conj().T, sub)
        ok = True
        for x in range(2):
            g = parts[:, x].conj() @ parts[:, x].T
            if np.abs(g - np.diag(np.diag(g))).max() > tol:
                ok = False
                break
        if ok:
            meas = basis_measurement(Party.ALICE, [basis.zero, basis.one])
            return identify_after(meas, branch, Party.BOB)
    return None
