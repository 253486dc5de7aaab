"""Recognize the explicit LOCC-but-not-LPCC families up to local unitaries.

Each matcher picks product members as the template's product states, which
fixes a local frame (up to phases that leave the family parameters'
defining relations unchanged).  The remaining states are read off in that
frame and the resulting parameters are validated.  The witness is the
family protocol carried back to the original frame and verified there.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import minimize

from ..families import (
    FamilyConstraintError,
    Thm5Params,
    Thm6Params,
    Thm7Params,
    gen_thm5_family,
    gen_thm6_family,
    gen_thm7_family,
    perp,
)
from ..linalg import orthonormal_complement, same_ray
from ..protocol import Leaf, ProtocolTree, transform_protocol, verify_perfect_discrimination
from ..states import as_state_set, is_product, product_factors

FIT_TOL = 1e-8


@dataclass
class FamilyMatch:
    family: str
    params: object
    order: tuple  # original index of each template state
    ua: np.ndarray
    ub: np.ndarray
    protocol: ProtocolTree


def _product_members(psi):
    out = {}
    for i, c in enumerate(psi):
        if is_product(c):
            u, v = product_factors(c)
            out[i] = (u, v / np.linalg.norm(v))
    return out


def _bob_frame(v0, v1=None):
    """Unitary with columns v0, the part of v1 orthogonal to v0, and the rest."""
    cols = [v0]
    if v1 is not None:
        r = v1 - v0 * np.vdot(v0, v1)
        cols.append(r / np.linalg.norm(r))
    cols += orthonormal_complement(cols, len(v0))
    return np.column_stack(cols)


def _to_template(psi, ua, ub):
    """Coefficients C' with C = ua C' ub^T."""
    return np.einsum("ai,kab,bj->kij", ua.conj(), psi, ub.conj())


def _finish(family, params, gen, order, ua, ub, states):
    try:
        _, tree = gen(params)
    except FamilyConstraintError:
        return None
    # the template states follow ``order``; undo the permutation on leaves
    back = transform_protocol(tree, ua, ub)
    _relabel(back.root, order)
    if not verify_perfect_discrimination(back, states).perfect:
        return None
    return FamilyMatch(family, params, tuple(order), ua, ub, back)


def _relabel(node, order):
    if isinstance(node, Leaf):
        if node.claim is not None:
            node.claim = order[node.claim]
        return
    for ch in node.children:
        _relabel(ch, order)


def _norm(c):
    return c / np.linalg.norm(c)


def match_family_thm5(states):
    """Match |0>|0>, |1>|alpha>, |0>(a|1>+b|2>) + |1>(c|alpha_perp>+d|2>) (x2)."""
    states = as_state_set(states)
    if len(states) != 4 or states.dims != (2, 3):
        return None
    psi = states.normalized().states
    prods = _product_members(psi)
    for i, j in permutations(prods, 2):
        (u1, v1), (u2, v2) = prods[i], prods[j]
        if abs(np.vdot(u1, u2)) > FIT_TOL or same_ray(v1, v2, 1e-9):
            continue
        ua = np.column_stack([u1, u2 / np.linalg.norm(u2)])
        ub = _bob_frame(v1, v2)
        rest = [k for k in range(4) if k not in (i, j)]
        t = _to_template(psi, ua, ub)
        alpha = _norm(t[j][1][:2])
        ap = np.append(perp(alpha), 0)
        for k3, k4 in permutations(rest):
            coeffs = []
            for k in (k3, k4):
                r0, r1 = t[k]
                coeffs.append((r0[1], r0[2], np.vdot(ap, r1), r1[2]))
            (a1, b1, c1, d1), (a2, b2, c2, d2) = coeffs
            p = Thm5Params(a1, b1, c1, d1, a2, b2, c2, d2, alpha)
            try:
                p.validate()
            except FamilyConstraintError:
                continue
            m = _finish("thm5", p, gen_thm5_family, (i, j, k3, k4), ua, ub, states)
            if m is not None:
                return m
    return None


def match_family_thm6(states):
    """Match |0>|0>, |alpha>|1> and the two entangled members of the second family."""
    states = as_state_set(states)
    if len(states) != 4 or states.dims != (2, 3):
        return None
    psi = states.normalized().states
    prods = _product_members(psi)
    for i, j in permutations(prods, 2):
        (u1, v1), (u2, v2) = prods[i], prods[j]
        if abs(np.vdot(v1, v2)) > FIT_TOL:
            continue
        ov = abs(np.vdot(u1, u2))
        if ov < 1e-6 or 1 - ov < 1e-9:
            continue
        ua = np.column_stack([u1, perp(u1)])
        ub = _bob_frame(v1, v2)
        t = _to_template(psi, ua, ub)
        alpha = ua.conj().T @ u2
        ap = perp(alpha)
        one = np.array([0, 1])
        rest = [k for k in range(4) if k not in (i, j)]
        for k3, k4 in permutations(rest):
            c3, c4 = t[k3], t[k4]
            col3, col4 = c3[:, 2], c4[:, 2]
            # third Bob column must sit on |1> for one state, alpha_perp for the other
            if np.linalg.norm(col3 - one * col3[1]) > FIT_TOL:
                continue
            if np.linalg.norm(col4 - ap * np.vdot(ap, col4)) > FIT_TOL:
                continue
            p = Thm6Params(
                c3[1, 0], np.vdot(ap, c3[:, 1]), col3[1],
                c4[1, 0], np.vdot(ap, c4[:, 1]), np.vdot(ap, col4),
                alpha,
            )
            try:
                p.validate()
            except FamilyConstraintError:
                continue
            m = _finish("thm6", p, gen_thm6_family, (i, j, k3, k4), ua, ub, states)
            if m is not None:
                return m
    return None


def _herm_basis(n):
    out = []
    for a in range(n):
        m = np.zeros((n, n), dtype=np.complex128)
        m[a, a] = 1
        out.append(m)
    for a in range(n):
        for b in range(a + 1, n):
            m = np.zeros((n, n), dtype=np.complex128)
            m[a, b] = m[b, a] = 1 / np.sqrt(2)
            out.append(m)
            m = np.zeros((n, n), dtype=np.complex128)
            m[a, b], m[b, a] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            out.append(m)
    return out


def _interior_margin(e2):
    w = np.linalg.eigvalsh(e2)
    return min(w[0], 1 - w[-1])


def _bob_povm_on_perp(t_states):
    """2x2 Hermitian E' on span{|1>,|2>} with E = |0><0| + E' orthogonalizing both Alice branches.

    Returns the candidates found (affine solution set, searched for an
    element with spectrum strictly inside (0, 1)).
    """
    basis = _herm_basis(2)
    rows, rhs = [], []
    for x in range(2):
        vs = t_states[:, x, :]
        for k in range(len(vs)):
            for l in range(k + 1, len(vs)):
                fk, fl = vs[k], vs[l]
                # <fk|E|fl> = conj(fk0) fl0 + <fk'|E'|fl'>
                const = np.conj(fk[0]) * fl[0]
                coef = [np.conj(fk[1:]) @ h @ fl[1:] for h in basis]
                rows += [np.real(coef), np.imag(coef)]
                rhs += [-const.real, -const.imag]
    a, c = np.array(rows), np.array(rhs)
    x0, *_ = np.linalg.lstsq(a, c, rcond=None)
    if np.linalg.norm(a @ x0 - c) > 1e-8 * max(1, np.linalg.norm(c)):
        return []
    _, s, vh = np.linalg.svd(a)
    null = vh[int(np.sum(s > 1e-9 * s[0])):]

    def mat(x):
        return sum(xi * h for xi, h in zip(x, basis))

    sols = [mat(x0)]
    if len(null):
        def neg_margin(y):
            return -_interior_margin(mat(x0 + y @ null))

        for start in np.eye(len(null)).tolist() + [[0.0] * len(null)]:
            r = minimize(neg_margin, np.array(start) * 0.1, method="Nelder-Mead",
                         options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
            sols.append(mat(x0 + r.x @ null))
    return [e for e in sols if _interior_margin(e) > 1e-9]


def match_family_thm7(states):
    """Match |0>|0> and two states of the three-state family."""
    states = as_state_set(states)
    if len(states) != 3 or states.dims != (2, 3):
        return None
    psi = states.normalized().states
    prods = _product_members(psi)
    for i in prods:
        u, v = prods[i]
        ua = np.column_stack([u, perp(u)])
        ub0 = _bob_frame(v)
        rest = [k for k in range(3) if k != i]
        t = _to_template(psi[rest], ua, ub0)
        for e2 in _bob_povm_on_perp(t):
            w, vecs = np.linalg.eigh(e2)
            ub = ub0 @ np.block([[np.eye(1), np.zeros((1, 2))], [np.zeros((2, 1)), vecs]])
            tt = _to_template(psi[rest], ua, ub)
            for k2, k3 in permutations(range(2)):
                a = np.array([tt[k2][0, 1], tt[k2][0, 2], *tt[k2][1]])
                b = np.array([tt[k3][0, 1], tt[k3][0, 2], *tt[k3][1]])
                p = Thm7Params(a, b, float(w[0]), float(w[1]))
                try:
                    p.validate()
                except FamilyConstraintError:
                    continue
                order = (i, rest[k2], rest[k3])
                m = _finish("thm7", p, gen_thm7_family, order, ua, ub, states)
                if m is not None:
                    return m
    return None
