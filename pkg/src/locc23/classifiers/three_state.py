"""Search for a Bob-first two-outcome POVM that separates three 2 x 3 states.

For an Alice basis {|0'>, |1'>} write psi_i = |0'>|phi_i> + |1'>|phi'_i>.
A Bob effect E keeps the first branch orthogonal after Alice measures in
that basis iff <phi_i|E|phi_j> = <phi'_i|E|phi'_j> = 0 for i != j.  These
twelve real equations are linear in the nine real coordinates of E, so the
admissible effects form the null space L(a, b) of a 12 x 9 matrix.  A
solution exists where that matrix drops rank; we minimize its smallest
singular value over the Bloch sphere of (a, b) from many starts.

Given a null element E, it is turned into an effect (0 <= E <= I) by
scaling; the complementary outcome sqrt(I - E) leaves states that must
still be separable with Alice measuring first.  Written through the dual
families eta_i (of phi_i) and mu_i (of phi'_i) the same E reads
sum lambda_i |eta_i><eta_i| = sum nu_i |mu_i><mu_i|, with
lambda_i = <phi_i|E|phi_i> and nu_i = <phi'_i|E|phi'_i>.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..measurements import LocalPOVM, Party, apply_matrix, basis_measurement
from ..protocol import (
    ProtocolTree,
    identify_after,
    local_support,
    measure_then,
    verify_perfect_discrimination,
)
from ..states import AliceBasis, as_state_set, is_product, product_factors, split_by_alice_basis
from .alice_first import alice_first_node, bloch_to_vector, walgate_hardy_alice_first
from .matching import _herm_basis

RESIDUAL_TOL = 1e-8
DEFAULT_STARTS = 64


@dataclass
class SolverState:
    a: complex
    b: complex
    lam: np.ndarray
    nu: np.ndarray
    residual: float

    def __post_init__(self):
        if abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1) > 1e-9:
            raise ValueError("|a|^2 + |b|^2 must be 1")


@dataclass
class SolverResult:
    povm: LocalPOVM
    basis: AliceBasis
    state: SolverState
    protocol: ProtocolTree
    start: int  # index of the start that produced it (-1: structured candidate)


HERM = _herm_basis(3)
HERM_STACK = np.array(HERM)


def effect_system(psi, basis):
    """Real 12 x 9 matrix whose null space is L(a, b)."""
    u = basis.unitary()
    parts = np.einsum("xa,kab->xkb", u.conj().T, psi)  # Alice outcome, state, Bob
    i, j = np.triu_indices(psi.shape[0], 1)
    coef = np.einsum("xpa,mab,xpb->xpm", parts[:, i].conj(), HERM_STACK, parts[:, j])
    coef = coef.reshape(-1, len(HERM))
    return np.concatenate([coef.real, coef.imag])


def _basis_from_angles(t, p):
    w = bloch_to_vector([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])
    return AliceBasis.from_vector(w)


def _sigma_min(psi, basis):
    s = np.linalg.svd(effect_system(psi, basis), compute_uv=False)
    return s[-1]


def _starts(count):
    """Deterministic near-uniform (theta, phi) pairs (Fibonacci sphere)."""
    i = np.arange(count) + 0.5
    t = np.arccos(1 - 2 * i / count)
    p = np.pi * (1 + 5 ** 0.5) * i
    return list(zip(t, p % (2 * np.pi)))


def _structured_bases(psi):
    out = [AliceBasis(1, 0)]
    for c in psi:
        if is_product(c):
            u, _ = product_factors(c)
            out.append(AliceBasis.from_vector(u))
    return out


def _as_effect(e):
    """Scale a PSD Hermitian e so its top eigenvalue is 1, or None."""
    w = np.linalg.eigvalsh(e)
    if w[-1] <= 0 or w[0] < -1e-9 * w[-1]:
        return None
    eff = e / w[-1]
    eff = (eff + eff.conj().T) / 2
    if np.linalg.norm(eff - np.eye(len(e))) < 1e-7:
        return None
    return eff


def _effects_from_null(m, psi, scan=24):
    """Effects 0 <= E <= I, not proportional to I, inside the null space of m.

    Candidates, in order: single null vectors; combinations acting as the
    identity on one state's Bob support (so the other outcome removes that
    state); a deterministic scan of directions in the null space.
    """
    _, s, vh = np.linalg.svd(m)
    scale = max(s[0], 1.0)
    keep = np.concatenate([s < 1e-6 * scale, np.ones(vh.shape[0] - len(s), bool)])
    null = vh[keep]
    r = len(null)
    if r == 0:
        return []
    mats = np.einsum("rm,mab->rab", null, HERM_STACK)

    def herm(x):
        return np.einsum("r,rab->ab", x, mats)

    raw = [sign * mats[k] for k in range(r) for sign in (1, -1)]
    for c in psi:
        supp = local_support(c, Party.BOB)
        # E s = s for every s in the support: linear in x
        a = np.concatenate([np.einsum("rab,bj->raj", mats, supp).reshape(r, -1).T])
        rhs = supp.reshape(-1)
        a = np.concatenate([a.real, a.imag])
        rhs = np.concatenate([rhs.real, rhs.imag])
        x, *_ = np.linalg.lstsq(a, rhs, rcond=None)
        if np.linalg.norm(a @ x - rhs) > 1e-8:
            continue
        _, sa, va = np.linalg.svd(a)
        free = va[int(np.sum(sa > 1e-9 * max(sa[0], 1))):]
        if len(free):
            # pick the most interior point of the remaining affine family
            q = np.eye(len(supp)) - supp @ supp.conj().T
            comp = np.linalg.svd(q)[0][:, : len(supp) - supp.shape[1]]

            def slack(y, x=x, free=free, comp=comp):
                e = herm(x + y @ free)
                w = np.linalg.eigvalsh(comp.conj().T @ e @ comp)
                return -min(w[0], 1 - w[-1])

            best = min(
                (minimize(slack, y0, method="Nelder-Mead",
                          options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
                 for y0 in [np.zeros(len(free))] + list(np.eye(len(free)))),
                key=lambda r: r.fun,
            )
            x = x + best.x @ free
        raw.append(herm(x))
    if r > 1:
        rng = np.random.default_rng(0)
        dirs = rng.normal(size=(scan, r))
        if r == 2:
            t = np.linspace(0, 2 * np.pi, scan, endpoint=False)
            dirs = np.column_stack([np.cos(t), np.sin(t)])
        raw += [herm(d) for d in dirs]
    out = []
    for e in raw:
        eff = _as_effect(e)
        if eff is not None:
            out.append(eff)
    return out


def psd_sqrt(e):
    w, v = np.linalg.eigh((e + e.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def _try_effect(states, psi, basis, eff):
    m1 = psd_sqrt(eff)
    m2 = psd_sqrt(np.eye(len(eff)) - eff)
    povm = LocalPOVM(Party.BOB, [m1, m2])
    alice = basis_measurement(Party.ALICE, [basis.zero, basis.one])

    def follow(i, sub):
        if i == 0:
            return identify_after(alice, sub, Party.BOB)
        return alice_first_node(sub)

    sub2 = apply_matrix(m2, Party.BOB, psi)
    if alice_first_node(sub2) is None:
        return None
    root = measure_then(povm, psi, follow)
    tree = ProtocolTree(root, states.dims)
    if not verify_perfect_discrimination(tree, states).perfect:
        return None
    return povm, tree


def _state_for(psi, basis, eff, residual):
    parts = [split_by_alice_basis(c, basis) for c in psi]
    lam = np.array([max(np.real(np.vdot(p[0], eff @ p[0])), 0.0) for p in parts])
    nu = np.array([max(np.real(np.vdot(p[1], eff @ p[1])), 0.0) for p in parts])
    return SolverState(basis.a, basis.b, lam, nu, float(residual))


def three_state_povm_solver(states, starts=DEFAULT_STARTS):
    """A verified Bob-first POVM protocol for three states, or None if none was found.

    None means the search budget was exhausted, not that no POVM exists.
    """
    states = as_state_set(states)
    if len(states) != 3 or states.dims[0] != 2:
        raise ValueError("three states with a qubit on Alice's side")
    psi = states.normalized().states

    wh = walgate_hardy_alice_first(states)
    if wh is not None:
        # trivial Bob effect; Alice's basis is read from the tree
        basis = AliceBasis.from_vector(
            np.linalg.eigh(wh.root.measurement.elements[0])[1][:, -1]
        )
        povm = LocalPOVM(Party.BOB, [np.eye(3)])
        st = _state_for(psi, basis, np.eye(3), 0.0)
        return SolverResult(povm, basis, st, wh, -1)

    # analytic candidates first (product factors), then the multi-start search
    structured = [(_sigma_min(psi, b), -1, b) for b in _structured_bases(psi)]
    found = _first_working(states, psi, sorted(structured, key=lambda c: c[0]))
    if found is not None:
        return found
    scored = []
    for idx, (t0, p0) in enumerate(_starts(starts)):
        r = minimize(
            lambda x: _sigma_min(psi, _basis_from_angles(*x)),
            np.array([t0, p0]),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 300},
        )
        basis = _basis_from_angles(*r.x)
        scored.append((_sigma_min(psi, basis), idx, basis))
    # minimum residual first, ties to the lowest start index
    scored.sort(key=lambda c: (c[0], c[1]))
    return _first_working(states, psi, scored)


def _first_working(states, psi, scored):
    for res, idx, basis in scored:
        if res > RESIDUAL_TOL:
            break
        for eff in _effects_from_null(effect_system(psi, basis), psi):
            got = _try_effect(states, psi, basis, eff)
            if got is not None:
                povm, tree = got
                return SolverResult(povm, basis, _state_for(psi, basis, eff, res), tree, idx)
    return None
