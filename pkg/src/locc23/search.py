"""Grid-search oracles and random orthogonal sets.

The searches give numerical evidence, never proofs: a large best defect
only says no protocol of the searched shape was found near the grid.

Defect of a protocol: the largest |<psi_k| P_A (x) P_B |psi_l>| over its
terminal branches (k != l, states normalized).  Terminal branches end with
one party holding a rank-1 projector, after which the other party can
finish exactly iff those overlaps vanish.  Where a branch is finished
without such a projector, the overlap of the finishing party's local
supports is used instead.
"""

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np
from scipy.optimize import least_squares

from .classifiers.alice_first import PAULI, alice_first_protocol
from .measurements import Party, basis_measurement, projective
from .protocol import ProtocolTree, identification, identify_after, measure_then
from .states import AliceBasis, StateSet, as_state_set

PROFILES = ("all-product", "one-entangled", "two-entangled", "generic", "alice-first")


@dataclass(frozen=True)
class GridSpec:
    points_per_angle: int = 20
    refinement_levels: int = 2
    defect_threshold: float = 0.01
    top_cells: int = 5
    polish: bool = True

    def __post_init__(self):
        if self.points_per_angle < 4:
            raise ValueError("points_per_angle >= 4")
        if self.defect_threshold <= 0:
            raise ValueError("defect_threshold > 0")
        if self.refinement_levels < 0:
            raise ValueError("refinement_levels >= 0")


@dataclass
class SearchReport:
    best_defect: float
    best_protocol: ProtocolTree = None
    skeleton: str = ""
    params: tuple = ()
    stats: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "best_defect": float(self.best_defect),
            "found": self.best_protocol is not None,
            "skeleton": self.skeleton,
            "params": [float(p) for p in self.params],
            "stats": self.stats,
        }


# --- random orthogonal sets -------------------------------------------------


def _haar(rng, d):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_product_basis(rng, m, n):
    """Random orthogonal product basis of C^m (x) C^n, built by recursive splitting."""
    if m == 1 or n == 1:
        ua, ub = _haar(rng, m), _haar(rng, n)
        return [(ua[:, i], ub[:, j]) for i in range(m) for j in range(n)]
    if rng.random() < 0.5:
        # Alice fixes a vector; Bob gets a fresh basis for it, recurse on the rest of Alice
        ua = _haar(rng, m)
        out = [(ua[:, 0], v) for v in _haar(rng, n).T]
        for a, b in random_product_basis(rng, m - 1, n):
            out.append((ua[:, 1:] @ a, b))
        return out
    ub = _haar(rng, n)
    out = [(u, ub[:, 0]) for u in _haar(rng, m).T]
    for a, b in random_product_basis(rng, m, n - 1):
        out.append((a, ub[:, 1:] @ b))
    return out


def _entangling_pair(basis, rng):
    """Indices (i, j) of two basis members whose factors differ on both sides."""
    pairs = [
        (i, j)
        for i in range(len(basis))
        for j in range(i + 1, len(basis))
        if 1 - abs(np.vdot(basis[i][0], basis[j][0])) > 1e-3
        and 1 - abs(np.vdot(basis[i][1], basis[j][1])) > 1e-3
    ]
    return pairs[rng.integers(len(pairs))]


def _rotate(c1, c2, rng):
    t = rng.uniform(0.2, np.pi / 2 - 0.2)
    ph = np.exp(1j * rng.uniform(0, 2 * np.pi))
    return np.cos(t) * c1 + ph * np.sin(t) * c2, -np.sin(t) * np.conj(ph) * c1 + np.cos(t) * c2


def random_orthogonal_set(dim_a, dim_b, count, profile="generic", seed=0):
    """Deterministic-in-seed orthogonal set of ``count`` states.

    Profiles: all-product; one-entangled and two-entangled (rotations of
    pairs inside a product basis, so the entangled members have Schmidt
    rank 2 and the rest stay product); generic (orthonormalized random
    vectors); alice-first (qubit Alice; some Alice basis leaves pairwise
    orthogonal Bob vectors on both outcomes).
    """
    total = dim_a * dim_b
    if not 1 <= count <= total:
        raise ValueError(f"count must be in 1..{total}")
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {PROFILES}")
    rng = np.random.default_rng(seed)
    if profile == "generic":
        z = rng.normal(size=(total, count)) + 1j * rng.normal(size=(total, count))
        q, _ = np.linalg.qr(z)
        return StateSet(q.T.reshape(count, dim_a, dim_b))
    if profile == "alice-first":
        if dim_a != 2:
            raise ValueError("alice-first needs a qubit on Alice's side")
        return _alice_first_set(rng, dim_b, count)
    basis = random_product_basis(rng, dim_a, dim_b)
    prods = [np.outer(a, b) for a, b in basis]
    if profile == "all-product":
        idx = rng.permutation(total)[:count]
        return StateSet(np.array([prods[i] for i in idx]))
    n_ent = 1 if profile == "one-entangled" else 2
    if count < n_ent:
        raise ValueError(f"{profile} needs at least {n_ent} states")
    i, j = _entangling_pair(basis, rng)
    e1, e2 = _rotate(prods[i], prods[j], rng)
    ent = [e1] if n_ent == 1 else [e1, e2]
    rest = [p for k, p in enumerate(prods) if k not in (i, j)]
    pick = rng.permutation(len(rest))[: count - n_ent]
    states = ent + [rest[k] for k in pick]
    order = rng.permutation(count)
    return StateSet(np.array([states[k] for k in order]))


def _alice_first_set(rng, dim_b, count):
    if count > 2 * dim_b:
        raise ValueError("too many states")
    u = _haar(rng, 2)
    fb, gb = _haar(rng, dim_b), _haar(rng, dim_b)
    # each state uses at most one basis vector on each outcome; slots are
    # assigned so that no two states share one
    slots = [(x, j) for x in range(2) for j in range(dim_b)]
    while True:
        out = []
        used = set()
        ok = True
        for _ in range(count):
            free = [s for s in slots if s not in used]
            if not free:
                ok = False
                break
            picks = [free[rng.integers(len(free))]]
            other = [s for s in free if s[0] != picks[0][0]]
            if other and rng.random() < 0.7:
                picks.append(other[rng.integers(len(other))])
            used.update(picks)
            c = np.zeros((2, dim_b), dtype=np.complex128)
            for x, j in picks:
                amp = rng.normal() + 1j * rng.normal()
                vec = (fb if x == 0 else gb)[:, j]
                c += amp * np.outer(u[:, x], vec)
            out.append(c)
        if ok:
            return StateSet(np.array(out))


# --- parametrizations -------------------------------------------------------


def qutrit_ray(a, b, c, d):
    """(cos a, sin a cos b e^{ic}, sin a sin b e^{id}), broadcasting."""
    a, b, c, d = np.broadcast_arrays(*map(np.asarray, (a, b, c, d)))
    return np.stack(
        [np.cos(a) + 0j, np.sin(a) * np.cos(b) * np.exp(1j * c), np.sin(a) * np.sin(b) * np.exp(1j * d)],
        axis=-1,
    )


def qubit_ray(t, p):
    t, p = np.broadcast_arrays(np.asarray(t), np.asarray(p))
    return np.stack([np.cos(t / 2) + 0j, np.exp(1j * p) * np.sin(t / 2)], axis=-1)


def _qutrit_angles(v):
    v = np.asarray(v, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    if abs(v[0]) > 1e-12:
        v = v * np.conj(v[0]) / abs(v[0])
    a = np.arccos(np.clip(abs(v[0]), 0, 1))
    b = np.arctan2(abs(v[2]), abs(v[1]))
    return np.array([a, b, np.angle(v[1]), np.angle(v[2])])


def _qubit_angles(w):
    w = np.asarray(w, dtype=np.complex128)
    w = w / np.linalg.norm(w)
    if abs(w[0]) > 1e-12:
        w = w * np.conj(w[0]) / abs(w[0])
    return np.array([2 * np.arccos(np.clip(abs(w[0]), 0, 1)), np.angle(w[1])])


def _perp2(w):
    return np.stack([np.conj(w[..., 1]), -np.conj(w[..., 0])], axis=-1)


def _pairs(k):
    return np.triu_indices(k, 1)


def _offdiag_overlaps(vecs):
    """Complex <v_k|v_l> for k < l along the last two axes (..., K, d)."""
    i, j = _pairs(vecs.shape[-2])
    return np.einsum("...pd,...pd->...p", vecs[..., i, :].conj(), vecs[..., j, :])


# --- skeleton overlaps (exact, used for polishing) ----------------------------


def _af_overlaps(psi, w):
    out = []
    for v in (w, _perp2(w)):
        phi = np.einsum("...a,kab->...kb", v.conj(), psi)
        out.append(_offdiag_overlaps(phi))
    return np.concatenate(out, axis=-1)


def _bob_rank1_overlaps(psi, theta):
    vecs = np.einsum("kab,...b->...ka", psi, theta.conj())
    return _offdiag_overlaps(vecs)


def _rest_states(psi, theta):
    v = np.einsum("kab,...b->...ka", psi, theta.conj())
    return psi - np.einsum("...ka,...b->...kab", v, theta)


def _bfa_overlaps(psi, theta, w):
    rest = _rest_states(psi, theta)
    return np.concatenate([_bob_rank1_overlaps(psi, theta), _af_overlaps_batched(rest, w)], axis=-1)


def _af_overlaps_batched(rest, w):
    out = []
    for v in (w, _perp2(w)):
        phi = np.einsum("...a,...kab->...kb", v.conj(), rest)
        out.append(_offdiag_overlaps(phi))
    return np.concatenate(out, axis=-1)


def _third(theta, chi):
    """Unit vector completing {theta, chi} to an orthonormal basis of C^3."""
    return np.conj(np.cross(theta, chi))


def _project_out(theta, z):
    z = z - theta * np.sum(theta.conj() * z, axis=-1, keepdims=True)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def _bfb_overlaps(psi, theta, z):
    chi = _project_out(theta, z)
    chi2 = _third(theta, chi)
    return np.concatenate(
        [_bob_rank1_overlaps(psi, x) for x in (theta, chi, chi2)], axis=-1
    )


SKELETONS = {
    # name: (number of angles, rounds)
    "alice-first": (2, 2),
    "bob-rank1-then-alice": (6, 3),
    "bob-basis": (8, 2),
}


def skeleton_overlaps(name, psi, x):
    x = np.asarray(x, dtype=float)
    if name == "alice-first":
        return _af_overlaps(psi, qubit_ray(x[0], x[1]))
    theta = qutrit_ray(*x[:4])
    if name == "bob-rank1-then-alice":
        return _bfa_overlaps(psi, theta, qubit_ray(x[4], x[5]))
    return _bfb_overlaps(psi, theta, qutrit_ray(*x[4:8]))


def skeleton_defect(name, psi, x):
    ov = skeleton_overlaps(name, psi, x)
    return float(np.abs(ov).max(initial=0.0))


def skeleton_protocol(name, states, x):
    states = as_state_set(states)
    psi = states.normalized().states
    x = np.asarray(x, dtype=float)
    if name == "alice-first":
        basis = AliceBasis.from_vector(qubit_ray(x[0], x[1]))
        return alice_first_protocol(states, basis)
    theta = qutrit_ray(*x[:4])
    p = np.outer(theta, theta.conj())
    if name == "bob-rank1-then-alice":
        w = qubit_ray(x[4], x[5])
        alice = basis_measurement(Party.ALICE, [w, _perp2(w)])
        meas = projective(Party.BOB, [p, np.eye(3) - p], tol=1e-7)

        def follow(i, sub):
            if i == 0:
                return identification(Party.ALICE, sub)
            return identify_after(alice, sub, Party.BOB)

        root = measure_then(meas, psi, follow)
    else:
        chi = _project_out(theta, qutrit_ray(*x[4:8]))
        chi2 = _third(theta, chi)
        meas = projective(Party.BOB, [np.outer(v, v.conj()) for v in (theta, chi, chi2)], tol=1e-7)
        root = measure_then(meas, psi, lambda i, sub: identification(Party.ALICE, sub))
    return ProtocolTree(root, states.dims)


# --- grids ----------------------------------------------------------------


def _qubit_grid(n):
    t = np.linspace(0, np.pi, n)
    p = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return [t, p], [t[1] - t[0], p[1] - p[0]]


def _qutrit_grid(n):
    a = np.linspace(0, np.pi / 2, n)
    c = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return [a, a, c, c], [a[1] - a[0], a[1] - a[0], c[1] - c[0], c[1] - c[0]]


def _mesh(axes):
    g = np.meshgrid(*axes, indexing="ij")
    return np.stack([x.ravel() for x in g], axis=-1)


def _bloch_rows(g):
    """Rows (..., 2P, 3) and trace terms (..., P) for w^dag g w over batched 2x2 forms."""
    t = np.einsum("...xy,kyx->...k", g, PAULI)
    tr = np.trace(g, axis1=-2, axis2=-1)
    rows = np.concatenate([t.real, t.imag], axis=-2)
    return rows, tr, t


def _best_bloch(g):
    """Unit Bloch vector minimizing the spread of w^dag g w between the two outcomes.

    Returns (n, defect) where defect is the exact max over pairs and both
    basis vectors of |(tr g +- n.t)/2|.
    """
    rows, tr, t = _bloch_rows(g)
    # smallest right singular vector, via the 3 x 3 normal matrix
    n = np.linalg.eigh(np.swapaxes(rows, -1, -2) @ rows)[1][..., :, 0]
    nt = np.einsum("...pk,...k->...p", t, n)
    d = np.maximum(np.abs(tr + nt), np.abs(tr - nt)) / 2
    return n, d.max(axis=-1, initial=0.0)


def _bloch_to_angles(n):
    return np.arccos(np.clip(n[..., 2], -1, 1)), np.arctan2(n[..., 1], n[..., 0])


def _theta_scores(psi, thetas):
    """Per-theta best completions: returns (score, inner kind, inner params)."""
    k = psi.shape[0]
    i, j = _pairs(k)
    t1 = np.abs(_bob_rank1_overlaps(psi, thetas)).max(axis=-1, initial=0.0)
    # Alice first on the theta-perp branch
    rest = _rest_states(psi, thetas)
    g = rest[..., i, :, :].conj() @ np.swapaxes(rest[..., j, :, :], -1, -2)
    n_af, d_af = _best_bloch(g)
    # Bob basis of theta-perp
    u = _perp_basis(thetas)
    q = np.einsum("pab,pac->pbc", psi[i].conj(), psi[j])  # C_k^dag C_l
    gq = np.swapaxes(u, -1, -2)[..., None, :, :] @ q @ u.conj()[..., None, :, :]
    n_ch, d_ch = _best_bloch(gq)
    af_better = d_af <= d_ch
    score = np.maximum(t1, np.minimum(d_af, d_ch))
    return score, af_better, n_af, n_ch, u


def _perp_basis(thetas):
    """Orthonormal columns spanning theta-perp, smooth away from coordinate switches."""
    j = np.argmin(np.abs(thetas), axis=-1)
    e = np.eye(3)[j]
    x = e - thetas * np.take_along_axis(thetas, j[..., None], -1).conj()
    x /= np.linalg.norm(x, axis=-1, keepdims=True)
    y = _third(thetas, x)
    return np.stack([x, y], axis=-1)


def _inner_params(kind_af, n_af, n_ch, u):
    if kind_af:
        # the form is w^dag g w with w the conjugate of Alice's vector
        t, p = _bloch_to_angles(n_af)
        return "bob-rank1-then-alice", np.array([t, -p])
    # chi = u conj(w) for the qubit w of Bloch vector n
    w = qubit_ray(*_bloch_to_angles(n_ch))
    chi = u @ np.conj(w)
    return "bob-basis", _qutrit_angles(chi)


def _top_cells(scores, count, pts=None):
    """Indices of the ``count`` lowest scores, skipping repeated points."""
    order = np.lexsort((np.arange(len(scores)), scores))
    if pts is None:
        return order[:count]
    out, seen = [], set()
    for i in order:
        key = tuple(np.round(pts[i], 10))
        if key not in seen:
            seen.add(key)
            out.append(i)
            if len(out) == count:
                break
    return np.array(out, dtype=int)


def _refine(center, steps, factor=4, per_axis=9):
    axes = [c + np.linspace(-s, s, per_axis) for c, s in zip(center, steps)]
    return _mesh(axes), [s / factor for s in steps]


def _polish(name, psi, x0):
    def resid(x):
        ov = skeleton_overlaps(name, psi, x)
        return np.concatenate([ov.real, ov.imag])

    r = least_squares(resid, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
    return r.x


def lpcc_grid_search(states, grid=None, max_rounds=3):
    """Best projective protocol found for a 2 x 3 set over the searched skeletons."""
    grid = GridSpec() if grid is None else grid
    states = as_state_set(states)
    if states.dims != (2, 3):
        raise ValueError("lpcc_grid_search expects 2x3 states")
    psi = states.normalized().states
    n = grid.points_per_angle
    cands = []  # (defect, skeleton, params)
    evaluated = 0

    # Alice first
    axes, steps = _qubit_grid(max(n, 8) * 2)
    pts = _mesh(axes)
    sc = np.abs(_af_overlaps(psi, qubit_ray(pts[:, 0], pts[:, 1]))).max(axis=-1, initial=0.0)
    evaluated += len(pts)
    centers = pts[_top_cells(sc, grid.top_cells, pts)]
    for _ in range(grid.refinement_levels):
        new = []
        for c in centers:
            local, _ = _refine(c, steps)
            new.append(local)
        steps = [s / 4 for s in steps]
        pts = np.concatenate(new)
        sc = np.abs(_af_overlaps(psi, qubit_ray(pts[:, 0], pts[:, 1]))).max(axis=-1, initial=0.0)
        evaluated += len(pts)
        centers = pts[_top_cells(sc, grid.top_cells, pts)]
    for c in centers:
        cands.append((skeleton_defect("alice-first", psi, c), "alice-first", c))

    # Bob first with a rank-1 projector
    if max_rounds >= 2:
        axes, steps = _qutrit_grid(n)
        pts = _mesh(axes)
        best = []
        for level in range(grid.refinement_levels + 1):
            scores, _, _, _, _ = _theta_scores_chunked(psi, pts)
            evaluated += len(pts)
            top = pts[_top_cells(scores, grid.top_cells, pts)]
            best = top
            if level < grid.refinement_levels:
                pts = np.concatenate([_refine(c, steps)[0] for c in top])
                steps = [s / 4 for s in steps]
        thetas = qutrit_ray(*best.T)
        score, af, n_af, n_ch, u = _theta_scores(psi, thetas)
        for idx in range(len(best)):
            kinds = [True, False] if max_rounds >= 3 else [False]
            for kind in kinds:
                name, inner = _inner_params(kind, n_af[idx], n_ch[idx], u[idx])
                x = np.concatenate([best[idx], inner])
                cands.append((skeleton_defect(name, psi, x), name, x))

    if grid.polish:
        polished = []
        by_shape = {}
        for c in sorted(cands, key=lambda c: c[0]):
            by_shape.setdefault(c[1], []).append(c)
        for d, name, x in [c for group in by_shape.values() for c in group[: grid.top_cells]]:
            x2 = _polish(name, psi, x)
            d2 = skeleton_defect(name, psi, x2)
            polished.append((d2, name, x2) if d2 < d else (d, name, x))
        cands += polished
    cands = [c for c in cands if SKELETONS[c[1]][1] <= max_rounds]
    d, name, x = min(cands, key=lambda c: c[0])
    proto = skeleton_protocol(name, states, x) if d < grid.defect_threshold else None
    return SearchReport(
        float(d), proto, name, tuple(float(v) for v in x),
        {"evaluated": int(evaluated), "skeletons": sorted({c[1] for c in cands})},
    )


def _theta_scores_chunked(psi, pts, chunk=40000):
    out = []
    for s in range(0, len(pts), chunk):
        th = qutrit_ray(*pts[s : s + chunk].T)
        out.append(_theta_scores(psi, th)[0])
    return np.concatenate(out), None, None, None, None


def alice_first_grid_defect(states, points=60, polish=True):
    """Dense (a, b)-grid oracle for the Alice-first test: min over bases of the defect."""
    psi = as_state_set(states).normalized().states
    axes, _ = _qubit_grid(points)
    pts = _mesh(axes)
    sc = np.abs(_af_overlaps(psi, qubit_ray(pts[:, 0], pts[:, 1]))).max(axis=-1, initial=0.0)
    best = pts[_top_cells(sc, 5)]
    d = float(sc.min())
    if polish:
        for c in best:
            x = _polish("alice-first", psi, c)
            d = min(d, skeleton_defect("alice-first", psi, x))
    return d


# --- round-limited search ---------------------------------------------------


def _support_overlap_defect(branch, party):
    """Largest Frobenius overlap between local supports, as a finishing defect."""
    i, j = _pairs(branch.shape[0])
    if len(i) == 0:
        return 0.0
    if party is Party.ALICE:
        g = np.einsum("pab,pac->pbc", branch[i].conj(), branch[j])
    else:
        g = np.einsum("pab,pcb->pac", branch[i].conj(), branch[j])
    return float(np.linalg.norm(g.reshape(len(i), -1), axis=1).max())


def _finish_defect(branch):
    return min(_support_overlap_defect(branch, Party.ALICE), _support_overlap_defect(branch, Party.BOB))


def _finisher(branch):
    a = _support_overlap_defect(branch, Party.ALICE)
    return Party.ALICE if a <= _support_overlap_defect(branch, Party.BOB) else Party.BOB


def splits_protocol(states, path):
    """Tree for a chain of rank-1-versus-rest splits ``[(party, x), ...]``."""
    states = as_state_set(states)
    psi = states.normalized().states

    def build(k, branch):
        if k == len(path):
            return identification(_finisher(branch), branch)
        party, x = path[k]
        p = np.outer(x, x.conj())
        meas = projective(party, [p, np.eye(len(x)) - p], tol=1e-7)
        return measure_then(
            meas, branch,
            lambda i, sub: identification(party.other, sub) if i == 0 else build(k + 1, sub),
        )

    return ProtocolTree(build(0, psi), states.dims)


def _support_grid(q, n):
    """Unit vectors q @ z on a grid of the support span(q); standard coordinates first."""
    d = q.shape[1]
    if d == 1:
        return q.T.copy()
    if d == 2:
        a = np.linspace(0, np.pi / 2, n)
        c = np.linspace(0, 2 * np.pi, n, endpoint=False)
        pts = _mesh([a, c])
        z = np.stack([np.cos(pts[:, 0]) + 0j, np.sin(pts[:, 0]) * np.exp(1j * pts[:, 1])], axis=-1)
    elif d == 3:
        axes, _ = _qutrit_grid(n)
        pts = _mesh(axes)
        z = qutrit_ray(*pts.T)
    else:
        raise ValueError("round search supports local supports of dimension <= 3")
    return z @ q.T


def _shrink(q, x):
    """Orthonormal basis of span(q) minus x, by Gram-Schmidt on projected standard vectors."""
    dim = q.shape[0]
    proj = q @ q.conj().T
    proj = proj - np.outer(x, x.conj())
    cols = []
    for e in np.eye(dim):
        r = proj @ e
        for c in cols:
            r = r - c * np.vdot(c, r)
        if np.linalg.norm(r) > 1e-8:
            cols.append(r / np.linalg.norm(r))
    return np.array(cols).T if cols else np.zeros((dim, 0), dtype=np.complex128)


@dataclass
class _Beam:
    acc: float
    branch: np.ndarray
    supports: dict
    path: list


def _leaf_defect(branch, party, xs):
    """Per candidate x: overlap of the other party's vectors after projecting onto x."""
    if party is Party.ALICE:
        vecs = np.einsum("xa,kab->xkb", xs.conj(), branch)
    else:
        vecs = np.einsum("kab,xb->xka", branch, xs.conj())
    ov = _offdiag_overlaps(vecs)
    return np.abs(ov).max(axis=-1, initial=0.0)


def _rest_after(branch, party, x):
    p = np.eye(len(x)) - np.outer(x, x.conj())
    if party is Party.ALICE:
        return np.einsum("ab,kbc->kac", p, branch)
    return np.einsum("kab,cb->kac", branch, p)


def min_rounds_search(states, r, grid=None, beam_width=5):
    """Best defect over protocols of at most ``r`` rounds of the searched shape.

    Shape: up to r-1 rank-1-versus-rest splits (either party, vector inside
    that party's current support), each rank-1 branch finished by the other
    party, and the last rest branch finished by one party alone.
    """
    grid = GridSpec() if grid is None else grid
    states = as_state_set(states)
    psi = states.normalized().states
    m, n = states.dims
    start = _Beam(0.0, psi, {Party.ALICE: np.eye(m, dtype=np.complex128),
                             Party.BOB: np.eye(n, dtype=np.complex128)}, [])
    best = (_finish_defect(psi), [])
    beams = [start]
    evaluated = 0
    for _ in range(max(r - 1, 0)):
        children = []
        for bi, b in enumerate(beams):
            for party in (Party.ALICE, Party.BOB):
                q = b.supports[party]
                if q.shape[1] < 2:
                    continue
                xs = _support_grid(q, grid.points_per_angle)
                evaluated += len(xs)
                leaf = np.maximum(_leaf_defect(b.branch, party, xs), b.acc)
                # rank by the leaf defect, then by how finishable the rest is
                primary = np.round(leaf, 9)
                order = np.lexsort((np.arange(len(xs)), primary))
                taken = 0
                for idx in order:
                    if taken >= 4 * beam_width:
                        break
                    x = xs[idx]
                    rest = _rest_after(b.branch, party, x)
                    fin = _finish_defect(rest)
                    children.append((primary[idx], fin, bi, party.value, int(idx), leaf[idx], x, party, rest, b))
                    taken += 1
        if not children:
            break
        children.sort(key=lambda c: c[:5])
        beams = []
        seen = []
        for prim, fin, _, _, _, leaf, x, party, rest, parent in children:
            key = (id(parent), party)
            if any(k == key and 1 - abs(np.vdot(x, y)) < 1e-9 for k, y in seen):
                continue
            seen.append((key, x))
            sup = dict(parent.supports)
            sup[party] = _shrink(parent.supports[party], x)
            nb = _Beam(float(leaf), rest, sup, parent.path + [(party, x)])
            beams.append(nb)
            total = max(float(leaf), fin)
            if total < best[0]:
                best = (total, nb.path)
            if len(beams) >= beam_width:
                break
    proto = splits_protocol(states, best[1]) if best[0] < grid.defect_threshold else None
    return SearchReport(
        float(best[0]),
        proto,
        "rank1-splits",
        (),
        {"evaluated": int(evaluated), "rounds": r, "splits": [p.value for p, _ in best[1]]},
    )
