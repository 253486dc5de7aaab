"""Small dense complex linear algebra used throughout the package.

Vectors are 1-D ``complex128`` arrays, matrices 2-D ones.  Dimensions in
this package never exceed a few dozen, so everything is plain numpy.
"""

import numpy as np

# zero / orthogonality tests
ORTH_TOL = 1e-9
# singular values below RANK_RTOL * s_max count as zero
RANK_RTOL = 1e-7


class DependentVectorsError(ValueError):
    """Raised when a routine needs linearly independent input vectors."""


def as_vec(v):
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_mat(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def kron(a, b):
    return np.kron(as_mat(a), as_mat(b))


def svd_singular_values(a):
    """Singular values of ``a``, nonincreasing, length ``min(rows, cols)``."""
    try:
        return np.linalg.svd(as_mat(a), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"SVD did not converge: {exc}") from exc


def numerical_rank(a, rtol=RANK_RTOL, atol=1e-14):
    s = svd_singular_values(a)
    if s[0] <= atol:
        return 0
    return int(np.sum(s > rtol * s[0]))


def normalize(v):
    v = as_vec(v)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def same_ray(u, v, tol=ORTH_TOL):
    """True when u and v differ only by a nonzero factor."""
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return False
    return 1 - abs(np.vdot(u, v)) / (nu * nv) < tol


def span_basis(vectors, dim=None, rtol=RANK_RTOL):
    """Orthonormal basis (as columns) of the span of ``vectors``."""
    vectors = [as_vec(v) for v in vectors]
    if not vectors:
        return np.zeros((dim or 0, 0), dtype=np.complex128)
    m = np.column_stack(vectors)
    if not np.any(m):
        return np.zeros((m.shape[0], 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s > rtol * s[0]))
    return u[:, :r]


def orthonormal_complement(vectors, dim):
    """Orthonormal basis of the orthogonal complement of span(vectors).

    The complement is built by projecting the standard basis vectors in
    order and orthonormalizing what survives, so complements of coordinate
    subspaces come back as standard basis vectors.
    """
    vectors = [as_vec(v) for v in vectors]
    for v in vectors:
        if v.size != dim:
            raise ValueError(f"vector of length {v.size} in dimension {dim}")
    if vectors:
        if numerical_rank(np.column_stack(vectors)) < len(vectors):
            raise DependentVectorsError("input vectors are linearly dependent")
        q = span_basis(vectors)
    else:
        q = np.zeros((dim, 0), dtype=np.complex128)
    out = []
    for j in range(dim):
        e = np.zeros(dim, dtype=np.complex128)
        e[j] = 1
        r = e - q @ (q.conj().T @ e)
        for w in out:
            r = r - w * np.vdot(w, r)
        n = np.linalg.norm(r)
        if n > 1e-8:
            # second pass keeps orthogonality at machine precision
            r = r - q @ (q.conj().T @ r)
            for w in out:
                r = r - w * np.vdot(w, r)
            out.append(r / np.linalg.norm(r))
        if len(out) == dim - q.shape[1]:
            break
    return out


def dual_basis(vectors):
    """Vectors eta_i with <eta_i|phi_j> = delta_ij for a basis phi."""
    vectors = [as_vec(v) for v in vectors]
    g = np.column_stack(vectors)
    if g.shape[0] != g.shape[1]:
        raise ValueError("dual basis needs d vectors in dimension d")
    if numerical_rank(g) < g.shape[1]:
        raise DependentVectorsError("input vectors are linearly dependent")
    eta = np.linalg.inv(g).conj().T
    return [eta[:, i] for i in range(g.shape[1])]


def projector(vectors):
    """Orthogonal projector onto span(vectors)."""
    q = span_basis(vectors)
    return q @ q.conj().T


def ket(i, dim):
    v = np.zeros(dim, dtype=np.complex128)
    v[i] = 1
    return v
