"""Finite-dimensional Grassmannian geometry over configurable norms.

Subspace distance is the Hausdorff distance between intersections of
subspaces with the unit ball of the chosen norm (l1, l2 or linf).  For l2
the one-sided sups have exact singular-value expressions; for l1/linf they
are estimated by sampling plus local polish over basis coefficients, with
the per-point distances to a subspace solved exactly by enumerating the
basic solutions of the corresponding linear program (batched numpy solves).

Also provides nice bases (unit vectors each at distance exactly 1 from the
span of the previous ones), oblique projections, and good complements of
nested filtrations.
"""

import itertools
import math
import warnings

import numpy as np
from scipy import optimize

__all__ = [
    "NORM_TAGS",
    "Subspace",
    "ProjectionPair",
    "vector_norm",
    "operator_norm",
    "distance_point_subspace",
    "grassmann_distance",
    "one_sided_hausdorff",
    "nice_basis",
    "is_eps_nice",
    "projection",
    "good_complement",
]

NORM_TAGS = ("l1", "l2", "linf")

RANK_SV_CUTOFF = 1e-10      # smallest singular value of an orthonormalized basis
COMPLEMENT_CONDITION = 1e12  # condition-number cutoff for oblique projections

# enumeration guard: beyond this many index subsets fall back to linprog
_MAX_SUBSETS = 20000


class DimensionMismatchError(ValueError):
    pass


class DegenerateSubspaceError(ValueError):
    pass


class ComplementarityError(ValueError):
    pass


class FiltrationError(ValueError):
    pass


def _check_tag(norm):
    if norm not in NORM_TAGS:
        raise ValueError(f"unknown norm tag {norm!r}; expected one of {NORM_TAGS}")
    return norm


def vector_norm(x, norm="l2", axis=-1):
    x = np.asarray(x, dtype=float)
    _check_tag(norm)
    if norm == "l1":
        return np.abs(x).sum(axis=axis)
    if norm == "linf":
        return np.abs(x).max(axis=axis)
    return np.sqrt((x * x).sum(axis=axis))


def operator_norm(M, norm="l2"):
    """Induced operator norm: exact column/row-sum formulas for l1/linf,
    largest singular value for l2."""
    M = np.asarray(M, dtype=float)
    _check_tag(norm)
    if norm == "l1":
        return float(np.abs(M).sum(axis=0).max())
    if norm == "linf":
        return float(np.abs(M).sum(axis=1).max())
    if not np.all(np.isfinite(M)):
        return math.inf
    return float(np.linalg.svd(M, compute_uv=False)[0]) if M.size else 0.0


def _orthonormalize(B):
    """Orthonormal basis of the column span with its singular values."""
    B = np.asarray(B, dtype=float)
    if B.ndim != 2:
        raise DimensionMismatchError("basis must be a 2-D array of columns")
    if B.shape[1] == 0:
        return B.copy(), np.zeros(0)
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    return U, s


class Subspace:
    """A k-dimensional subspace of R^d carried by basis columns and a norm tag."""

    def __init__(self, basis, norm="l2"):
        basis = np.array(basis, dtype=float)
        if basis.ndim == 1:
            basis = basis[:, None]
        _check_tag(norm)
        d, k = basis.shape
        if k > d:
            raise DegenerateSubspaceError(f"{k} basis vectors in ambient dim {d}")
        if k > 0:
            # the span is invariant under column scaling, so normalize each
            # column before the rank test: mixed-magnitude bases of perfectly
            # transverse directions must pass
            scales = np.sqrt((basis * basis).sum(axis=0))
            if not np.all(np.isfinite(scales)) or np.any(scales <= 0.0):
                raise DegenerateSubspaceError("basis has a zero or non-finite column")
            onb, s = _orthonormalize(basis / scales[None, :])
            if s[-1] / s[0] <= RANK_SV_CUTOFF:
                raise DegenerateSubspaceError(
                    f"basis has numerical rank below {k} "
                    f"(relative smallest singular value {s[-1] / s[0]:.2e})")
        else:
            onb, _ = _orthonormalize(basis)
        self.basis = basis
        self.norm = norm
        self._onb = onb

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def orthonormal_basis(self):
        return self._onb

    def contains(self, x, tol=1e-8):
        x = np.asarray(x, dtype=float)
        r = x - self._onb @ (self._onb.T @ x)
        nx = np.sqrt((x * x).sum())
        return np.sqrt((r * r).sum()) <= tol * max(1.0, nx)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, norm={self.norm})"


def _as_basis(W):
    if isinstance(W, Subspace):
        return W.basis
    B = np.asarray(W, dtype=float)
    return B[:, None] if B.ndim == 1 else B


# ---------------------------------------------------------------------------
# exact point-to-subspace distances
#
# l1: some minimizer of ||x - Bc||_1 has >= k zero residuals (an LP basic
#     solution), so the optimum is the best candidate over k-subsets.
# linf: some minimizer has k+1 residuals of equal magnitude with fixed
#     signs, enumerated over (k+1)-subsets and sign patterns.
# Every candidate is scored by its true objective, so the minimum over
# candidates is an upper bound that is attained in the generic case.


def _subsets(d, k):
    return list(itertools.combinations(range(d), k))


def _l2_dist_batch(X, B):
    Q, _ = _orthonormalize(B)
    C0 = X @ Q                     # coefficients in the orthonormal basis
    R = X - C0 @ Q.T
    dist = np.sqrt((R * R).sum(axis=1))
    # coefficients w.r.t. the original basis columns
    coef, *_ = np.linalg.lstsq(B, X.T, rcond=None)
    return dist, coef.T


def _l1_dist_batch(X, B):
    m, d = X.shape
    k = B.shape[1]
    # count before materializing: C(d, k) overflows memory long before the
    # list comparison would reject it
    if math.comb(d, k) > _MAX_SUBSETS:
        return None
    S = np.array(_subsets(d, k))                         # (ns, k)
    A = B[S, :]                                          # (ns, k, k)
    dets = np.abs(np.linalg.det(A))
    ok = dets > 1e-300
    S, A = S[ok], A[ok]
    # chunk over candidate points: the intermediates are (chunk, ns, d)
    step = max(1, int(4e6 / max(S.shape[0] * (k + d), 1)))
    dist = np.empty(m)
    coef = np.empty((m, k))
    for lo in range(0, m, step):
        Xc = X[lo:lo + step]
        XS = Xc[:, S]                                    # (mc, ns, k)
        with np.errstate(all="ignore"):
            C = np.linalg.solve(A[None], XS[..., None])[..., 0]
            R = Xc[:, None, :] - np.einsum("msk,dk->msd", C, B)
            obj = np.abs(R).sum(axis=2)                  # (mc, ns)
        obj = np.where(np.isfinite(obj), obj, np.inf)
        best = obj.argmin(axis=1)
        rows = np.arange(Xc.shape[0])
        dist[lo:lo + step] = obj[rows, best]
        coef[lo:lo + step] = C[rows, best, :]
    return dist, coef


def _linf_dist_batch(X, B):
    m, d = X.shape
    k = B.shape[1]
    if k + 1 > d:
        # k = d: the span is everything
        coef = np.linalg.solve(B, X.T).T if k == d else None
        return np.zeros(m), coef
    if math.comb(d, k + 1) * (2 ** k) > _MAX_SUBSETS:
        return None
    S = np.array(_subsets(d, k + 1))                     # (ns, k+1)
    signs = np.array(list(itertools.product([1.0], *([[-1.0, 1.0]] * k))))
    ns, nsig = S.shape[0], signs.shape[0]
    M = np.empty((ns, nsig, k + 1, k + 1))
    M[:, :, :, :k] = B[S, :][:, None, :, :]
    M[:, :, :, k] = signs[None, :, :]
    M = M.reshape(ns * nsig, k + 1, k + 1)
    # drop singular sign-pattern systems before the batched solve: an exactly
    # singular member raises instead of returning inf
    dets = np.abs(np.linalg.det(M))
    ok = dets > 1e-300
    M = M[ok]
    sub_of = np.repeat(np.arange(ns), nsig)[ok]
    nf = M.shape[0]
    dist = np.full(m, np.inf)
    coef = np.zeros((m, k))
    # chunk over candidate points: the intermediates are (chunk, nf, d)
    step = max(1, int(4e6 / max(nf * (k + 1 + d), 1)))
    for lo in range(0 if nf else m, m, step):
        Xc = X[lo:lo + step]
        with np.errstate(all="ignore"):
            XS = Xc[:, S[sub_of]]                        # (mc, nf, k+1)
            Z = np.linalg.solve(M[None], XS[..., None])[..., 0]
            C = Z[..., :k]                               # (mc, nf, k)
            R = Xc[:, None, :] - np.einsum("mfk,dk->mfd", C, B)
            obj = np.abs(R).max(axis=2)                  # (mc, nf)
        obj = np.where(np.isfinite(obj), obj, np.inf)
        best = obj.argmin(axis=1)
        rows = np.arange(Xc.shape[0])
        dist[lo:lo + step] = obj[rows, best]
        coef[lo:lo + step] = C[rows, best, :]
    # lstsq candidate catches the x-in-span case exactly
    ls, *_ = np.linalg.lstsq(B, X.T, rcond=None)
    ls = ls.T
    with np.errstate(all="ignore"):
        obj_ls = np.abs(X - ls @ B.T).max(axis=1)
    better = obj_ls < dist
    dist = np.where(better, obj_ls, dist)
    coef[better] = ls[better]
    return dist, coef


def _linprog_dist(x, B, norm, ball=False):
    """Exact LP fallback for l1/linf point-subspace distance."""
    d, k = B.shape
    if norm == "l1":
        # vars: c (k), t (d) [, u (d)]
        nv = k + d + (d if ball else 0)
        cost = np.zeros(nv)
        cost[k:k + d] = 1.0
        rows, rhs = [], []
        for sgn in (1.0, -1.0):
            blk = np.zeros((d, nv))
            blk[:, :k] = -sgn * B
            blk[:, k:k + d] = -np.eye(d)
            rows.append(blk)
            rhs.append(-sgn * x)
        if ball:
            for sgn in (1.0, -1.0):
                blk = np.zeros((d, nv))
                blk[:, :k] = sgn * B
                blk[:, k + d:] = -np.eye(d)
                rows.append(blk)
                rhs.append(np.zeros(d))
            blk = np.zeros((1, nv))
            blk[0, k + d:] = 1.0
            rows.append(blk)
            rhs.append(np.ones(1))
    else:
        # vars: c (k), s (1)
        nv = k + 1
        cost = np.zeros(nv)
        cost[k] = 1.0
        rows, rhs = [], []
        for sgn in (1.0, -1.0):
            blk = np.zeros((d, nv))
            blk[:, :k] = -sgn * B
            blk[:, k] = -1.0
            rows.append(blk)
            rhs.append(-sgn * x)
        if ball:
            for sgn in (1.0, -1.0):
                blk = np.zeros((d, nv))
                blk[:, :k] = sgn * B
                rows.append(blk)
                rhs.append(np.ones(d))
    res = optimize.linprog(cost, A_ub=np.vstack(rows), b_ub=np.concatenate(rhs),
                           bounds=[(None, None)] * nv, method="highs")
    if not res.success:
        raise RuntimeError(f"linprog distance solve failed: {res.message}")
    return float(res.fun), res.x[:k]


def _dist_batch(X, B, norm):
    """Distances (and coefficients) from rows of X to span(B), exact per norm."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if B.shape[1] == 0:
        return vector_norm(X, norm, axis=1), np.zeros((X.shape[0], 0))
    if norm == "l2":
        return _l2_dist_batch(X, B)
    out = _l1_dist_batch(X, B) if norm == "l1" else _linf_dist_batch(X, B)
    if out is not None:
        return out
    dists = np.empty(X.shape[0])
    coefs = np.empty((X.shape[0], B.shape[1]))
    for i, x in enumerate(X):
        dists[i], coefs[i] = _linprog_dist(x, B, norm)
    return dists, coefs


def distance_point_subspace(x, W, norm=None):
    """min over w in W of ||x - w||, by convex minimization over coefficients.

    The norm defaults to the subspace's tag.
    """
    B = _as_basis(W)
    if norm is None:
        norm = W.norm if isinstance(W, Subspace) else "l2"
    _check_tag(norm)
    x = np.asarray(x, dtype=float)
    if x.shape[0] != B.shape[0]:
        raise DimensionMismatchError("point and subspace ambient dims differ")
    d, _ = _dist_batch(x[None, :], B, norm)
    return float(d[0])


def _dist_ball_batch(X, B, norm):
    """Distances from rows of X to span(B) intersected with the unit ball."""
    if B.shape[1] == 0:
        return vector_norm(X, norm, axis=1)
    if norm == "l2":
        Q, _ = _orthonormalize(B)
        C0 = X @ Q
        nb = np.sqrt((C0 * C0).sum(axis=1))
        perp = X - C0 @ Q.T
        perp2 = (perp * perp).sum(axis=1)
        excess = np.maximum(nb - 1.0, 0.0)
        return np.sqrt(perp2 + excess * excess)
    dist, coef = _dist_batch(X, B, norm)
    wn = vector_norm(coef @ B.T, norm, axis=1)
    bad = wn > 1.0 + 1e-12
    if np.any(bad):
        for i in np.nonzero(bad)[0]:
            dist[i], _ = _linprog_dist(X[i], B, norm, ball=True)
    return dist


def _ball_sup_batch(X, B, norm):
    """Max over rows of X of the distance to span(B) intersected with the
    unit ball, plus per-row lower bounds (used only to rank polish starts).

    The span distance bounds the ball distance below; rescaling the
    unconstrained minimizer onto the sphere bounds it above.  Only rows whose
    upper bound reaches the running max need the exact ball-constrained LP,
    which prunes almost every call when the two subspaces are close.
    """
    if B.shape[1] == 0:
        vals = vector_norm(X, norm, axis=1)
        return vals, float(vals.max()) if vals.size else 0.0
    dist, coef = _dist_batch(X, B, norm)
    w = coef @ B.T
    wn = vector_norm(w, norm, axis=1)
    bad = wn > 1.0 + 1e-12
    if not np.any(bad):
        return dist, float(dist.max()) if dist.size else 0.0
    scale = np.maximum(wn, 1.0)
    ub = vector_norm(X - w / scale[:, None], norm, axis=1)
    ub = np.where(bad, ub, dist)
    best = float(dist.max())
    order = np.argsort(ub)[::-1]
    for i in order:
        if not bad[i] or ub[i] < best - 1e-15:
            continue
        di, _ = _linprog_dist(X[i], B, norm, ball=True)
        dist[i] = di
        if di > best:
            best = di
    return dist, best


# ---------------------------------------------------------------------------
# one-sided Hausdorff sups and the Grassmannian metric


def _unit_sphere_candidates(Bn, norm, n_samples, rng):
    """Candidate unit vectors of span(Bn); Bn columns are a nice basis."""
    k = Bn.shape[1]
    coefs = [np.eye(k), -np.eye(k)]
    if k > 1 and k <= 8:
        # corners of the coordinate box |a_i| <= 2^(k+1-i)
        box = 2.0 ** (k + 1 - np.arange(1, k + 1))
        signs = np.array(list(itertools.product(*([[-1.0, 1.0]] * k))))
        coefs.append(signs * box[None, :])
    if n_samples > 0:
        g = rng.standard_normal((n_samples, k))
        coefs.append(g)
        box = 2.0 ** (k + 1 - np.arange(1, k + 1))
        coefs.append(rng.uniform(-1.0, 1.0, (n_samples, k)) * box[None, :])
    A = np.vstack(coefs)
    Y = A @ Bn.T
    nrm = vector_norm(Y, norm, axis=1)
    ok = nrm > 1e-12
    return Y[ok] / nrm[ok][:, None], A[ok] / nrm[ok][:, None]


def one_sided_hausdorff(Y, W, n_samples=128, polish=True, seed=0):
    """sup over y in Y with ||y||=1 of the distance from y to (W intersect ball).

    Exact for l2; sampling plus Nelder-Mead polish over basis coefficients
    otherwise (a lower estimate of the true sup).
    """
    if Y.norm != W.norm or Y.ambient_dim != W.ambient_dim:
        raise DimensionMismatchError("norm tags and ambient dims must match")
    norm = Y.norm
    if Y.dim == 0:
        return 0.0
    if norm == "l2":
        QY = Y.orthonormal_basis()
        QW = W.orthonormal_basis()
        M = QY - QW @ (QW.T @ QY) if W.dim else QY
        s = np.linalg.svd(M, compute_uv=False)
        return float(min(s[0], 1.0)) if s.size else 0.0
    if Y.dim == 1:
        # the unit sphere of a line is one symmetric pair, and the unit
        # ball of W is symmetric, so a single point carries the sup exactly
        u = Y.basis[:, 0]
        u = u / vector_norm(u, norm)
        val = float(_dist_ball_batch(u[None, :], W.basis, norm)[0])
        return min(val, 1.0)
    Bn = np.column_stack(nice_basis(Y))
    BW = W.basis
    rng = np.random.default_rng(seed)
    cand, acand = _unit_sphere_candidates(Bn, norm, n_samples, rng)
    vals, best = _ball_sup_batch(cand, BW, norm)
    order = np.argsort(vals)[::-1]
    if polish:
        for idx in order[:3]:
            a0 = acand[idx]

            def neg(a):
                y = Bn @ a
                n = vector_norm(y, norm)
                if n < 1e-12:
                    return 0.0
                return -float(_dist_ball_batch((y / n)[None, :], BW, norm)[0])

            res = optimize.minimize(neg, a0, method="Nelder-Mead",
                                    options={"maxiter": 80 * Y.dim, "xatol": 1e-10,
                                             "fatol": 1e-12})
            best = max(best, -float(res.fun))
    return min(best, 1.0) if W.dim else 1.0


def grassmann_distance(Y, Yp, n_samples=128, polish=True, seed=0):
    """Hausdorff distance between the unit-ball sections of two subspaces.

    For l2 this is exact (principal angles); for l1/linf it is the max of
    two optimization-estimated one-sided sups.
    """
    if not isinstance(Y, Subspace) or not isinstance(Yp, Subspace):
        raise TypeError("grassmann_distance expects Subspace arguments")
    if Y.ambient_dim != Yp.ambient_dim:
        raise DimensionMismatchError("ambient dimensions differ")
    if Y.norm != Yp.norm:
        raise DimensionMismatchError("norm tags differ")
    a = one_sided_hausdorff(Y, Yp, n_samples, polish, seed)
    b = one_sided_hausdorff(Yp, Y, n_samples, polish, seed + 1)
    return max(a, b)


def principal_angles(Y, Yp):
    """Sines of the principal angles (l2 oracle; largest first)."""
    QY = Y.orthonormal_basis() if isinstance(Y, Subspace) else _orthonormalize(Y)[0]
    QP = Yp.orthonormal_basis() if isinstance(Yp, Subspace) else _orthonormalize(Yp)[0]
    s = np.linalg.svd(QY.T @ QP, compute_uv=False)
    s = np.clip(s, -1.0, 1.0)
    return np.sqrt(np.maximum(0.0, 1.0 - s * s))[::-1]


# ---------------------------------------------------------------------------
# nice bases


class NiceBasisError(RuntimeError):
    pass


def _sign_fix(y):
    i = int(np.argmax(np.abs(y)))
    return y if y[i] >= 0 else -y


def nice_basis(Y, eps=1e-8):
    """Unit vectors y_1..y_k with d(y_i, span(y_1..y_{i-1})) = 1 (up to eps).

    Normalizing the residual x - argmin_w ||x - w|| of each input basis
    column against the span of the previous outputs yields distance exactly
    1 in any norm, so the default eps is far inside the valid regime.
    """
    if not isinstance(Y, Subspace):
        Y = Subspace(Y)
    if Y.dim < 1:
        raise DegenerateSubspaceError("nice_basis needs dim >= 1")
    norm = Y.norm
    out = []
    for i in range(Y.dim):
        x = Y.basis[:, i]
        if out:
            prev = np.column_stack(out)
            _, coef = _dist_batch(x[None, :], prev, norm)
            r = x - prev @ coef[0]
        else:
            r = x.copy()
        nr = vector_norm(r, norm)
        if nr < 1e-12:
            raise NiceBasisError("rank-deficient input basis")
        out.append(_sign_fix(r / nr))
    vecs = out
    for i in range(1, len(vecs)):
        d = distance_point_subspace(vecs[i], Subspace(np.column_stack(vecs[:i]), norm))
        if d < 1.0 - eps:
            raise NiceBasisError(
                f"nice basis construction achieved distance {d} < 1 - {eps}")
    return vecs


def is_eps_nice(vectors, eps, norm="l2"):
    """True iff 1-eps < ||y_i|| < 1+eps and d(y_i, span of previous) > 1-eps."""
    vecs = [np.asarray(v, dtype=float) for v in vectors]
    k = len(vecs)
    if eps <= 0:
        return False
    if eps >= 2.0 ** (-k - 2):
        warnings.warn(
            f"eps={eps} is not below 2^-(k+2)={2.0 ** (-k - 2)}; "
            "the coordinate-bound lemma does not apply", stacklevel=2)
    for i, y in enumerate(vecs):
        n = vector_norm(y, norm)
        if not (1.0 - eps < n < 1.0 + eps):
            return False
        if i > 0:
            B = np.column_stack(vecs[:i])
            if _orthonormalize(B)[1][-1] <= RANK_SV_CUTOFF:
                return False
            d, _ = _dist_batch(y[None, :], B, norm)
            if d[0] <= 1.0 - eps:
                return False
    return True


# ---------------------------------------------------------------------------
# oblique projections


class ProjectionPair:
    """The projection onto Y along Z, with its basic quality diagnostics."""

    def __init__(self, Y, Z, matrix, condition):
        self.Y = Y
        self.Z = Z
        self.matrix = matrix
        self.condition = condition
        nrm = operator_norm(matrix, Y.norm)
        self.norm_value = nrm
        resid = operator_norm(matrix @ matrix - matrix, Y.norm)
        self.idempotency_error = resid / max(nrm, 1e-300)

    def __repr__(self):
        return (f"ProjectionPair(dim Y={self.Y.dim}, dim Z={self.Z.dim}, "
                f"norm={self.norm_value:.6g})")


def projection(Y, Z):
    """Matrix Pi with Pi y = y on Y and Pi z = 0 on Z (dim Y + dim Z = d)."""
    if Y.ambient_dim != Z.ambient_dim:
        raise DimensionMismatchError("ambient dims differ")
    d = Y.ambient_dim
    if Y.dim + Z.dim != d:
        raise DimensionMismatchError(
            f"dim(Y)+dim(Z) = {Y.dim}+{Z.dim} != ambient {d}")
    B = np.column_stack([Y.basis, Z.basis])
    condition = np.linalg.cond(B)
    if not np.isfinite(condition) or condition > COMPLEMENT_CONDITION:
        raise ComplementarityError(
            f"Y and Z are not numerically complementary (condition {condition:.3e})")
    target = np.column_stack([Y.basis, np.zeros((d, Z.dim))])
    Pi = target @ np.linalg.inv(B)
    pair = ProjectionPair(Y, Z, Pi, condition)
    if pair.idempotency_error > 1e-8:
        raise ComplementarityError(
            f"projection failed idempotency check ({pair.idempotency_error:.3e})")
    return pair


# ---------------------------------------------------------------------------
# good complements


def _argmax_distance_unit(V_basis, W_basis, norm, rng, n_samples=160):
    """Most-distant unit vector of span(V_basis) from span(W_basis)."""
    if norm == "l2":
        QV, _ = _orthonormalize(V_basis)
        if W_basis.shape[1]:
            QW, _ = _orthonormalize(W_basis)
            M = QV - QW @ (QW.T @ QV)
        else:
            M = QV
        _, _, vt = np.linalg.svd(M)
        u = QV @ vt[0]
        return _sign_fix(u / vector_norm(u, "l2"))
    sub = Subspace(V_basis, norm)
    Bn = np.column_stack(nice_basis(sub))
    cand, acand = _unit_sphere_candidates(Bn, norm, n_samples, rng)
    vals = _dist_batch(cand, W_basis, norm)[0] if W_basis.shape[1] else \
        vector_norm(cand, norm, axis=1)
    i0 = int(np.argmax(vals))
    a0 = acand[i0]

    def neg(a):
        y = Bn @ a
        n = vector_norm(y, norm)
        if n < 1e-12:
            return 0.0
        if W_basis.shape[1] == 0:
            return -1.0
        return -float(_dist_batch((y / n)[None, :], W_basis, norm)[0][0])

    res = optimize.minimize(neg, a0, method="Nelder-Mead",
                            options={"maxiter": 120 * sub.dim})
    a = res.x if -res.fun >= vals[i0] else a0
    u = Bn @ a
    return _sign_fix(u / vector_norm(u, norm))


def good_complement(filtration, eps=0.9, rotation_seed=None):
    """Complements U_j with V_{j+1} + U_j = V_j, built one unit vector at a
    time by picking the most-distant unit vector from W = V_{j+1} + U_{<j}
    (plus the vectors already chosen) inside V_j.

    Parameters
    ----------
    filtration : list of Subspace, nested V_1 > V_2 > ... > V_{l+1}
    eps : float
        Acceptance floor: every chosen vector must satisfy d(u, W) > 1-eps.
    rotation_seed : int or None
        If set, each greedy choice is blended with a seeded random direction
        of V_j (largest blend keeping the floor), giving a different
        deterministic valid selection for uniqueness probes.

    Returns a list of (U_j, diagnostics) pairs; diagnostics carry the
    measured distances and the projection norm of Pi_{U_j || V_{j+1}+U_{<j}}
    when the chain spans the ambient space.
    """
    if len(filtration) < 1:
        raise FiltrationError("empty filtration")
    norm = filtration[0].norm
    d = filtration[0].ambient_dim
    for V, Vn in zip(filtration, filtration[1:]):
        if Vn.dim > V.dim:
            raise FiltrationError("filtration dimensions must be non-increasing")
        if Vn.dim:
            gap = one_sided_hausdorff(Vn, V, n_samples=32, polish=False)
            if gap > 1e-8:
                raise FiltrationError(
                    f"nesting violation: one-sided sup {gap:.3e} > 1e-8")
    rng = np.random.default_rng(0 if rotation_seed is None else rotation_seed)
    out = []
    chosen_prior = []   # all U_i basis vectors with i < current level
    for j in range(len(filtration) - 1):
        Vj, Vn = filtration[j], filtration[j + 1]
        m = Vj.dim - Vn.dim
        if m == 0:
            continue
        level_vecs = []
        dists = []
        for _ in range(m):
            cols = ([Vn.basis] if Vn.dim else []) + \
                [v[:, None] for v in chosen_prior + level_vecs]
            W = np.column_stack(cols) if cols else np.zeros((d, 0))
            u = _argmax_distance_unit(Vj.basis, W, norm, rng)
            if rotation_seed is not None:
                u = _blend_direction(u, Vj, W, norm, rng, eps)
            du = distance_point_subspace(u, Subspace(W, norm)) if W.shape[1] else 1.0
            if du <= 1.0 - eps:
                raise FiltrationError(
                    f"good complement floor violated at level {j + 1}: "
                    f"d={du:.3e} <= {1 - eps}")
            level_vecs.append(u)
            dists.append(du)
        U = Subspace(np.column_stack(level_vecs), norm)
        diag = {"distances": dists,
                "per_factor_bound": float(np.prod([1.0 / x for x in dists]))}
        # projection norm is ambient-defined once the chain spans everything
        other = ([Vn.basis] if Vn.dim else []) + [v[:, None] for v in chosen_prior]
        Wfull = np.column_stack(other) if other else np.zeros((d, 0))
        if U.dim + Wfull.shape[1] == d:
            try:
                diag["projection_norm"] = projection(
                    U, Subspace(Wfull, norm)).norm_value
            except ComplementarityError:
                diag["projection_norm"] = math.inf
        out.append((U, diag))
        chosen_prior.extend(level_vecs)
    return out


def _blend_direction(u, Vj, W, norm, rng, eps):
    """Blend the greedy direction with a seeded one, keeping the floor."""
    g = rng.standard_normal(Vj.dim)
    w = Vj.basis @ g
    w = w - u * float(u @ w) / max(float(u @ u), 1e-300)
    nw = vector_norm(w, norm)
    if nw < 1e-12:
        return u
    w = w / nw
    Wsub = Subspace(W, norm) if W.shape[1] else None
    for theta in (0.45, 0.3, 0.15, 0.05, 0.0):
        v = math.cos(theta) * u + math.sin(theta) * w
        v = v / vector_norm(v, norm)
        dv = distance_point_subspace(v, Wsub) if Wsub is not None else 1.0
        if dv > 1.0 - eps:
            return _sign_fix(v)
    return u
