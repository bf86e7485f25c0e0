"""Constructive equivariant splitting by pushing forward good complements.

The fast spaces at w are limits of Y^(n) = L^(n)(sigma^(-n) w) U(sigma^(-n) w),
where U is a good complement of the slow filtration at the pulled-back
point.  The schedule doubles n until consecutive pushforwards are Cauchy
within tolerance; the reports keep the full distance traces, fitted decay
rates and transversality diagnostics.
"""

import math

import numpy as np

from .base import ParameterError
from .cocycle import scaled_forward_product
from .grassmann import (ComplementarityError, DegenerateSubspaceError,
                        Subspace, good_complement, grassmann_distance,
                        nice_basis, operator_norm, projection)
from .spectrum import filtration_at, growth_rate

__all__ = [
    "SplittingResult",
    "ConvergenceReport",
    "RankCollapseError",
    "pushforward_space",
    "compute_splitting",
    "check_equivariance",
    "check_growth",
    "uniqueness_probe",
    "temperedness_test",
    "TemperednessVerdict",
]

DEFAULT_TOL = 1e-6
TEMPERED_SLOPE_THRESHOLD = 0.02

# distances at double-precision saturation are excluded from rate fits
_FIT_FLOOR = 1e-13


class RankCollapseError(RuntimeError):
    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class ConvergenceReport:
    """Cauchy trace of one level: distances d(Y^(n), Y^(2n)) over the
    doubling schedule, with a log-linear decay fit."""

    def __init__(self, ns, distances, stopping_n, converged,
                 separations=None, g_series=None):
        self.ns = list(ns)
        self.distances = list(distances)
        self.stopping_n = stopping_n
        self.converged = bool(converged)
        self.separations = list(separations or [])
        self.g_series = list(g_series or [])
        self.alpha_fit, self.alpha_residual = self._fit()

    def _fit(self):
        pts = [(n, math.log(d)) for n, d in zip(self.ns, self.distances)
               if _FIT_FLOOR < d < math.inf]
        if len(pts) < 2:
            return math.nan, math.nan
        x = np.array([p[0] for p in pts], dtype=float)
        y = np.array([p[1] for p in pts], dtype=float)
        A = np.column_stack([x, np.ones_like(x)])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = y - A @ coef
        rms = float(np.sqrt(np.mean(resid * resid)))
        return -float(coef[0]), rms

    def to_dict(self):
        return {
            "ns": self.ns,
            "distances": [float(d) for d in self.distances],
            "alpha_fit": None if math.isnan(self.alpha_fit) else float(self.alpha_fit),
            "alpha_residual": None if math.isnan(self.alpha_residual)
            else float(self.alpha_residual),
            "stopping_n": self.stopping_n,
            "converged": self.converged,
            "separations": [float(s) for s in self.separations],
            "g_series": [float(g) for g in self.g_series],
        }


class SplittingResult:
    def __init__(self, offset, spaces, remainder, spectrum, projection_norms,
                 convergence, transversality_floor, warnings=()):
        self.offset = int(offset)
        self.spaces = list(spaces)
        self.remainder = remainder
        self.spectrum = spectrum
        self.projection_norms = list(projection_norms)
        self.convergence = list(convergence)
        self.transversality_floor = transversality_floor
        self.warnings = list(warnings)

    @property
    def converged(self):
        return all(c.converged for c in self.convergence)

    def convergence_rows(self):
        """(level, n, distance, alpha_fit) rows for the CSV trace."""
        rows = []
        for j, rep in enumerate(self.convergence, start=1):
            for n, dist in zip(rep.ns, rep.distances):
                rows.append((j, n, dist, rep.alpha_fit))
        return rows

    def to_dict(self):
        return {
            "offset": self.offset,
            "dims": [Y.dim for Y in self.spaces],
            "remainder_dim": self.remainder.dim,
            "converged": self.converged,
            "projection_norms": self.projection_norms,
            "transversality_floor": self.transversality_floor,
            "convergence": [c.to_dict() for c in self.convergence],
            "warnings": list(self.warnings),
        }


def pushforward_space(gen, orbit, U, n, base_offset=0):
    """Image of U (living at sigma^(base-n) w) under the n-step product,
    represented by a nice basis at sigma^base w.

    The frame is re-orthonormalized after every step: a one-shot product
    applied to a basis has condition e^(n * spread) and drowns the slower
    directions of the image in float noise, while the stepwise QR keeps
    the span exact and lets transverse contamination decay.
    """
    if n < 0:
        raise ParameterError("n must be >= 0")
    if n == 0 or U.dim == 0:
        return Subspace(U.basis.copy(), U.norm)
    B = U.orthonormal_basis()
    for k in range(base_offset - n, base_offset):
        B = gen.matrix_at(orbit, k) @ B
        Q, R = np.linalg.qr(B)
        diag = np.abs(np.diag(R))
        if diag.min() <= 1e-13 * max(diag.max(), 1e-300):
            raise RankCollapseError(
                f"pushforward of a dim-{U.dim} space lost rank at n={n}",
                n=n)
        B = Q
    return Subspace(np.column_stack(nice_basis(Subspace(B, U.norm))), U.norm)


def _l2_separation(Y, V):
    """Smallest l2 distance from a unit vector of Y to V (transversality)."""
    if V.dim == 0:
        return 1.0
    QY = Y.orthonormal_basis()
    QV = V.orthonormal_basis()
    M = QY - QV @ (QV.T @ QY)
    s = np.linalg.svd(M, compute_uv=False)
    return float(s[-1])


def _near_intersection(H, V, m, norm, n):
    """The m most-aligned directions of V with H (a numerical intersection).

    The fast hull through a level and the filtration space of that level
    overlap exactly in the level's Oseledets space in the limit; at finite
    depth the overlap is read off the top principal cosines.  The V-side
    principal vectors are returned because the forward filtration is the
    sharper of the two frames.
    """
    QH = H.orthonormal_basis()
    QV = V.orthonormal_basis()
    M = QH.T @ QV
    if m > min(M.shape):
        raise RankCollapseError(
            f"expected a dim-{m} overlap, frames allow only {min(M.shape)}",
            n=n)
    _, s, Wt = np.linalg.svd(M)
    if s[m - 1] < 0.5:
        raise RankCollapseError(
            f"principal cosine {s[m - 1]:.3f} too small for a dim-{m} "
            "overlap", n=n)
    return Subspace(QV @ Wt[:m].T, norm)


def _orthogonal_complements(flag):
    """Orthogonal complement of V_{j+1} in V_j, one subspace per level.

    Any complement family with a uniform transversality floor feeds the
    same hull construction (the pushforward sees only the span), and the
    orthogonal choice has the best possible separation, so the greedy
    max-distance selection is reserved for rotated uniqueness probes where
    varying the complement is the point.
    """
    norm = flag[0].norm
    out = []
    for V, Vn in zip(flag, flag[1:]):
        m = V.dim - Vn.dim
        QJ = V.orthonormal_basis()
        if Vn.dim == 0:
            out.append(Subspace(QJ, norm))
            continue
        QN = Vn.orthonormal_basis()
        M = QJ - QN @ (QN.T @ QJ)
        U, s, _ = np.linalg.svd(M, full_matrices=False)
        if m > 0 and s[m - 1] <= 1e-10:
            raise RankCollapseError(
                f"adjacent filtration levels nearly coincide "
                f"(singular value {s[m - 1]:.3e})")
        out.append(Subspace(U[:, :m], norm))
    return out


def _g_ratio(Y, V, U):
    """Max over unit y in Y of |Pi_V y| / |Pi_U y| for the (V, U) frame.

    The sup of this ratio over the schedule is the measured analogue of the
    proof's M(w); 1/(1+M) lower-bounds the U-component of unit vectors.
    """
    try:
        Pi = projection(U, V)
    except ComplementarityError:
        return math.inf
    QY = Y.orthonormal_basis()
    u_part = Pi.matrix @ QY
    v_part = QY - u_part
    su = np.linalg.svd(u_part, compute_uv=False)
    if su.size == 0 or su[-1] < 1e-14:
        return math.inf
    return float(operator_norm(v_part @ np.linalg.pinv(u_part), "l2"))


def compute_splitting(gen, orbit, spectrum, n_max, tol=DEFAULT_TOL,
                      offset=0, n_start=8, rotation_seed=None, norm="l2",
                      levels=None):
    """Fast spaces Y_1..Y_l at sigma^offset w plus the slow remainder.

    Doubles the pullback depth until d(Y_j^(n), Y_j^(2n)) < tol for every
    level or n_max is reached; non-converged levels are flagged, not
    errors.  A rank collapse during pushforward is retried once from a
    perturbed complement, then raised.  The orbit window must span
    [offset - n_max, offset + n_max] (forward room beyond the base point
    sharpens the filtrations that cut the levels out of the fast hulls;
    up to 2 * n_max is used when available).

    `levels` caps how many fast spaces are built (default: all resolved
    levels).  With a cap the remainder is the corresponding deeper
    filtration subspace, so Y_1 + ... + Y_levels + remainder still spans.
    Useful when only the top of the spectrum matters: distances between
    high-dimensional subspaces in the l1/linf norms are combinatorial,
    and interior levels can dominate the cost.
    """
    lam = spectrum.exponents
    l = len(lam)
    if l == 0:
        raise ParameterError("spectrum has no exceptional exponents")
    if n_start < 1 or n_max < n_start:
        raise ParameterError("need 1 <= n_start <= n_max")
    if levels is None:
        l_use = l
    else:
        if levels < 1:
            raise ParameterError("levels must be >= 1")
        l_use = min(int(levels), l)
    d = gen.dim

    schedule = []
    n = n_start
    while n <= n_max:
        schedule.append(n)
        n *= 2

    mult = [int(m) for m in spectrum.multiplicities]

    def level_space(j, hull, depth, filt_fwd):
        # the pushforward of the hull U_1 + ... + U_(j+1) is float-stable
        # (contamination transverse to the fast directions decays), while a
        # per-level pushforward of U_(j+1) alone re-amplifies the machine
        # noise along faster directions by e^(n * gap) and stalls near
        # sqrt(eps); the level is then cutout of the hull by the forward
        # filtration, which shares its limit
        H = pushforward_space(gen, orbit, hull, depth, base_offset=offset)
        if j == 0:
            return H
        if j >= len(filt_fwd.subspaces):
            raise RankCollapseError(
                f"forward filtration too shallow for level {j + 1}",
                n=depth)
        return _near_intersection(H, filt_fwd.subspaces[j], mult[j], norm,
                                  depth)

    def spaces_at(depth):
        filt = filtration_at(gen, orbit, offset - depth, depth, spectrum,
                             norm=norm)
        if len(filt.subspaces) < min(l, l_use + 1):
            raise RankCollapseError(
                f"filtration at depth {depth} resolved only "
                f"{len(filt.subspaces)} levels", n=depth)
        flag = list(filt.subspaces)
        if len(flag) == l:
            # exhaustive spectrum: the slow end of the flag is {0}, so the
            # deepest complement is all of V_l
            flag.append(Subspace(np.zeros((d, 0)), norm))
        if rotation_seed is None:
            comps = _orthogonal_complements(flag[:l_use + 1])
        else:
            comps = [U for U, _ in good_complement(
                flag[:l_use + 1], rotation_seed=rotation_seed)]
        avail_fwd = orbit.n_future - offset - 1
        m_fwd = min(2 * depth, max(depth, avail_fwd))
        filt_fwd = filtration_at(gen, orbit, offset, m_fwd, spectrum,
                                 norm=norm)
        out = []
        cols = []
        for j, U in enumerate(comps[:l_use]):
            cols.append(U.basis)
            hull = Subspace(np.column_stack(cols), norm)
            try:
                out.append(level_space(j, hull, depth, filt_fwd))
            except RankCollapseError:
                # measure-zero under the standing hypotheses; one retry
                rng = np.random.default_rng(depth)
                pert = hull.basis + 1e-6 * rng.standard_normal(
                    hull.basis.shape)
                out.append(level_space(j, Subspace(pert, norm), depth,
                                       filt_fwd))
        return out, filt

    history = []          # list of (depth, [Y_1..Y_l])
    dists = [[] for _ in range(l_use)]
    seps = [[] for _ in range(l_use)]
    gs = [[] for _ in range(l_use)]
    converged_at = [None] * l_use
    warnings = []

    final_spaces = None
    for idx, depth in enumerate(schedule):
        spaces, _ = spaces_at(depth)
        history.append((depth, spaces))
        if idx > 0:
            prev = history[-2][1]
            for j in range(l_use):
                dj = grassmann_distance(prev[j], spaces[j])
                dists[j].append(dj)
                if dj < tol and converged_at[j] is None:
                    converged_at[j] = depth
        final_spaces = spaces
        if idx > 0 and all(c is not None for c in converged_at):
            break

    n_final = history[-1][0]
    filt_final = filtration_at(gen, orbit, offset, n_final, spectrum, norm=norm)
    if len(filt_final.subspaces) > l_use:
        remainder = filt_final.subspaces[l_use]
    else:
        remainder = Subspace(np.zeros((d, 0)), norm)

    # transversality of the approach trajectory: decompose each approximant
    # against the frame (final fast hull, final slow filtration); sup of the
    # slow/fast component ratio is the measured analogue of the proof's
    # constant, and early depths carry the honest nonzero entries
    hull_cols = []
    for j in range(l_use):
        hull_cols.append(final_spaces[j].basis)
        hull_final = Subspace(np.column_stack(hull_cols), norm)
        Vj1 = filt_final.subspaces[j + 1] if j + 1 < len(filt_final.subspaces) \
            else Subspace(np.zeros((d, 0)), norm)
        for _depth, spaces in history:
            seps[j].append(_l2_separation(spaces[j], Vj1))
            if Vj1.dim and hull_final.dim + Vj1.dim == d:
                gs[j].append(_g_ratio(spaces[j], Vj1, hull_final))

    reports = []
    for j in range(l_use):
        ns_pairs = [h[0] for h in history[:-1]]
        reports.append(ConvergenceReport(
            ns_pairs, dists[j],
            converged_at[j] if converged_at[j] is not None else n_final,
            converged_at[j] is not None,
            separations=seps[j], g_series=gs[j]))
        if converged_at[j] is None:
            warnings.append(
                f"level {j + 1} not Cauchy within tol={tol} at n_max={n_max}")

    # projection norms of Pi_{Ytilde || V_{j+1}} and its complement, per level
    projection_norms = []
    acc_cols = []
    for j in range(l_use):
        acc_cols.append(final_spaces[j].basis)
        Ytilde = Subspace(np.column_stack(acc_cols), norm)
        Vj1 = filt_final.subspaces[j + 1] if j + 1 < len(filt_final.subspaces) \
            else Subspace(np.zeros((d, 0)), norm)
        entry = {"level": j + 1, "pi_fast": None, "pi_slow": None}
        if Ytilde.dim + Vj1.dim == d and Vj1.dim > 0:
            try:
                pair = projection(Ytilde, Vj1)
                entry["pi_fast"] = pair.norm_value
                entry["pi_slow"] = operator_norm(
                    np.eye(d) - pair.matrix, norm)
            except ComplementarityError:
                warnings.append(f"level {j + 1}: fast/slow complementarity "
                                "failed at the final depth")
        elif Vj1.dim == 0:
            entry["pi_fast"] = 1.0
            entry["pi_slow"] = 0.0
        projection_norms.append(entry)

    m_hat = max((g for series in gs for g in series if math.isfinite(g)),
                default=0.0)
    floor = 1.0 / (1.0 + m_hat) if math.isfinite(m_hat) else 0.0
    return SplittingResult(offset, final_spaces, remainder, spectrum,
                           projection_norms, reports, floor, warnings)


def check_equivariance(gen, orbit, result, result_next, tol=DEFAULT_TOL):
    """Distances d(L Y_j(w), Y_j(sigma w)) per level; passes below 10*tol."""
    A = gen.matrix_at(orbit, result.offset)
    distances = []
    for Y, Yn in zip(result.spaces, result_next.spaces):
        image = A @ Y.basis
        try:
            img = Subspace(image, Y.norm)
        except DegenerateSubspaceError as exc:
            raise RankCollapseError(
                f"generator collapses a dim-{Y.dim} fast space: {exc}") from exc
        distances.append(grassmann_distance(img, Yn))
    return {"distances": distances,
            "passed": all(dd < 10 * tol for dd in distances),
            "tol": tol}


def check_growth(result, gen, orbit, n_check, slack=0.1, seed=0):
    """Growth rates of the nice-basis vectors of each Y_j against lambda_j,
    and of random remainder vectors against the kappa bound (if any).

    Keep n_check below roughly 36 / (lambda_1 - lambda_j): beyond that the
    float-level contamination of a slow vector (at best ~1e-16) is amplified
    past its true decay and the measured rate bends toward lambda_1 no
    matter how accurate the space is."""
    lam = result.spectrum.exponents
    levels = []
    for j, Y in enumerate(result.spaces):
        rates = [growth_rate(gen, orbit, v, n_check, offset=result.offset)
                 for v in nice_basis(Y)]
        dev = max(abs(r - lam[j]) for r in rates) if rates else math.nan
        levels.append({"level": j + 1, "lambda": lam[j], "rates": rates,
                       "max_deviation": dev})
    v_rates = []
    kappa = result.spectrum.kappa_bound
    if result.remainder.dim > 0:
        rng = np.random.default_rng(seed)
        Q = result.remainder.orthonormal_basis()
        for _ in range(min(3, result.remainder.dim)):
            a = rng.standard_normal(result.remainder.dim)
            v = Q @ (a / np.linalg.norm(a))
            v_rates.append(growth_rate(gen, orbit, v, n_check,
                                       offset=result.offset))
    passed = all(lv["max_deviation"] <= slack for lv in levels)
    if kappa is not None and v_rates:
        passed = passed and all(r <= kappa + slack for r in v_rates)
    return {"levels": levels, "remainder_rates": v_rates,
            "kappa_bound": kappa, "passed": passed}


def uniqueness_probe(gen, orbit, spectrum, n_max, tol=DEFAULT_TOL,
                     alternative_complement_seed=1, offset=0, norm="l2"):
    """Max over levels of d(Y_j, Y_j') for two different good-complement
    selections; inf sentinel when either run fails to converge."""
    base = compute_splitting(gen, orbit, spectrum, n_max, tol, offset=offset,
                             norm=norm)
    alt = compute_splitting(gen, orbit, spectrum, n_max, tol, offset=offset,
                            rotation_seed=alternative_complement_seed,
                            norm=norm)
    if not (base.converged and alt.converged):
        return math.inf
    return max(grassmann_distance(Y, Yp)
               for Y, Yp in zip(base.spaces, alt.spaces))


class TemperednessVerdict:
    def __init__(self, verdict, forward_slope, backward_slope, ns, slopes_fwd,
                 slopes_bwd):
        self.verdict = verdict
        self.forward_slope = forward_slope
        self.backward_slope = backward_slope
        self.ns = ns
        self.slopes_fwd = slopes_fwd
        self.slopes_bwd = slopes_bwd

    def __repr__(self):
        return (f"TemperednessVerdict({self.verdict!r}, "
                f"fwd={self.forward_slope:.4g}, bwd={self.backward_slope:.4g})")

    def to_dict(self):
        return {"verdict": self.verdict,
                "forward_slope": float(self.forward_slope),
                "backward_slope": float(self.backward_slope),
                "ns": self.ns,
                "slopes_forward": [float(s) for s in self.slopes_fwd],
                "slopes_backward": [float(s) for s in self.slopes_bwd]}


def _side_slopes(series, ns, sign):
    out = []
    running = -math.inf
    upto = 0
    for n in ns:
        while upto <= n:
            v = float(series(sign * upto))
            if v <= 0.0:
                raise ParameterError("temperedness series must be positive")
            running = max(running, math.log(v))
            upto += 1
        out.append(running / n)
    return out


def temperedness_test(series, n_max, threshold=TEMPERED_SLOPE_THRESHOLD):
    """Classify sup-log growth of a positive series along both directions.

    Fits max_{|k| <= n} log f(sigma^k w) / n over dyadic n.  Tempered means
    both one-sided slopes are below the threshold at n_max; not tempered
    means a slope is above threshold and no longer decaying; anything else
    is inconclusive.
    """
    if n_max < 8:
        raise ParameterError("n_max must be >= 8")
    ns = []
    n = n_max
    while n >= 4:
        ns.append(n)
        n //= 2
    ns = ns[::-1]
    slopes_f = _side_slopes(series, ns, +1)
    slopes_b = _side_slopes(series, ns, -1)

    def classify(slopes):
        final = abs(slopes[-1])
        if final < threshold:
            return "tempered", slopes[-1]
        decaying = len(slopes) >= 2 and abs(slopes[-1]) < 0.9 * abs(slopes[-2])
        return ("inconclusive" if decaying else "not_tempered"), slopes[-1]

    verdict_f, slope_f = classify(slopes_f)
    verdict_b, slope_b = classify(slopes_b)
    if "not_tempered" in (verdict_f, verdict_b):
        verdict = "not_tempered"
    elif verdict_f == verdict_b == "tempered":
        verdict = "tempered"
    else:
        verdict = "inconclusive"
    return TemperednessVerdict(verdict, slope_f, slope_b, ns, slopes_f,
                               slopes_b)
