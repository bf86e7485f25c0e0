"""
Constructing the fast spaces by pullback
========================================

The fast space of level j at a base point is the limit of n-step
pushforwards of a well-chosen complement sitting n steps in the past.  The
cocycle need not be invertible: the construction only ever multiplies
matrices forward.  This script runs the construction, watches the Cauchy
sequence converge at the spectral-gap rate, and checks the result.
"""

import math

import numpy as np

from oseledets.base import FiniteCycle, generate_orbit
from oseledets.cocycle import CocycleGenerator
from oseledets.grassmann import Subspace, grassmann_distance
from oseledets.spectrum import lyapunov_exponents
from oseledets.splitting import (check_equivariance, check_growth,
                                 compute_splitting, temperedness_test,
                                 uniqueness_probe)

# An alternating, non-invertible pair: B has rank 2 but the period products
# B.A and A.B each have a dominant eigenvector that the fast space must hit.
A = np.array([[2.0, 1.0], [0.0, 1.0]])
B = np.array([[1.0, 0.0], [1.0, 2.0]])
gen = CocycleGenerator.from_table([A, B])
orbit = generate_orbit(FiniteCycle(2), seed=0, n_past=300, n_future=600)

spec = lyapunov_exponents(gen, orbit, 400)
print("exponents        :", [round(x, 6) for x in spec.exponents])

result = compute_splitting(gen, orbit, spec, n_max=256, tol=1e-10)
print("converged        :", result.converged)
print("space dims       :", [Y.dim for Y in result.spaces])

# The convergence report logs the distance between consecutive candidate
# spaces; its log-slope estimates the Cauchy rate, which should be at least
# the spectral gap (up to the epsilon slack of the estimate).
rep = result.convergence[0]
gap = spec.exponents[0] - spec.exponents[1]
print("distances        :", ["%.2e" % d for d in rep.distances[:5]], "...")
print("fitted rate      :", round(rep.alpha_fit, 4), "  gap:", round(gap, 4))

# Fast space at offset 0 against the eigenvector of the period product.
w, V = np.linalg.eig(B @ A)
target = Subspace(np.real(V[:, np.argmax(np.abs(w))]).reshape(2, 1))
print("d(Y1, eigvec)    : %.2e" % grassmann_distance(result.spaces[0], target))

# Equivariance: pushing the splitting one step forward must land on the
# splitting computed at the shifted base point.
shifted = compute_splitting(gen, orbit, spec, n_max=256, tol=1e-10, offset=1)
equi = check_equivariance(gen, orbit, result, shifted)
print("equivariance     :", equi["passed"],
      " max distance %.2e" % max(equi["distances"]))

# Growth check: nice-basis vectors of each level grow at their exponent.
# Keep n_check modest; float contamination of a slow vector is amplified at
# the top rate beyond roughly 36 / gap steps.
growth = check_growth(result, gen, orbit, n_check=18)
print("growth rates ok  :", growth["passed"])

# Two more diagnostics: an independent run from a rotated complement must
# produce the same spaces, and the projection norms along the orbit should
# form a tempered (subexponential) sequence.
print("uniqueness probe : %.2e" % uniqueness_probe(gen, orbit, spec,
                                                   n_max=256, tol=1e-10))
pi = result.projection_norms[0]["pi_fast"]
verdict = temperedness_test(lambda k: pi, 16)
print("projection norm  :", round(pi, 4), "->", verdict.verdict)
