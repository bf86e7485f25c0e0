"""
Matrix cocycles and their Lyapunov spectrum
===========================================

A cocycle generator assigns a matrix to every base state; products along an
orbit then have well-defined exponential growth rates.  This script builds
three generators, extracts their spectra, and inspects the slow filtration.
"""

import math

import numpy as np

from oseledets.base import BernoulliShift, FiniteCycle, generate_orbit
from oseledets.cocycle import (CocycleGenerator, cocycle_norm_series,
                               scaled_forward_product)
from oseledets.spectrum import filtration_at, growth_rate, lyapunov_exponents

# Constant cocycle: the exponents are the logs of the eigenvalue moduli.
A = np.array([[2.0, 1.0], [0.0, 0.5]])
gen = CocycleGenerator.constant(A)
orbit = generate_orbit(FiniteCycle(1), seed=0, n_past=20, n_future=600)
spec = lyapunov_exponents(gen, orbit, 500)
print("constant exponents :", [round(x, 10) for x in spec.exponents],
      "(log 2 =", round(math.log(2), 10), ")")

# Long products overflow float range quickly; scaled products carry a
# separate log-scale so norms of 400-step products stay finite.
prod = scaled_forward_product(gen, orbit, 0, 400)
print("400-step log-norm  :", round(prod.log_norm(), 6),
      "= 400 log 2 =", round(400 * math.log(2), 6))

# Tabulated cocycle over a coin flip: random products of two matrices.
table = [np.array([[1.5, 0.0], [0.0, 0.4]]),
         np.array([[0.7, 0.3], [0.0, 1.8]])]
coin = BernoulliShift([0.5, 0.5])
gen2 = CocycleGenerator.from_table(table)
orbit2 = generate_orbit(coin, seed=4, n_past=50, n_future=2200)
spec2 = lyapunov_exponents(gen2, orbit2, 2000)
print("random exponents   :", [round(x, 4) for x in spec2.exponents])

# The slow filtration at a base point: directions that grow no faster than
# each exponent.  For the constant triangular matrix the slow line is the
# second eigenvector, span (1, -1.5).
filt = filtration_at(gen, orbit, 0, 400)
slow = filt.subspaces[0].basis.ravel()
print("slow direction     :", np.round(slow / slow[0], 6))

# growth_rate measures a single vector; a generic vector sees the top rate,
# a vector in the slow line sees the bottom one.
print("generic vector rate:", round(growth_rate(gen, orbit, [1.0, 1.0], 50), 4))
print("slow vector rate   :", round(growth_rate(gen, orbit, [1.0, -1.5], 20), 4))

# Norm series are the raw material of subadditivity arguments.
series = cocycle_norm_series(gen2, orbit2, 32, norm="l1")
print("norm series head   :", [round(s, 3) for s in series[:5]])
