"""
Base-space drivers, orbit windows, and Birkhoff averages
========================================================

Every experiment in this package sits over a driving system: a measurable
self-map of a base space whose orbit selects which matrix (or which
expanding map) acts at each time step.  This script walks through the four
built-in drivers and the orbit-window machinery they share.
"""

import numpy as np

from oseledets.base import (BernoulliShift, FiniteCycle, IrrationalRotation,
                            MarkovShift, birkhoff_average, generate_orbit,
                            shift_view)

# A finite cycle visits 0, 1, ..., period-1 and wraps around.  Orbits are
# materialized as windows: n_past states behind the origin (needed by the
# pullback construction later) and n_future ahead.
cycle = FiniteCycle(3)
window = generate_orbit(cycle, seed=0, n_past=4, n_future=8)
print("3-cycle window :", [window.state(k) for k in range(-4, 8)])

# Random drivers are pure functions of (seed, offset), so regenerating the
# window reproduces it bit for bit and two windows over the same seed agree
# wherever they overlap.
coin = BernoulliShift([0.5, 0.5])
w1 = generate_orbit(coin, seed=11, n_past=0, n_future=10)
w2 = generate_orbit(coin, seed=11, n_past=5, n_future=10)
print("coin flips     :", [w1.state(k) for k in range(10)])
print("same seed again:", [w2.state(k) for k in range(10)])

# A Markov chain needs a transition matrix; its stationary vector and the
# time-reversed kernel come along for free.
chain = MarkovShift([[0.9, 0.1], [0.2, 0.8]])
print("stationary     :", np.round(chain.stationary, 4))

# The rotation driver is deterministic: state(k) = fractional part of
# k * angle.  With the golden-ratio angle the states equidistribute, which
# Birkhoff averages make quantitative.
rot = IrrationalRotation()
orbit = generate_orbit(rot, seed=0, n_past=0, n_future=10_000)
freq = birkhoff_average(orbit, lambda x: 1.0 if x < 0.5 else 0.0, 10_000)
print("time in [0,1/2):", freq, "(expect about 0.5)")

# shift_view re-centers a window without copying: offset k of the view is
# offset k+2 of the original.
view = shift_view(window, 2)
print("shifted window :", [view.state(k) for k in range(-2, 6)])
