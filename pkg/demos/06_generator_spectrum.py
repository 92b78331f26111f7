"""
Generator matrices and spectra
==============================

On a small window the swap process is a finite-state chain, so its generator
is an explicit matrix: off-diagonal entries 2c per unordered swap, zero row
sums.  This script verifies reversibility and the quadratic-form identity
numerically, then looks at the spectrum of the symmetrized generator, whose
gap controls how fast the dynamics forgets its initial state.
"""

import numpy as np

from kawasaki_dpp import (
    AdmissiblePair,
    ProximitySpec,
    RateModel,
    build_generator,
    check_reversibility,
    dirichlet_form,
    kernel_matrix,
    spectrum,
    transition_matrix,
)
from kawasaki_dpp.kernel import Window

pair = AdmissiblePair(1.5, 1.7)
k = kernel_matrix(pair, Window.from_indices(-4, 3))
nn = ProximitySpec.nearest_neighbor()

# --------------------------------------------------------- build and inspect
g = build_generator(RateModel.metropolis(nn), k, sector=3)
print(f"3-particle sector of an 8-site window: {g.n_states} states")
print(f"row sums (conservativity): max |Q 1| = {np.abs(g.Q.sum(axis=1)).max():.2e}")
print(f"stationarity:             max |mu Q| = {np.abs(g.measure @ g.Q).max():.2e}")
print(f"reversibility residual:   {check_reversibility(g):.2e}")

# --------------------------------------------------- Dirichlet form identity
rng = np.random.default_rng(1)
f = rng.normal(size=g.n_states)
h = rng.normal(size=g.n_states)
energy = dirichlet_form(g, f, h)
inner = float(g.measure @ ((-g.Q @ f) * h))
print(f"\nE(F,H) from rates      = {energy:.12f}")
print(f"<-QF, H> in L2(mu)     = {inner:.12f}")
print(f"difference             = {abs(energy - inner):.2e}")
ones = np.ones(g.n_states)
print(f"E(1,1)                 = {dirichlet_form(g, ones, ones):.1f}")

# -------------------------------------------------------------------- spectra
print("\nspectral gaps by rate model:")
for name, model in (("metropolis", RateModel.metropolis(nn)),
                    ("sqrt-ratio", RateModel.sqrt_ratio(nn)),
                    ("glauber-like", RateModel.glauber_like(nn))):
    result = spectrum(build_generator(model, k, sector=3))
    print(f"  {name:12s} gap = {result.spectral_gap:.6f}   "
          f"top eigenvalues {[round(float(v), 4) for v in result.eigenvalues[:4]]}")

# ------------------------------------------------------------- the semigroup
# exp(tQ) is a stochastic matrix for every t; its rows converge to the
# stationary law at rate exp(-gap * t).
g = build_generator(RateModel.metropolis(nn), k, sector=3)
gap = spectrum(g).spectral_gap
print("\nsemigroup convergence from a worst-case start:")
for t in (0.5, 2.0, 8.0):
    p_t = transition_matrix(g, t)
    distance = 0.5 * np.abs(p_t - g.measure[np.newaxis, :]).sum(axis=1).max()
    print(f"  t = {t:4.1f}: max TV to stationarity {distance:.2e} "
          f"(exp(-gap t) = {np.exp(-gap * t):.2e})")
