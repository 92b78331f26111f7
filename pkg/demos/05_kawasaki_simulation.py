"""
Kawasaki swap dynamics
======================

Particles hop by exchanging occupancies of site pairs at rates built from
the swap ratio phi and a proximity weight u.  Three recipes ship with the
package -- u*min(phi,1), u*sqrt(phi), u*(phi+1) -- and each one makes the
window law reversible, so a long trajectory's occupation times reproduce the
conditional law of its particle-number sector.
"""

import numpy as np

from kawasaki_dpp import (
    AdmissiblePair,
    Configuration,
    ProximitySpec,
    RateModel,
    SeededRng,
    config_probability,
    enumerate_distribution,
    kernel_matrix,
    rate,
    simulate,
    symmetry_check,
    total_jump_rate,
)
from kawasaki_dpp.kernel import Window
from kawasaki_dpp.rn import SwapPair, apply_transposition

pair = AdmissiblePair(1.5, 1.7)
window = Window.from_indices(-4, 3)
k = kernel_matrix(pair, window)
nn = ProximitySpec.nearest_neighbor()
models = {
    "metropolis ": RateModel.metropolis(nn),
    "sqrt-ratio ": RateModel.sqrt_ratio(nn),
    "glauber-like": RateModel.glauber_like(nn),
}

# ----------------------------------------------------------- rates of one state
config = Configuration(window, (1, 1, 1, 0, 0, 0, 0, 0))
print(f"state {config}: candidate swaps and total rates")
for name, model in models.items():
    total, per_pair = total_jump_rate(model, k, config)
    moves = ", ".join(f"{s}:{r:.3f}" for s, r in per_pair)
    print(f"  {name} R = {total:.4f}   [{moves}]")

# ------------------------------------------------------------ detailed balance
print("\ndetailed balance residual (relative), worst over nearest-neighbor swaps:")
swaps = [SwapPair(a, b) for a, b in zip(window.sites, window.sites[1:])]
for name, model in models.items():
    worst = 0.0
    for mask in range(1 << window.size):
        state = Configuration.from_bitmask(window, mask)
        for swap in swaps:
            if state.occupancy_at(swap.x) == state.occupancy_at(swap.y):
                continue
            flux = config_probability(k, state) * rate(model, k, state, swap)
            if flux <= 0.0:
                continue
            worst = max(worst, symmetry_check(model, k, state, swap) / flux)
    print(f"  {name} {worst:.2e}")

# --------------------------------------------------------------- a trajectory
model = models["metropolis "]
trajectory = simulate(model, k, config, t_max=20_000.0, rng=SeededRng(99))
print(f"\nsimulated {trajectory.n_events} swap events up to t = {trajectory.t_max:g}")
print("first events:", [(round(t, 3), str(s)) for t, s in trajectory.events[:4]])

# -------------------------------------------- occupation times vs exact law
pmf = enumerate_distribution(k)
masks, conditional = pmf.sector(config.particle_count)
holding = trajectory.state_occupation()
empirical = np.array([holding.get(int(m), 0.0) for m in masks]) / trajectory.t_max
tv = 0.5 * float(np.abs(empirical - conditional).sum())
print(f"\ntime-averaged occupation vs conditional law: total variation {tv:.4f}")

top = np.argsort(conditional)[::-1][:5]
print("most likely sector states, exact vs time-average:")
for index in top:
    state = Configuration.from_bitmask(window, int(masks[index]))
    print(f"  {state}  exact {conditional[index]:.4f}  empirical {empirical[index]:.4f}")

# particle number is conserved along the whole trajectory
state = trajectory.initial
for _, swap in trajectory.events:
    state = apply_transposition(state, swap)
assert state.particle_count == config.particle_count
print("\nparticle count conserved across all events:", config.particle_count)
