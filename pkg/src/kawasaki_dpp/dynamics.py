"""Kawasaki swap dynamics on a window.

Particles exchange occupancies of site pairs at configuration-dependent
rates built from the swap ratio phi and a symmetric proximity weight u:

* ``Metropolis``  c = u * min(phi, 1)
* ``SqrtRatio``   c = u * sqrt(phi)
* ``GlauberLike`` c = u * (phi + 1)

Each of these factors as c = sqrt(phi) * a with a invariant under the swap,
which makes the window law a reversible (symmetrizing, hence invariant)
measure for the jump process.  The continuous-time chain is realized by the
standard jump-chain construction: exponential waiting times at the total
rate, next swap chosen proportionally to the per-pair rates.

Rates are exact for the window process with a closed boundary; swaps never
cross the window edge, so the particle number is conserved and stationarity
holds sector by sector.
"""

from __future__ import annotations

import enum
import json
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dpp import Configuration, config_probability
from .errors import SamePointError, WindowMismatchError, ZeroProbabilityError
from .kernel import KernelMatrix, Site, Window
from .rn import SwapPair, apply_transposition, rn_derivative
from .rng import SeededRng
from .util import format_complex

__all__ = [
    "ProximityKind",
    "ProximitySpec",
    "RateKind",
    "RateModel",
    "Trajectory",
    "proximity_u",
    "rate",
    "rate_from_ratio",
    "symmetry_check",
    "candidate_pairs",
    "total_jump_rate",
    "simulate",
    "sector_graph_connected",
    "write_trajectory_csv",
    "trajectory_sidecar",
]


class ProximityKind(enum.Enum):
    NEAREST_NEIGHBOR = "nearest_neighbor"
    EXP_DECAY = "exp_decay"
    FINITE_RANGE = "finite_range"


@dataclass(frozen=True)
class ProximitySpec:
    """Symmetric nonnegative pair weight u(x, y), summable in y for fixed x."""

    kind: ProximityKind
    weight: float = 1.0
    alpha: float | None = None
    reach: int | None = None

    def __post_init__(self):
        if self.weight <= 0.0:
            raise ValueError("weight must be positive")
        if self.kind is ProximityKind.EXP_DECAY:
            if self.alpha is None or self.alpha <= 0.0:
                raise ValueError("exponential decay needs alpha > 0")
        if self.kind is ProximityKind.FINITE_RANGE:
            if self.reach is None or self.reach < 1:
                raise ValueError("finite range needs reach >= 1")

    @classmethod
    def nearest_neighbor(cls, weight: float = 1.0) -> "ProximitySpec":
        return cls(ProximityKind.NEAREST_NEIGHBOR, weight)

    @classmethod
    def exp_decay(cls, alpha: float, weight: float = 1.0) -> "ProximitySpec":
        return cls(ProximityKind.EXP_DECAY, weight, alpha=alpha)

    @classmethod
    def finite_range(cls, reach: int, weight: float = 1.0) -> "ProximitySpec":
        return cls(ProximityKind.FINITE_RANGE, weight, reach=reach)

    def max_separation(self) -> int | None:
        """Largest separation with u > 0 (None = unbounded)."""
        if self.kind is ProximityKind.NEAREST_NEIGHBOR:
            return 1
        if self.kind is ProximityKind.FINITE_RANGE:
            return self.reach
        return None

    def label(self) -> str:
        if self.kind is ProximityKind.NEAREST_NEIGHBOR:
            return f"nn(weight={self.weight:g})"
        if self.kind is ProximityKind.EXP_DECAY:
            return f"exp(alpha={self.alpha:g}, weight={self.weight:g})"
        return f"range(reach={self.reach}, weight={self.weight:g})"


def proximity_u(spec: ProximitySpec, x: Site, y: Site) -> float:
    """u(x, y) for distinct sites; symmetric in its arguments."""
    if x == y:
        raise SamePointError(f"proximity weight needs distinct sites, got {x} twice")
    d = abs(x.index - y.index)
    if spec.kind is ProximityKind.NEAREST_NEIGHBOR:
        return spec.weight if d == 1 else 0.0
    if spec.kind is ProximityKind.EXP_DECAY:
        return spec.weight * math.exp(-spec.alpha * d)
    return spec.weight if d <= spec.reach else 0.0


class RateKind(enum.Enum):
    METROPOLIS = "metropolis"
    SQRT_RATIO = "sqrt_ratio"
    GLAUBER_LIKE = "glauber_like"


@dataclass(frozen=True)
class RateModel:
    """A swap-rate recipe: c(gamma, x, y) = f(phi) * u(x, y)."""

    kind: RateKind
    proximity: ProximitySpec

    @classmethod
    def metropolis(cls, proximity: ProximitySpec) -> "RateModel":
        return cls(RateKind.METROPOLIS, proximity)

    @classmethod
    def sqrt_ratio(cls, proximity: ProximitySpec) -> "RateModel":
        return cls(RateKind.SQRT_RATIO, proximity)

    @classmethod
    def glauber_like(cls, proximity: ProximitySpec) -> "RateModel":
        return cls(RateKind.GLAUBER_LIKE, proximity)


def rate_from_ratio(kind: RateKind, u: float, phi: float) -> float:
    """The rate formula as a pure function of the weight and the swap ratio."""
    if kind is RateKind.METROPOLIS:
        return u * min(phi, 1.0)
    if kind is RateKind.SQRT_RATIO:
        return u * math.sqrt(phi)
    return u * (phi + 1.0)


def rate(model: RateModel, k: KernelMatrix, config: Configuration, swap: SwapPair) -> float:
    """c(gamma, x, y); zero-weight pairs short-circuit the ratio evaluation."""
    u = proximity_u(model.proximity, swap.x, swap.y)
    if u == 0.0:
        return 0.0
    phi = rn_derivative(k, config, swap)
    return rate_from_ratio(model.kind, u, phi)


def symmetry_check(
    model: RateModel, k: KernelMatrix, config: Configuration, swap: SwapPair
) -> float:
    """Detailed-balance residual |P(gamma) c(gamma) - P(sigma gamma) c(sigma gamma)|."""
    swapped = apply_transposition(config, swap)
    p = config_probability(k, config)
    q = config_probability(k, swapped)
    if p <= 0.0 or q <= 0.0:
        raise ZeroProbabilityError("symmetry check needs both configurations to be possible")
    forward = p * rate(model, k, config, swap)
    backward = q * rate(model, k, swapped, swap)
    return abs(forward - backward)


def candidate_pairs(window: Window, proximity: ProximitySpec) -> tuple[SwapPair, ...]:
    """All unordered site pairs of the window with positive weight."""
    sites = window.sites
    bound = proximity.max_separation()
    pairs = []
    for i, x in enumerate(sites):
        far = len(sites) if bound is None else min(len(sites), i + bound + 1)
        for j in range(i + 1, far):
            pairs.append(SwapPair(x, sites[j]))
    return tuple(pairs)


def total_jump_rate(
    model: RateModel, k: KernelMatrix, config: Configuration
) -> tuple[float, list[tuple[SwapPair, float]]]:
    """Total exit rate and the per-pair breakdown.

    Each unordered pair with unequal occupancy carries rate 2c (the
    generator sums over ordered pairs and c is symmetric); equal-occupancy
    pairs are omitted since swapping them does nothing.
    """
    per_pair = []
    total = 0.0
    for swap in candidate_pairs(k.window, model.proximity):
        if config.occupancy_at(swap.x) == config.occupancy_at(swap.y):
            continue
        r = 2.0 * rate(model, k, config, swap)
        if r > 0.0:
            per_pair.append((swap, r))
            total += r
    return total, per_pair


@dataclass
class Trajectory:
    """A simulated swap history: events are (time, pair) with times increasing."""

    seed: int
    stream: int
    initial: Configuration
    events: list[tuple[float, SwapPair]]
    t_max: float
    absorbed: bool = False

    @property
    def n_events(self) -> int:
        return len(self.events)

    def final_configuration(self) -> Configuration:
        config = self.initial
        for _, swap in self.events:
            config = apply_transposition(config, swap)
        return config

    def state_occupation(self) -> dict[int, float]:
        """Total holding time per visited state bitmask, up to t_max."""
        holding: dict[int, float] = {}
        config = self.initial
        t = 0.0
        for when, swap in self.events:
            holding[config.bitmask] = holding.get(config.bitmask, 0.0) + (when - t)
            config = apply_transposition(config, swap)
            t = when
        holding[config.bitmask] = holding.get(config.bitmask, 0.0) + (self.t_max - t)
        return holding


def simulate(
    model: RateModel,
    k: KernelMatrix,
    initial: Configuration,
    t_max: float,
    rng: SeededRng,
) -> Trajectory:
    """Run the jump chain to time t_max.

    Waiting times are exponential at the current total rate; the executed
    swap is chosen proportionally to the per-pair rates.  Per-state rate
    tables are memoized by bitmask (the swap ratio depends on the whole
    configuration, so a swap invalidates every pair's rate; caching by state
    keeps revisits cheap without approximating).  If the total rate hits
    zero the state is absorbing and the trajectory idles until t_max.
    """
    if initial.window != k.window:
        raise WindowMismatchError("initial configuration window differs from kernel window")
    if t_max < 0.0:
        raise ValueError("t_max must be nonnegative")
    tables: dict[int, tuple[float, list[SwapPair], np.ndarray]] = {}
    config = initial
    t = 0.0
    events: list[tuple[float, SwapPair]] = []
    absorbed = False
    while True:
        key = config.bitmask
        table = tables.get(key)
        if table is None:
            total, per_pair = total_jump_rate(model, k, config)
            pairs = [p for p, _ in per_pair]
            cumulative = np.cumsum([r for _, r in per_pair]) if per_pair else np.empty(0)
            table = (total, pairs, cumulative)
            tables[key] = table
        total, pairs, cumulative = table
        if total <= 0.0:
            absorbed = True
            break
        t_next = t + rng.exponential(total)
        if t_next > t_max:
            break
        u = rng.random() * total
        choice = min(int(np.searchsorted(cumulative, u, side="right")), len(pairs) - 1)
        swap = pairs[choice]
        t = t_next
        config = apply_transposition(config, swap)
        events.append((t, swap))
    return Trajectory(rng.seed, rng.stream, initial, events, t_max, absorbed)


def sector_graph_connected(window: Window, proximity: ProximitySpec, count: int) -> bool:
    """Whether the swap graph restricted to a particle-count sector is connected."""
    n = window.size
    if count < 0 or count > n:
        raise ValueError(f"count {count} out of range for {n} sites")
    pairs = [
        (window.position(p.x), window.position(p.y))
        for p in candidate_pairs(window, proximity)
        if proximity_u(proximity, p.x, p.y) > 0.0
    ]
    masks = [m for m in range(1 << n) if bin(m).count("1") == count]
    if len(masks) <= 1:
        return True
    start = masks[0]
    seen = {start}
    queue = deque([start])
    while queue:
        mask = queue.popleft()
        for i, j in pairs:
            bit_i = (mask >> i) & 1
            bit_j = (mask >> j) & 1
            if bit_i == bit_j:
                continue
            flipped = mask ^ ((1 << i) | (1 << j))
            if flipped not in seen:
                seen.add(flipped)
                queue.append(flipped)
    return len(seen) == len(masks)


def write_trajectory_csv(trajectory: Trajectory, path) -> None:
    """Export events as CSV: ``time,x,y`` with %.17g times."""
    lines = ["time,x,y"]
    for when, swap in trajectory.events:
        lines.append(f"{when:.17g},{swap.x},{swap.y}")
    Path(path).write_text("\n".join(lines) + "\n")


def trajectory_sidecar(trajectory: Trajectory, z: complex, z_prime: complex, model: RateModel) -> dict:
    """Reproducibility metadata for a trajectory (JSON-serializable)."""
    window = trajectory.initial.window
    return {
        "seed": trajectory.seed,
        "stream": trajectory.stream,
        "z": format_complex(z),
        "z_prime": format_complex(z_prime),
        "window": [window.lo.index, window.hi.index],
        "rate_model": model.kind.value,
        "proximity": {
            "kind": model.proximity.kind.value,
            "weight": model.proximity.weight,
            "alpha": model.proximity.alpha,
            "reach": model.proximity.reach,
        },
        "t_max": trajectory.t_max,
        "initial_bitmask": trajectory.initial.bitmask,
        "n_events": trajectory.n_events,
    }


def write_trajectory_sidecar(
    trajectory: Trajectory, z: complex, z_prime: complex, model: RateModel, path
) -> None:
    Path(path).write_text(
        json.dumps(trajectory_sidecar(trajectory, z, z_prime, model), indent=2) + "\n"
    )
