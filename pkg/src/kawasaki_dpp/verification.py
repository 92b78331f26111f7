"""Bundled verification suites.

Each suite re-runs the module-level invariants at user-supplied parameters
and reports one named check per invariant, with the measured value and the
tolerance it was held to.  Checks with ``tolerance=None`` are diagnostics:
they are recorded (and must be finite) but carry no pass gate beyond that.

Suites derive their working windows from the requested one, capping sizes so
that exact enumeration stays cheap; the kernel suite uses the window as
given (up to the eigendecomposition cap).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dpp import (
    Configuration,
    clamp_counter,
    config_probability,
    correlation,
    empirical_correlation,
    enumerate_distribution,
    sample,
)
from .dynamics import (
    ProximitySpec,
    RateModel,
    candidate_pairs,
    rate,
    sector_graph_connected,
    simulate,
    symmetry_check,
)
from .exact import (
    build_generator,
    check_reversibility,
    dirichlet_form,
    spectrum,
    transition_matrix,
)
from .kernel import (
    AdmissiblePair,
    Window,
    ab_values,
    difference_operator_matrix,
    kernel_matrix,
    spectral_projection_check,
)
from .rn import SwapPair, apply_transposition, rn_derivative, rn_stabilization
from .rng import SeededRng

__all__ = ["Check", "Report", "SUITE_NAMES", "run_suite"]

SUITE_NAMES = ("kernel", "dpp", "rn", "dynamics", "exact")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float | None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": self.value,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class Report:
    suite: str
    checks: tuple[Check, ...]

    @property
    def failures(self) -> int:
        return sum(1 for c in self.checks if not c.passed)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "checks": [c.to_dict() for c in self.checks],
            "failures": self.failures,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def write(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")


def _bounded(name: str, value: float, tolerance: float) -> Check:
    return Check(name, bool(abs(value) <= tolerance), float(value), float(tolerance))


def _flag(name: str, passed: bool, value: float = 0.0) -> Check:
    return Check(name, bool(passed), float(value), None)


def _diagnostic(name: str, value: float) -> Check:
    return Check(name, bool(math.isfinite(value)), float(value), None)


def _subwindow(window: Window, cap: int) -> Window:
    if window.size <= cap:
        return window
    lo = window.lo.index + (window.size - cap) // 2
    return Window.from_indices(lo, lo + cap - 1)


def _nn_swaps(window: Window) -> list[SwapPair]:
    sites = window.sites
    return [SwapPair(a, b) for a, b in zip(sites, sites[1:])]


def verify_kernel(pair: AdmissiblePair, window: Window, seed: int) -> list[Check]:
    checks: list[Check] = []
    z, zp = pair.z, pair.z_prime

    n_range = np.arange(-10_000, 10_001)
    products = (z + n_range) * (zp + n_range)
    checks.append(_flag("admissibility_product_positive", products.real.min() > 0.0,
                        float(products.real.min())))
    checks.append(_bounded("admissibility_product_imag", float(np.abs(products.imag).max()), 1e-12))

    ab_window = _subwindow(window, 200)
    ab_err = max(abs(complex(a * b) - 1.0) for a, b in
                 (ab_values(pair, s) for s in ab_window.sites))
    checks.append(_bounded("ab_identity_max_error", ab_err, 1e-12))

    k = kernel_matrix(pair, _subwindow(window, 100))
    checks.append(_bounded("kernel_symmetry_max", float(np.abs(k.entries - k.entries.T).max()), 1e-12))
    diag_margin = min(float(k.diagonal.min()), float(1.0 - k.diagonal.max()))
    checks.append(_flag("kernel_diagonal_in_unit_interval", diag_margin > 0.0, diag_margin))
    evals = k.eigenvalues
    eig_excess = max(float(-evals[0]), float(evals[-1] - 1.0), 0.0)
    checks.append(_bounded("kernel_eigenvalue_range_excess", eig_excess, 1e-9))
    checks.append(_bounded("kernel_trace_vs_eigensum", abs(k.trace - float(evals.sum())), 1e-10))

    minor_window = _subwindow(window, 12)
    km = kernel_matrix(pair, minor_window)
    worst_minor = 0.0
    for size in range(1, 5):
        for subset in itertools.combinations(minor_window.sites, size):
            worst_minor = min(worst_minor, correlation(km, subset))
    checks.append(Check("principal_minors_min", worst_minor >= -1e-10, worst_minor, 1e-10))

    d_op = difference_operator_matrix(pair, _subwindow(window, 50))
    checks.append(_bounded("difference_operator_asymmetry", float(np.abs(d_op - d_op.T).max()), 0.0))
    off = np.diagonal(d_op, offset=1)
    checks.append(_flag("difference_operator_offdiag_positive",
                        bool(off.min() > 0.0) if off.size else True,
                        float(off.min()) if off.size else 1.0))

    probe = spectral_projection_check(pair, Window.centered(40, window.lo.index + window.size // 2),
                                      15)
    checks.append(_diagnostic("projection_deviation_40", probe.max_abs_deviation))
    checks.append(_bounded("projection_commutator_interior", probe.commutator_norm, 1e-12))
    return checks


def verify_dpp(pair: AdmissiblePair, window: Window, seed: int) -> list[Check]:
    checks: list[Check] = []
    clamp_counter.reset()

    enum_window = _subwindow(window, 12)
    k = kernel_matrix(pair, enum_window)
    pmf = enumerate_distribution(k)
    checks.append(_bounded("pmf_total_error", pmf.total() - 1.0, 1e-9))
    checks.append(_flag("pmf_nonnegative", float(pmf.probs.min()) >= 0.0, float(pmf.probs.min())))

    sites = enum_window.sites
    marg_err = max(abs(pmf.marginal(s) - k.entry(s, s)) for s in sites)
    checks.append(_bounded("marginal_vs_diagonal_max", marg_err, 1e-10))
    pair_err = max(
        abs(pmf.occupied_marginal([a, b]) - correlation(k, [a, b]))
        for a, b in itertools.combinations(sites, 2)
    )
    checks.append(_bounded("pair_marginal_vs_minor_max", pair_err, 1e-10))

    sample_window = _subwindow(window, 8)
    ks = kernel_matrix(pair, sample_window)
    pmf_s = enumerate_distribution(ks)
    rng = SeededRng(seed)
    n_samples = 200_000
    counts = np.zeros(1 << ks.size)
    total_particles = 0
    draws = []
    for _ in range(n_samples):
        config = sample(ks, rng)
        counts[config.bitmask] += 1
        total_particles += config.particle_count
        if len(draws) < 10_000:
            draws.append(config)
    tv = 0.5 * float(np.abs(counts / n_samples - pmf_s.probs).sum())
    checks.append(_bounded("sampler_tv_vs_enumeration", tv, 0.01))

    lam = np.clip(ks.eigenvalues, 0.0, 1.0)
    count_sd = math.sqrt(float((lam * (1.0 - lam)).sum()) / n_samples)
    mean_err_sigmas = abs(total_particles / n_samples - ks.trace) / count_sd
    checks.append(_bounded("sampler_mean_count_sigmas", mean_err_sigmas, 4.0))

    probe_sites = sample_window.sites[: 2]
    mc = empirical_correlation(draws, probe_sites)
    exact = correlation(ks, probe_sites)
    sd = math.sqrt(max(exact * (1.0 - exact), 1e-12) / len(draws))
    checks.append(_bounded("empirical_correlation_sigmas", (mc - exact) / sd, 4.0))

    rng_a, rng_b = SeededRng(seed), SeededRng(seed)
    replay = all(sample(ks, rng_a) == sample(ks, rng_b) for _ in range(200))
    checks.append(_flag("sampler_seed_determinism", replay))

    checks.append(_diagnostic("clamped_negative_probabilities", float(clamp_counter.count)))
    return checks


def verify_rn(pair: AdmissiblePair, window: Window, seed: int) -> list[Check]:
    checks: list[Check] = []
    rn_window = _subwindow(window, 10)
    k = kernel_matrix(pair, rn_window)
    sites = rn_window.sites
    mid = max(0, (len(sites) - 1) // 2)
    swaps = {(sites[0], sites[-1]), (sites[mid], sites[min(mid + 1, len(sites) - 1)])}
    swaps = [SwapPair(a, b) for a, b in swaps if a != b]

    inversion_worst = 0.0
    change_worst = 0.0
    square_probe = 0.0
    for swap in swaps:
        total = 0.0
        square = 0.0
        for mask in range(1 << rn_window.size):
            config = Configuration.from_bitmask(rn_window, mask)
            p = config_probability(k, config)
            if p <= 0.0:
                continue
            phi = rn_derivative(k, config, swap)
            swapped = apply_transposition(config, swap)
            if config_probability(k, swapped) > 0.0:
                inversion_worst = max(
                    inversion_worst, abs(phi * rn_derivative(k, swapped, swap) - 1.0)
                )
            total += p * phi
            square += p * phi * phi
        change_worst = max(change_worst, abs(total - 1.0))
        square_probe = max(square_probe, square)
    checks.append(_bounded("rn_inversion_max_error", inversion_worst, 1e-9))
    checks.append(_bounded("rn_change_of_variables_error", change_worst, 1e-9))
    checks.append(_diagnostic("rn_square_integral_probe", square_probe))

    # Trivial stabilization: equal occupancies at the swap sites force phi = 1.
    # The two rightmost sites are nearly always empty, so rejection is cheap.
    pattern_window = Window.from_indices(sites[-2].index, sites[-1].index)
    pattern = Configuration(pattern_window, (0, 0))
    table = rn_stabilization(pair, pattern, SwapPair(sites[-2], sites[-1]),
                             [rn_window.size, rn_window.size + 2], SeededRng(seed), n_samples=20)
    trivial_err = max(abs(r.phi_mean - 1.0) + r.phi_std for r in table.rows)
    checks.append(_bounded("rn_stabilization_trivial_pattern", trivial_err, 0.0))
    inversion_rows = max(r.max_inversion_residual for r in table.rows)
    checks.append(_bounded("rn_stabilization_inversion_residual", inversion_rows, 1e-10))
    return checks


def _models() -> list[RateModel]:
    nn = ProximitySpec.nearest_neighbor()
    return [RateModel.metropolis(nn), RateModel.sqrt_ratio(nn), RateModel.glauber_like(nn)]


def verify_dynamics(pair: AdmissiblePair, window: Window, seed: int) -> list[Check]:
    checks: list[Check] = []
    dyn_window = _subwindow(window, 10)
    k = kernel_matrix(pair, dyn_window)
    swaps = _nn_swaps(dyn_window)

    balance_worst = 0.0
    factor_worst = 0.0
    for model in _models():
        for mask in range(1 << dyn_window.size):
            config = Configuration.from_bitmask(dyn_window, mask)
            p = config_probability(k, config)
            if p <= 0.0:
                continue
            for swap in swaps:
                if config.occupancy_at(swap.x) == config.occupancy_at(swap.y):
                    continue
                swapped = apply_transposition(config, swap)
                q = config_probability(k, swapped)
                if q <= 0.0:
                    continue
                residual = symmetry_check(model, k, config, swap)
                flux = max(p * rate(model, k, config, swap), q * rate(model, k, swapped, swap))
                if flux > 0.0:
                    balance_worst = max(balance_worst, residual / flux)
                phi = rn_derivative(k, config, swap)
                a_fwd = rate(model, k, config, swap) / math.sqrt(phi)
                a_bwd = rate(model, k, swapped, swap) / math.sqrt(rn_derivative(k, swapped, swap))
                scale = max(abs(a_fwd), abs(a_bwd))
                if scale > 0.0:
                    factor_worst = max(factor_worst, abs(a_fwd - a_bwd) / scale)
    checks.append(_bounded("detailed_balance_max_relative", balance_worst, 1e-10))
    checks.append(_bounded("rate_factorization_max_relative", factor_worst, 1e-10))

    # Summability diagnostics for the rate field, worst site.
    pmf = enumerate_distribution(k)
    pairs = candidate_pairs(dyn_window, ProximitySpec.nearest_neighbor())
    l2_worst = 0.0
    l1_worst = 0.0
    for model, target in ((RateModel.metropolis(ProximitySpec.nearest_neighbor()), "l2"),
                          (RateModel.glauber_like(ProximitySpec.nearest_neighbor()), "l1")):
        for x in dyn_window.sites:
            touching = [s for s in pairs if x in (s.x, s.y)]
            acc = 0.0
            for mask in range(1 << dyn_window.size):
                config = Configuration.from_bitmask(dyn_window, mask)
                p = pmf.probs[mask]
                if p <= 0.0:
                    continue
                out_rate = sum(rate(model, k, config, s) for s in touching)
                acc += p * (out_rate * out_rate if target == "l2" else out_rate)
            if target == "l2":
                l2_worst = max(l2_worst, acc)
            else:
                l1_worst = max(l1_worst, acc)
    checks.append(_diagnostic("l2_condition_probe_metropolis", l2_worst))
    checks.append(_diagnostic("l1_condition_probe_glauber", l1_worst))

    connected = all(
        sector_graph_connected(dyn_window, ProximitySpec.nearest_neighbor(), count)
        for count in range(dyn_window.size + 1)
    )
    checks.append(_flag("sector_graph_connected", connected))

    model = _models()[0]
    initial = Configuration.from_bitmask(dyn_window, (1 << (dyn_window.size // 2)) - 1)
    t_a = simulate(model, k, initial, 50.0, SeededRng(seed, stream=5))
    t_b = simulate(model, k, initial, 50.0, SeededRng(seed, stream=5))
    checks.append(_flag("trajectory_seed_determinism", t_a.events == t_b.events,
                        float(t_a.n_events)))
    counts_ok = True
    config = t_a.initial
    for _, swap in t_a.events:
        nxt = apply_transposition(config, swap)
        if nxt.particle_count != config.particle_count:
            counts_ok = False
        config = nxt
    checks.append(_flag("trajectory_particle_conservation", counts_ok))
    return checks


def verify_exact(pair: AdmissiblePair, window: Window, seed: int) -> list[Check]:
    checks: list[Check] = []
    ex_window = _subwindow(window, 8)
    k = kernel_matrix(pair, ex_window)
    sector = max(1, ex_window.size // 2 - 1)

    reversibility_worst = 0.0
    for model in _models():
        g = build_generator(model, k, sector=sector)
        reversibility_worst = max(reversibility_worst, check_reversibility(g))
    checks.append(_bounded("reversibility_max_residual", reversibility_worst, 1e-10))

    g = build_generator(_models()[0], k, sector=sector)
    checks.append(_bounded("conservativity_rowsum_max", float(np.abs(g.Q.sum(axis=1)).max()), 1e-12))
    checks.append(_bounded("stationarity_muQ_max", float(np.abs(g.measure @ g.Q).max()), 1e-10))

    vec_rng = np.random.default_rng(seed)
    identity_worst = 0.0
    for _ in range(50):
        f = vec_rng.normal(size=g.n_states)
        h = vec_rng.normal(size=g.n_states)
        lhs = dirichlet_form(g, f, h)
        rhs = float(g.measure @ ((-g.Q @ f) * h))
        identity_worst = max(identity_worst, abs(lhs - rhs))
    checks.append(_bounded("dirichlet_generator_identity_max", identity_worst, 1e-10))
    ones = np.ones(g.n_states)
    checks.append(_bounded("dirichlet_constant_zero", dirichlet_form(g, ones, ones), 1e-12))

    spec = spectrum(g)
    checks.append(_bounded("spectrum_max_eigenvalue", float(spec.eigenvalues[0]), 1e-10))
    checks.append(_diagnostic("spectral_gap", spec.spectral_gap))

    semigroup_entry_min = 0.0
    semigroup_rowsum_worst = 0.0
    for t in (0.1, 1.0, 10.0):
        p_t = transition_matrix(g, t)
        semigroup_entry_min = min(semigroup_entry_min, float(p_t.min()))
        semigroup_rowsum_worst = max(
            semigroup_rowsum_worst, float(np.abs(p_t.sum(axis=1) - 1.0).max())
        )
    checks.append(Check("semigroup_entry_min", semigroup_entry_min >= -1e-9,
                        semigroup_entry_min, 1e-9))
    checks.append(_bounded("semigroup_rowsum_error", semigroup_rowsum_worst, 1e-9))
    return checks


_SUITES = {
    "kernel": verify_kernel,
    "dpp": verify_dpp,
    "rn": verify_rn,
    "dynamics": verify_dynamics,
    "exact": verify_exact,
}


def run_suite(suite: str, pair: AdmissiblePair, window: Window, seed: int) -> Report:
    """Run one named suite (or ``all``) and aggregate a report."""
    if suite == "all":
        checks: list[Check] = []
        for name in SUITE_NAMES:
            checks.extend(_SUITES[name](pair, window, seed))
        return Report("all", tuple(checks))
    if suite not in _SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITE_NAMES + ('all',)}")
    return Report(suite, tuple(_SUITES[suite](pair, window, seed)))
