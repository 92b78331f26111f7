"""Shared fixtures: parameter pairs, windows and kernels reused across tests."""

from __future__ import annotations

import pytest

from kawasaki_dpp import AdmissiblePair, SeededRng, enumerate_distribution, kernel_matrix, sample
from kawasaki_dpp.kernel import Window


@pytest.fixture(scope="session")
def real_pair():
    return AdmissiblePair(1.5, 1.7)


@pytest.fixture(scope="session")
def conj_pair():
    return AdmissiblePair(0.3 + 0.4j, 0.3 - 0.4j)


@pytest.fixture(scope="session")
def window6():
    return Window.from_indices(-3, 2)


@pytest.fixture(scope="session")
def window8():
    return Window.from_indices(-4, 3)


@pytest.fixture(scope="session")
def window10():
    return Window.from_indices(-5, 4)


@pytest.fixture(scope="session")
def k6(real_pair, window6):
    return kernel_matrix(real_pair, window6)


@pytest.fixture(scope="session")
def k8(real_pair, window8):
    return kernel_matrix(real_pair, window8)


@pytest.fixture(scope="session")
def k10(real_pair, window10):
    return kernel_matrix(real_pair, window10)


@pytest.fixture(scope="session")
def pmf6(k6):
    return enumerate_distribution(k6)


@pytest.fixture(scope="session")
def pmf8(k8):
    return enumerate_distribution(k8)


@pytest.fixture(scope="session")
def samples6_100k(k6):
    """100k exact draws on the 6-site window, shared by the Monte Carlo tests."""
    rng = SeededRng(2024)
    return [sample(k6, rng) for _ in range(100_000)]
