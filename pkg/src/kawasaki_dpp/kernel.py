"""The gamma-family projection kernel on the half-integer lattice.

Sites live on Z' = Z + 1/2 and are encoded by an integer index, site value
``index + 1/2``.  A parameter pair (z, z') is *admissible* when
``(z + n)(z' + n) > 0`` for every integer n; the two supported branches are

* ``RealInterval`` -- z, z' real, both strictly inside the same interval
  (m, m+1) between consecutive integers;
* ``ConjugatePair`` -- z non-real and z' its complex conjugate.

The kernel is assembled in log space from

    K(x, y) = prefactor * (A(x) B(y) - B(x) A(y)) / (x - y),      x != y
    K(x, x) = prefactor * (psi(z + x + 1/2) - psi(z' + x + 1/2)),

with ``prefactor = sin(pi z) sin(pi z') / (pi sin(pi (z - z')))`` and

    A(x) = Gamma(z + x + 1/2) / sqrt(Gamma(z + x + 1/2) Gamma(z' + x + 1/2)),

B(x) the same with z and z' exchanged.  On the conjugate branch A(x) is a
unit-modulus complex number with B(x) = conj(A(x)); every downstream
combination is mathematically real and the residual imaginary part is
checked against 1e-10.

The same kernel is, equivalently, the spectral projection onto the positive
part of the spectrum of a second-order symmetric difference operator;
:func:`spectral_projection_check` probes that characterization numerically
on truncated windows.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np

from .errors import DomainError, NumericalError, SizeError, WindowMismatchError
from .specfun import (
    digamma,
    log_gamma_complex,
    log_gamma_signed,
    sinpi,
    sinpi_complex,
)

__all__ = [
    "Site",
    "Window",
    "Branch",
    "AdmissiblePair",
    "KernelMatrix",
    "ProjectionReport",
    "is_admissible",
    "ab_values",
    "kernel_entry",
    "kernel_matrix",
    "difference_operator_matrix",
    "spectral_projection_check",
    "write_kernel_csv",
    "MAX_WINDOW_SITES",
]

MAX_WINDOW_SITES = 4096

# Residual imaginary part allowed when a conjugate-branch combination is
# collapsed to its real value.
_IMAG_TOL = 1e-10


@dataclass(frozen=True, order=True)
class Site:
    """A half-integer lattice point x = index + 1/2."""

    index: int

    @property
    def value(self) -> float:
        return self.index + 0.5

    def shifted(self, offset: int) -> "Site":
        return Site(self.index + offset)

    def __str__(self) -> str:
        return f"{self.value:g}"


@dataclass(frozen=True)
class Window:
    """A contiguous, inclusive block of lattice sites."""

    lo: Site
    hi: Site

    def __post_init__(self):
        if self.lo.index > self.hi.index:
            raise ValueError(f"empty window: lo={self.lo} > hi={self.hi}")

    @classmethod
    def from_indices(cls, lo_index: int, hi_index: int) -> "Window":
        return cls(Site(lo_index), Site(hi_index))

    @classmethod
    def centered(cls, size: int, center_index: int = 0) -> "Window":
        """A window of `size` sites centered (up to parity) on an index."""
        if size < 1:
            raise ValueError("window size must be >= 1")
        lo = center_index - size // 2
        return cls.from_indices(lo, lo + size - 1)

    @property
    def size(self) -> int:
        return self.hi.index - self.lo.index + 1

    @property
    def sites(self) -> tuple[Site, ...]:
        return tuple(Site(i) for i in range(self.lo.index, self.hi.index + 1))

    def __contains__(self, site: Site) -> bool:
        return self.lo.index <= site.index <= self.hi.index

    def position(self, site: Site) -> int:
        """Offset of a site within the window (0 = lo)."""
        if site not in self:
            raise WindowMismatchError(f"site {site} outside window {self}")
        return site.index - self.lo.index

    def __str__(self) -> str:
        return f"[{self.lo}..{self.hi}]"


class Branch(enum.Enum):
    """Which admissibility branch a parameter pair lives on."""

    REAL_INTERVAL = "real_interval"
    CONJUGATE_PAIR = "conjugate_pair"


def _classify(z: complex, z_prime: complex) -> Branch | None:
    z = complex(z)
    z_prime = complex(z_prime)
    if z == z_prime:
        # Equal parameters only arise as a limit; unsupported here.
        return None
    if z.imag == 0.0 and z_prime.imag == 0.0:
        a, b = z.real, z_prime.real
        if a == math.floor(a) or b == math.floor(b):
            return None
        if math.floor(a) == math.floor(b):
            return Branch.REAL_INTERVAL
        return None
    if z.imag != 0.0 and z_prime == z.conjugate():
        return Branch.CONJUGATE_PAIR
    return None


def is_admissible(z: complex, z_prime: complex) -> bool:
    """Whether (z, z') lies in the supported admissible domain.

    True iff the pair is a non-real conjugate pair, or both parameters are
    real non-integers inside a common unit interval (m, m+1).  Either branch
    implies (z + n)(z' + n) > 0 for all integers n.  Equal parameters are
    reported as inadmissible: that case is defined only through a limit and
    is outside the supported domain (perturb, e.g. z' = z + 1e-6).
    """
    return _classify(z, z_prime) is not None


@dataclass(frozen=True)
class AdmissiblePair:
    """A validated parameter pair (z, z') for the kernel."""

    z: complex
    z_prime: complex
    branch: Branch = field(init=False, compare=False)

    def __post_init__(self):
        z = complex(self.z)
        z_prime = complex(self.z_prime)
        branch = _classify(z, z_prime)
        if branch is None:
            msg = f"(z, z') = ({z}, {z_prime}) is not an admissible pair"
            if z == z_prime:
                msg += "; equal parameters are unsupported, try z' = z + 1e-6"
            raise DomainError(msg)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "z_prime", z_prime)
        object.__setattr__(self, "branch", branch)


class _KernelEvaluator:
    """Per-pair cache of the prefactor and per-site A/B values."""

    def __init__(self, pair: AdmissiblePair):
        self.pair = pair
        z, zp = pair.z, pair.z_prime
        if pair.branch is Branch.REAL_INTERVAL:
            self.prefactor = sinpi(z.real) * sinpi(zp.real) / (math.pi * sinpi(z.real - zp.real))
        else:
            self.prefactor = sinpi_complex(z) * sinpi_complex(zp) / (math.pi * sinpi_complex(z - zp))
        self._ab: dict[int, tuple] = {}

    def ab(self, x: Site) -> tuple:
        cached = self._ab.get(x.index)
        if cached is None:
            cached = self._compute_ab(x)
            self._ab[x.index] = cached
        return cached

    def _compute_ab(self, x: Site) -> tuple:
        z, zp = self.pair.z, self.pair.z_prime
        arg = x.value + 0.5  # gamma arguments are z + x + 1/2
        if self.pair.branch is Branch.REAL_INTERVAL:
            p = log_gamma_signed(z.real + arg)
            q = log_gamma_signed(zp.real + arg)
            if p.sign != q.sign:
                raise DomainError(
                    f"Gamma(z + x + 1/2) and Gamma(z' + x + 1/2) differ in sign at x = {x}; "
                    "the product under the square root is not positive"
                )
            half = 0.5 * (p.log_abs - q.log_abs)
            return p.sign * math.exp(half), q.sign * math.exp(-half)
        # Conjugate branch: Gamma(z' + x + 1/2) = conj(Gamma(z + x + 1/2)), so
        # A(x) = Gamma/|Gamma| lies on the unit circle and B = conj(A).
        theta = log_gamma_complex(z + arg).imag
        a = complex(math.cos(theta), math.sin(theta))
        return a, a.conjugate()

    def diagonal(self, x: Site) -> float:
        z, zp = self.pair.z, self.pair.z_prime
        arg = x.value + 0.5
        if self.pair.branch is Branch.REAL_INTERVAL:
            d = digamma(z.real + arg) - digamma(zp.real + arg)
            return self.prefactor * d
        d = digamma(z + arg) - digamma(zp + arg)
        return _collapse_real(self.prefactor * d)

    def off_diagonal(self, x: Site, y: Site) -> float:
        ax, bx = self.ab(x)
        ay, by = self.ab(y)
        value = self.prefactor * (ax * by - bx * ay) / (x.value - y.value)
        if self.pair.branch is Branch.REAL_INTERVAL:
            return float(value)
        return _collapse_real(value)


def _collapse_real(value: complex) -> float:
    if abs(value.imag) > _IMAG_TOL:
        raise NumericalError(f"residual imaginary part {value.imag:g} exceeds {_IMAG_TOL:g}")
    return value.real


@lru_cache(maxsize=128)
def _evaluator(pair: AdmissiblePair) -> _KernelEvaluator:
    return _KernelEvaluator(pair)


def ab_values(pair: AdmissiblePair, x: Site) -> tuple:
    """The pair (A(x), B(x)).

    Real floats on the RealInterval branch; on the ConjugatePair branch a
    unit-modulus complex pair with B = conj(A).  A(x) * B(x) = 1 in both
    cases.
    """
    return _evaluator(pair).ab(x)


def kernel_entry(pair: AdmissiblePair, x: Site, y: Site) -> float:
    """K(x, y); the digamma diagonal formula is used when x = y."""
    ev = _evaluator(pair)
    if x.index == y.index:
        return ev.diagonal(x)
    return ev.off_diagonal(x, y)


class KernelMatrix:
    """Dense symmetric restriction of the kernel to a window.

    Immutable after construction (the entry array is marked read-only).
    Construction checks symmetry to 1e-12 and the diagonal against [0, 1];
    the O(n^3) eigenvalue range check is available via :meth:`validate`.
    """

    def __init__(self, window: Window, entries: np.ndarray):
        entries = np.array(entries, dtype=float)
        n = window.size
        if entries.shape != (n, n):
            raise ValueError(f"entries shape {entries.shape} != window size {n}")
        asym = float(np.abs(entries - entries.T).max()) if n else 0.0
        if asym > 1e-12:
            raise NumericalError(f"kernel matrix asymmetry {asym:g} exceeds 1e-12")
        diag = np.diagonal(entries)
        if diag.min() < -1e-12 or diag.max() > 1.0 + 1e-12:
            raise NumericalError("kernel diagonal outside [0, 1]")
        entries.setflags(write=False)
        self.window = window
        self.entries = entries

    @property
    def size(self) -> int:
        return self.window.size

    @property
    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.entries)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    def entry(self, x: Site, y: Site) -> float:
        return float(self.entries[self.window.position(x), self.window.position(y)])

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and orthonormal eigenvectors."""
        evals, evecs = np.linalg.eigh(self.entries)
        evals.setflags(write=False)
        evecs.setflags(write=False)
        return evals, evecs

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eigh[0]

    def validate(self) -> None:
        """Full invariant check; raises NumericalError on violation."""
        evals = self.eigenvalues
        if evals[0] < -1e-9 or evals[-1] > 1.0 + 1e-9:
            raise NumericalError(
                f"eigenvalues [{evals[0]:g}, {evals[-1]:g}] outside [-1e-9, 1+1e-9]"
            )

    def __repr__(self) -> str:
        return f"KernelMatrix(window={self.window}, size={self.size})"


def kernel_matrix(pair: AdmissiblePair, window: Window) -> KernelMatrix:
    """The window restriction K_W, entry-identical to kernel_entry calls.

    Only the upper triangle is evaluated; the mirrored entry is bit-identical
    because swapping x and y negates both the A/B combination and (x - y).
    """
    if window.size > MAX_WINDOW_SITES:
        raise SizeError(f"window of {window.size} sites exceeds cap {MAX_WINDOW_SITES}")
    sites = window.sites
    n = window.size
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            v = kernel_entry(pair, sites[i], sites[j])
            out[i, j] = v
            out[j, i] = v
    return KernelMatrix(window, out)


def difference_operator_matrix(pair: AdmissiblePair, window: Window) -> np.ndarray:
    """Truncation of the second-order difference operator to a window.

    Symmetric tridiagonal: diagonal -(2x + z + z'), off-diagonal
    sqrt((z + x + 1/2)(z' + x + 1/2)) coupling x to x + 1.  Sites outside the
    window are dropped (zero Dirichlet boundary).
    """
    z, zp = pair.z, pair.z_prime
    zsum = (z + zp).real
    sites = window.sites
    n = window.size
    out = np.zeros((n, n))
    for i, s in enumerate(sites):
        out[i, i] = -(2.0 * s.value + zsum)
        if i + 1 < n:
            t = s.value + 0.5
            if pair.branch is Branch.REAL_INTERVAL:
                prod = (z.real + t) * (zp.real + t)
                if prod <= 0.0:
                    raise DomainError(f"non-positive coupling product at site {s}")
                c = math.sqrt(prod)
            else:
                c = abs(z + t)
            out[i, i + 1] = c
            out[i + 1, i] = c
    return out


@dataclass(frozen=True)
class ProjectionReport:
    """Interior comparison of K against the truncated-operator projection."""

    window: Window
    margin: int
    core: Window
    max_abs_deviation: float
    commutator_norm: float


def spectral_projection_check(pair: AdmissiblePair, window: Window, margin: int) -> ProjectionReport:
    """Compare K with the positive-spectrum projection of the truncated operator.

    Diagonalizes the window truncation of the difference operator, builds the
    projection P onto its positive eigenspaces, and reports, over the window
    shrunk by `margin` sites on each side,

    * ``max_abs_deviation`` = max |P(x, y) - K(x, y)|,
    * ``commutator_norm``   = max |(K D - D K)(x, y)|.

    Both shrink as the window grows around a fixed core; the truncation is
    exact only in the infinite-volume limit, so the values are empirical
    diagnostics, not certified bounds.
    """
    if margin < 0:
        raise SizeError("margin must be nonnegative")
    if window.size - 2 * margin < 1:
        raise SizeError(f"margin {margin} leaves no interior in window {window}")
    d_op = difference_operator_matrix(pair, window)
    evals, evecs = np.linalg.eigh(d_op)
    positive = evecs[:, evals > 0.0]
    projection = positive @ positive.T
    k_mat = kernel_matrix(pair, window).entries
    core_slice = slice(margin, window.size - margin)
    deviation = float(np.abs(projection - k_mat)[core_slice, core_slice].max())
    commutator = k_mat @ d_op - d_op @ k_mat
    commutator_norm = float(np.abs(commutator)[core_slice, core_slice].max())
    core = Window.from_indices(window.lo.index + margin, window.hi.index - margin)
    return ProjectionReport(window, margin, core, deviation, commutator_norm)


def write_kernel_csv(k: KernelMatrix, path) -> None:
    r"""Export a kernel matrix as CSV: header ``x\y,<sites>``, %.17g entries."""
    sites = k.window.sites
    lines = ["x\\y," + ",".join(str(s) for s in sites)]
    for i, s in enumerate(sites):
        row = ",".join(f"{v:.17g}" for v in k.entries[i])
        lines.append(f"{s},{row}")
    Path(path).write_text("\n".join(lines) + "\n")
