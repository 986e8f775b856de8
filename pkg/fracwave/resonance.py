"""
Resonances of the truncated stationary operator P_N(tau) = A - i tau X - tau^2 on L_N.

A = diag(|n|) and X[n, l] = chi_hat(n - l) for -N <= n, l <= N. The 2(2N+1) resonances are
the eigenvalues of the companion linearization [[0, I], [A, -iX]].
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import logging
import numpy as np
from scipy.linalg import LinAlgError, eigvals

from fracwave.common.errors import EigenSolverError, FracwaveError, ResolutionError
from fracwave.constants import (
    DEFAULT_ASYMPTOTIC_MODES,
    DEFAULT_MODES,
    DEFAULT_TRANSPORT_MODES,
    NU_SWEEP,
    SYMMETRY_PAIR_TOL,
    ZERO_RESONANCE_TOL,
)
from fracwave.damping.profiles import DampingProfile, make_profile, with_nu
from fracwave.spectral_core import GridSpec, toeplitz_matrix

PENCIL = "pencil"
ASYMPTOTIC = "asymptotic"
EXACT_FORMULA = "exact-formula"
TRANSPORT = "transport"


@dataclass(frozen=True, eq=False)
class OperatorPencil:
    """
    The quadratic matrix polynomial P_N(tau) = A - i tau X - tau^2 I.

    Attributes:
        N: Truncation order; the basis is e^{inx}, -N <= n <= N.
        A: Diagonal matrix diag(|n|)
        X: Hermitian Toeplitz matrix of multiplication by chi
        nu: Amplitude of the damping the pencil was built from
        kind: Kind of that damping profile
    """
    N: int
    A: np.ndarray = field(repr=False)
    X: np.ndarray = field(repr=False)
    nu: float = 0.0
    kind: str = "custom"

    @property
    def size(self) -> int:
        return 2 * self.N + 1

    def matrix(self, tau: complex) -> np.ndarray:
        """P_N(tau)."""
        return self.A - 1j * tau * self.X - tau ** 2 * np.eye(self.size)

    def semiclassical_matrix(self, h: float, z: complex) -> np.ndarray:
        """P_N(h, z) = h A - i sqrt(h) z X - z^2 I, equal to h P_N(z / sqrt(h))."""
        return h * self.A - 1j * np.sqrt(h) * z * self.X - z ** 2 * np.eye(self.size)

    def companion(self) -> np.ndarray:
        n = self.size
        return np.block([
            [np.zeros((n, n)), np.eye(n)],
            [self.A, -1j * self.X],
        ])


@dataclass(frozen=True, eq=False)
class ResonanceSet:
    """
    A multiset of resonances.

    Attributes:
        N: Truncation order (pencil, exact-formula) or mode cutoff (asymptotic, transport)
        nu: Damping amplitude
        values: Complex resonances, with multiplicity
        method: pencil, asymptotic, exact-formula or transport
    """
    N: int
    nu: float
    values: np.ndarray = field(repr=False)
    method: str = PENCIL

    def __len__(self) -> int:
        return len(self.values)

    def nonzero(self, tol: float = ZERO_RESONANCE_TOL) -> np.ndarray:
        return self.values[np.abs(self.values) > tol]

    def slowest(self, tol: float = ZERO_RESONANCE_TOL) -> complex:
        """
        The nonzero resonance closest to the real axis.

        Raises:
            FracwaveError: If every resonance is zero.
        """
        candidates = self.nonzero(tol)
        if not len(candidates):
            raise FracwaveError("Resonance set has no nonzero member")
        return complex(candidates[np.argmin(np.abs(candidates.imag))])

    def right_half(self) -> np.ndarray:
        """One representative per pair {tau, -conj(tau)}, the one with Re tau >= 0."""
        values = self.values[self.values.real >= -SYMMETRY_PAIR_TOL]
        return values[np.argsort(values.real)]

    def is_symmetric(self, tol: float = SYMMETRY_PAIR_TOL) -> bool:
        """True if the multiset is invariant under tau -> -conj(tau) within tol."""
        mirrored = list(-np.conj(self.values))
        for value in self.values:
            distances = np.abs(np.array(mirrored) - value)
            j = int(np.argmin(distances))
            if distances[j] > tol * max(1.0, abs(value)):
                return False
            mirrored.pop(j)
        return True

    def rows(self):
        """(re, im, method, N, nu) for every resonance, ordered by real then imaginary part."""
        order = np.lexsort((self.values.imag, self.values.real))
        for value in self.values[order]:
            yield value.real, value.imag, self.method, self.N, self.nu


def build_pencil(profile: DampingProfile, N: int = DEFAULT_MODES, nu: Optional[float] = None) -> OperatorPencil:
    """
    Assemble P_N for a damping profile, rebuilt at amplitude nu when one is given.

    Args:
        profile: Damping profile; its Fourier data must reach |n| = 2N.
        N: Truncation order, at least 1.
        nu: Optional amplitude overriding the profile's own.

    Raises:
        FracwaveError: If N < 1.
        ResolutionError: If the grid holds too few Fourier coefficients (needs M >= 4N).
    """
    if N < 1:
        raise FracwaveError(f"Truncation order must be at least 1, got {N}")
    profile = with_nu(profile, nu)
    X = toeplitz_matrix(profile.fourier, N)
    A = np.diag(np.abs(np.arange(-N, N + 1)).astype(float))
    return OperatorPencil(N=N, A=A, X=X, nu=profile.nu, kind=profile.kind)


def pencil_resonances(pencil: OperatorPencil) -> ResonanceSet:
    """
    All 2(2N+1) eigenvalues of the pencil via its companion linearization.

    Raises:
        EigenSolverError: If the eigen-solver fails or returns non-finite values.
    """
    logging.debug(f"Solving {2 * pencil.size}x{2 * pencil.size} companion eigenproblem")
    try:
        values = eigvals(pencil.companion())
    except LinAlgError as e:
        raise EigenSolverError(f"Eigen-solver did not converge for N={pencil.N}: {e}") from e
    if not np.all(np.isfinite(values)):
        raise EigenSolverError(f"Eigen-solver returned non-finite resonances for N={pencil.N}")
    return ResonanceSet(N=pencil.N, nu=pencil.nu, values=values, method=PENCIL)


def asymptotic_resonances(
    profile: DampingProfile,
    nu: Optional[float] = None,
    k_max: int = DEFAULT_ASYMPTOTIC_MODES,
) -> ResonanceSet:
    """
    Small-amplitude expansion tau_{k,+-} = sqrt(k) - i (chi_hat(0) +- |chi_hat(2k)|) / 2,
    with the coefficients of the amplitude-nu profile, for 1 <= k <= k_max, plus mirrors.

    Raises:
        ResolutionError: If chi_hat(2 k_max) is beyond the grid's Fourier range.
    """
    if k_max < 1:
        raise FracwaveError(f"k_max must be at least 1, got {k_max}")
    profile = with_nu(profile, nu)
    if 2 * k_max > profile.spec.max_mode:
        raise ResolutionError(f"k_max={k_max} needs chi_hat up to {2 * k_max}; grid has {profile.spec.max_mode}")
    mean = profile.fourier.coefficient(0).real
    values = []
    for k in range(1, k_max + 1):
        split = abs(profile.fourier.coefficient(2 * k))
        for sign in (1.0, -1.0):
            tau = np.sqrt(k) - 0.5j * (mean + sign * split)
            values.extend([tau, -np.conj(tau)])
    return ResonanceSet(N=k_max, nu=profile.nu, values=np.array(values), method=ASYMPTOTIC)


def _quadratic_roots(mean: float, k: float, scale: float = 1.0) -> Tuple[complex, complex]:
    # roots of z^2 + i scale mean z - scale^2 k = 0
    root = np.sqrt(complex(k - mean ** 2 / 4.0))
    return scale * (-0.5j * mean + root), scale * (-0.5j * mean - root)


def transport_resonances(
    profile: DampingProfile,
    h: float,
    k_max: int = DEFAULT_TRANSPORT_MODES,
) -> ResonanceSet:
    """
    Exact resonances of the transport models +-hD - i sqrt(h) z chi - z^2 with chi replaced by
    its mean: roots of z^2 + i z sqrt(h) chi_hat(0) - h k = 0 for -k_max <= k <= k_max.

    Every root lies on Re z = 0 or on Im z = -chi_hat(0) sqrt(h) / 2.
    """
    if not h > 0:
        raise FracwaveError(f"Semiclassical parameter must be positive, got {h}")
    mean = profile.fourier.coefficient(0).real
    values = []
    for k in range(-k_max, k_max + 1):
        values.extend(_quadratic_roots(mean, k, np.sqrt(h)))
    return ResonanceSet(N=k_max, nu=profile.nu, values=np.array(values), method=TRANSPORT)


def exact_constant_resonances(c: float, N: int = DEFAULT_MODES) -> ResonanceSet:
    """
    Resonances of P_N for constant damping c: tau = -ic/2 +- sqrt(|n| - c^2/4), |n| <= N.
    """
    values = []
    for n in range(-N, N + 1):
        values.extend(_quadratic_roots(c, abs(n)))
    return ResonanceSet(N=N, nu=float(c), values=np.array(values), method=EXACT_FORMULA)


@dataclass(frozen=True)
class Region:
    """Closed rectangle of the complex plane."""
    re_min: float = -np.inf
    re_max: float = np.inf
    im_min: float = -np.inf
    im_max: float = np.inf

    def contains(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        return (
            (values.real >= self.re_min) & (values.real <= self.re_max)
            & (values.imag >= self.im_min) & (values.imag <= self.im_max)
        )


@dataclass(frozen=True)
class MatchReport:
    """
    Pairing of two resonance sets inside a region.

    Attributes:
        pairs: (tau_a, tau_b, |tau_a - tau_b|), ordered by tau_a
        unpaired_a: Members of the first set left without partner
        unpaired_b: Members of the second set left without partner
    """
    pairs: Tuple[Tuple[complex, complex, float], ...]
    unpaired_a: Tuple[complex, ...]
    unpaired_b: Tuple[complex, ...]

    @property
    def max_distance(self) -> float:
        return max((d for _, _, d in self.pairs), default=0.0)


def match_resonances(a: ResonanceSet, b: ResonanceSet, region: Optional[Region] = None) -> MatchReport:
    """
    Greedy nearest-neighbour pairing of the members of a and b lying in a region.

    The closest remaining pair is matched first; members of the larger side that run out of
    partners are reported as unpaired.

    Raises:
        FracwaveError: If either set is empty.
    """
    if not len(a) or not len(b):
        raise FracwaveError("Cannot match an empty resonance set")
    region = region or Region()
    left = a.values[region.contains(a.values)]
    right = b.values[region.contains(b.values)]

    distances = np.abs(left[:, None] - right[None, :])
    used_left, used_right = set(), set()
    pairs = []
    for flat in np.argsort(distances, axis=None, kind="stable"):
        i, j = np.unravel_index(flat, distances.shape)
        if i in used_left or j in used_right:
            continue
        used_left.add(i)
        used_right.add(j)
        pairs.append((complex(left[i]), complex(right[j]), float(distances[i, j])))
        if len(used_left) == len(left) or len(used_right) == len(right):
            break

    pairs.sort(key=lambda p: (p[0].real, p[0].imag))
    report = MatchReport(
        pairs=tuple(pairs),
        unpaired_a=tuple(complex(v) for i, v in enumerate(left) if i not in used_left),
        unpaired_b=tuple(complex(v) for j, v in enumerate(right) if j not in used_right),
    )
    if report.unpaired_a or report.unpaired_b:
        logging.info(f"Matching left {len(report.unpaired_a)} + {len(report.unpaired_b)} resonances unpaired")
    return report


@dataclass(frozen=True, eq=False)
class NuSweepEntry:
    nu: float
    pencil: ResonanceSet
    asymptotic: ResonanceSet
    matches: MatchReport


def nu_sweep(
    kind: str,
    nus: Sequence[float] = NU_SWEEP,
    N: int = DEFAULT_MODES,
    k_max: int = DEFAULT_ASYMPTOTIC_MODES,
    spec: GridSpec = GridSpec(),
) -> List[NuSweepEntry]:
    """
    Compare pencil resonances with the small-amplitude expansion over several amplitudes.

    Matching is restricted to Re tau in [1/2, sqrt(k_max) + 1/4], where the expansion applies.
    """
    region = Region(re_min=0.5, re_max=np.sqrt(k_max) + 0.25)
    base = make_profile(kind, spec=spec)
    entries = []
    for nu in nus:
        pencil = pencil_resonances(build_pencil(base, N, nu))
        asymptotic = asymptotic_resonances(base, nu, k_max)
        matches = match_resonances(asymptotic, pencil, region)
        logging.info(f"{kind} nu={nu}: max distance to expansion {matches.max_distance:.3e}")
        entries.append(NuSweepEntry(nu=float(nu), pencil=pencil, asymptotic=asymptotic, matches=matches))
    return entries
