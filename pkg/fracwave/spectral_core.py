"""
Periodic Fourier transform pair, Fourier multipliers and norms on the circle T = R / 2piZ.

Coefficients follow the convention u(x) = sum_n u_hat(n) e^{inx} with
u_hat(n) = (1/2pi) int e^{-inx} u(x) dx, realised on M grid points as
u_hat(n) = (1/M) sum_j u(x_j) e^{-inx_j}. Coefficient arrays are stored in numpy FFT order,
so the logical mode index runs over [-M/2, M/2 - 1] and the Nyquist mode is -M/2.
"""
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Union

import numpy as np
from scipy.linalg import toeplitz

from fracwave.common.errors import FracwaveError, GridError, ResolutionError, SymmetryError
from fracwave.constants import (
    DEFAULT_GRID_POINTS,
    MIN_GRID_POINTS,
    SYMMETRY_TOL,
    SYNTHESIS_IMAG_TOL,
)

if TYPE_CHECKING:
    from fracwave.damping.profiles import DampingProfile


@dataclass(frozen=True)
class GridSpec:
    """
    Uniform periodic grid x_j = 2pi j / M, j = 0..M-1.

    Attributes:
        M: Number of grid points, a power of two no smaller than 8.
    """
    M: int = DEFAULT_GRID_POINTS

    def __post_init__(self) -> None:
        if not isinstance(self.M, (int, np.integer)) or isinstance(self.M, bool):
            raise GridError(f"Grid size must be an integer, got {self.M!r}")
        if self.M < MIN_GRID_POINTS:
            raise GridError(f"Grid size must be at least {MIN_GRID_POINTS}, got {self.M}")
        if self.M & (self.M - 1):
            raise GridError(f"Grid size must be a power of two, got {self.M}")

    @classmethod
    def covering(cls, max_mode: int, minimum: int = DEFAULT_GRID_POINTS) -> "GridSpec":
        """
        Smallest power-of-two grid of at least `minimum` points whose coefficient range
        contains every |n| <= max_mode.
        """
        size = 1 << (max(int(minimum), MIN_GRID_POINTS) - 1).bit_length()
        while size // 2 < max_mode:
            size *= 2
        return cls(size)

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.M

    @property
    def points(self) -> np.ndarray:
        return self.spacing * np.arange(self.M)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Logical mode index of every stored coefficient, in FFT order."""
        return np.rint(np.fft.fftfreq(self.M, d=1.0 / self.M)).astype(int)

    @property
    def max_mode(self) -> int:
        return self.M // 2


@dataclass(frozen=True, eq=False)
class GridField:
    """
    A real periodic field sampled on a GridSpec.

    Attributes:
        spec: The grid the samples live on.
        values: Real samples u(x_j), length M.
    """
    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.spec.M,):
            raise GridError(f"Expected {self.spec.M} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise GridError("Grid samples must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class ModeField:
    """
    Complex Fourier coefficients u_hat(n) of a periodic field.

    Attributes:
        spec: The grid the coefficients belong to.
        coeffs: Length-M complex array in numpy FFT order.
    """
    spec: GridSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.spec.M,):
            raise GridError(f"Expected {self.spec.M} coefficients, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_modes(cls, modes: dict, spec: GridSpec) -> "ModeField":
        """
        Build a field from a mapping {n: u_hat(n)} of logical indices.
        """
        coeffs = np.zeros(spec.M, dtype=complex)
        for n, value in modes.items():
            coeffs[_storage_index(int(n), spec)] = value
        return cls(spec, coeffs)

    def coefficient(self, n: int) -> complex:
        """Coefficient at logical index n, |n| <= M/2 (n = M/2 aliases to -M/2)."""
        return complex(self.coeffs[_storage_index(n, self.spec)])

    def is_hermitian(self, tol: float = SYMMETRY_TOL) -> bool:
        """True if u_hat(-n) = conj(u_hat(n)) up to `tol` relative to the largest coefficient."""
        mirrored = np.conj(np.roll(self.coeffs[::-1], 1))
        scale = max(np.max(np.abs(self.coeffs)), 1e-300)
        return bool(np.max(np.abs(self.coeffs - mirrored)) <= tol * scale)

    def __add__(self, other: "ModeField") -> "ModeField":
        require_same_grid(self.spec, other.spec)
        return ModeField(self.spec, self.coeffs + other.coeffs)

    def __sub__(self, other: "ModeField") -> "ModeField":
        require_same_grid(self.spec, other.spec)
        return ModeField(self.spec, self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "ModeField":
        return ModeField(self.spec, scalar * self.coeffs)

    __rmul__ = __mul__


def _storage_index(n: int, spec: GridSpec) -> int:
    if abs(n) > spec.max_mode:
        raise ResolutionError(f"Mode {n} is outside the range |n| <= {spec.max_mode} of a {spec.M}-point grid")
    return n % spec.M


def require_same_grid(a: GridSpec, b: GridSpec) -> None:
    if a.M != b.M:
        raise ResolutionError(f"Resolution mismatch: {a.M} vs {b.M} grid points")


def to_modes(f: GridField) -> ModeField:
    """
    Forward transform: u_hat(n) = (1/M) sum_j f(x_j) e^{-inx_j}.
    """
    return ModeField(f.spec, np.fft.fft(f.values) / f.spec.M)


def synthesize(m: ModeField) -> np.ndarray:
    """Complex synthesis sum_n u_hat(n) e^{inx_j} without any symmetry check."""
    return np.fft.ifft(m.coeffs) * m.spec.M


def to_grid(m: ModeField) -> GridField:
    """
    Inverse transform to real samples f(x_j) = sum_n u_hat(n) e^{inx_j}.

    Raises:
        SymmetryError: If the synthesis leaves an imaginary residue above tolerance,
            i.e. the coefficients are not Hermitian.
    """
    values = synthesize(m)
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    scale = max(1.0, float(np.max(np.abs(values.real))))
    if residue > SYNTHESIS_IMAG_TOL * scale:
        raise SymmetryError(f"Coefficients are not Hermitian: imaginary residue {residue:.3e}")
    return GridField(m.spec, values.real)


def apply_fractional_laplacian(m: ModeField, s: float) -> ModeField:
    """
    Apply |D|^s, scaling the coefficient at n by |n|^s.

    Args:
        m: Input coefficients.
        s: Order, finite and non-negative. The constant mode is annihilated for s > 0.
    """
    if not np.isfinite(s) or s < 0:
        raise FracwaveError(f"Fractional order must be finite and non-negative, got {s}")
    symbol = np.abs(m.spec.wavenumbers).astype(float) ** s
    return ModeField(m.spec, symbol * m.coeffs)


def _padded(coeffs: np.ndarray, M: int, K: int) -> np.ndarray:
    out = np.zeros(K, dtype=complex)
    half = M // 2
    out[:half] = coeffs[:half]
    out[K - half:] = coeffs[half:]
    return out


def _truncated(coeffs: np.ndarray, M: int, K: int) -> np.ndarray:
    half = M // 2
    return np.concatenate([coeffs[:half], coeffs[K - half:]])


def apply_multiplication(
    chi: Union["DampingProfile", GridField],
    m: ModeField,
    dealias: bool = False,
) -> ModeField:
    """
    Multiply a field by a damping function, forming the product on the grid.

    Without dealiasing this equals the Toeplitz action (chi u)^(n) = sum_l chi_hat(n-l) u_hat(l)
    up to aliasing of modes beyond M/2. With `dealias=True` both factors are zero-padded to
    3M/2 points before the product is formed.

    Raises:
        ResolutionError: If chi and m live on different grids.
    """
    samples = getattr(chi, "samples", chi)
    require_same_grid(samples.spec, m.spec)
    M = m.spec.M
    if not dealias:
        product = np.fft.ifft(m.coeffs) * M * samples.values
        return ModeField(m.spec, np.fft.fft(product) / M)

    K = 3 * M // 2
    chi_hat = np.fft.fft(samples.values) / M
    chi_fine = np.fft.ifft(_padded(chi_hat, M, K)) * K
    u_fine = np.fft.ifft(_padded(m.coeffs, M, K)) * K
    product_hat = np.fft.fft(chi_fine * u_fine) / K
    return ModeField(m.spec, _truncated(product_hat, M, K))


def l2_norm(m: ModeField) -> float:
    """L2 norm under the plain integral over T: ||f||^2 = 2pi sum_n |f_hat(n)|^2."""
    return float(np.sqrt(2.0 * np.pi * np.sum(np.abs(m.coeffs) ** 2)))


def h_half_norm(m: ModeField) -> float:
    """Homogeneous H^{1/2} seminorm: ||f||^2 = 2pi sum_n |n| |f_hat(n)|^2."""
    weights = np.abs(m.spec.wavenumbers)
    return float(np.sqrt(2.0 * np.pi * np.sum(weights * np.abs(m.coeffs) ** 2)))


def toeplitz_matrix(chi_modes: ModeField, N: int) -> np.ndarray:
    """
    The (2N+1)x(2N+1) matrix of multiplication by chi on L_N: X[n, l] = chi_hat(n - l).

    Raises:
        ResolutionError: If |n - l| <= 2N exceeds the available coefficients (needs M >= 4N).
    """
    if 2 * N > chi_modes.spec.max_mode:
        raise ResolutionError(
            f"Truncation N={N} needs Fourier coefficients up to {2 * N}; grid of {chi_modes.spec.M} "
            f"points only has {chi_modes.spec.max_mode} (use M >= {4 * N})"
        )
    column = np.array([chi_modes.coefficient(i) for i in range(0, 2 * N + 1)])
    row = np.array([chi_modes.coefficient(-j) for j in range(0, 2 * N + 1)])
    return toeplitz(column, row)
