"""Spectral-domain deep-water surface synthesis.

Builds a wind-driven directional spectrum over an N x N wavevector grid,
evolves it with the deep-water dispersion relation, and inverse-FFTs
height, choppy horizontal displacement, and surface normals.

The Gaussian amplitude draws use a portable splitmix64 + Box-Muller
generator (not numpy's) so that any implementation reading the same scene
seed reproduces the same surface bit-for-bit up to libm rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GRAVITY = 9.81
PHILLIPS_A = 4e-5
SMALL_WAVE_FACTOR = 1e-3  # suppression scale as a fraction of L = V^2/g

WIND_SPEED_RANGE = (1.5, 30.0)
WIND_DIR_RANGE = (0.0, 180.0)
CHOPPINESS_RANGE = (0.0, 3.0)

# 100 m keeps wave energy inside the optimization grid (N=64) across the
# whole wind-speed range: the spectral peak of V=1.5 m/s sits near
# k=3.1 rad/m and the grid covers [2*pi/100, pi*64/100] = [0.063, 2.0+].
DEFAULT_DOMAIN_LEN = 100.0
DEFAULT_GRID_N = 256
OPTIMIZATION_GRID_N = 64


# ---------------------------------------------------------------------------
# Portable RNG (shared contract with the scene-file consumers)
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator; uniform doubles in [0, 1)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def gaussian_pairs(seed: int, count: int) -> np.ndarray:
    """(count, 2) standard normal draws via Box-Muller, in draw order."""
    rng = SplitMix64(seed)
    out = np.empty((count, 2), dtype=np.float64)
    for i in range(count):
        u1 = rng.next_double()
        u2 = rng.next_double()
        # Guard the log singularity at u1 == 0.
        r = math.sqrt(-2.0 * math.log(u1 if u1 > 0.0 else 5e-324))
        out[i, 0] = r * math.cos(2.0 * math.pi * u2)
        out[i, 1] = r * math.sin(2.0 * math.pi * u2)
    return out


# ---------------------------------------------------------------------------
# Spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumGrid:
    """Initial complex wave amplitudes h0 over the wavevector grid."""

    n: int
    domain_len: float
    wind_speed: float
    wind_dir: float
    rng_seed: int
    h0: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n <= 0 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two, got {self.n}")


def wavevectors(n: int, domain_len: float) -> tuple[np.ndarray, np.ndarray]:
    """kx, kz grids in rad/m using FFT frequency ordering."""
    freqs = np.fft.fftfreq(n, d=domain_len / n) * 2.0 * np.pi
    kz, kx = np.meshgrid(freqs, freqs, indexing="ij")
    return kx, kz


def phillips_spectrum(kx, kz, wind_speed: float, wind_dir_deg: float) -> np.ndarray:
    """Directional wind-wave power spectrum.

    P(k) = A * exp(-1/(kL)^2) / k^4 * (k_hat . w_hat)^2 * exp(-k^2 l^2)
    with L = V^2/g and l = 1e-3 * L.  Waves running against the wind are
    kept (the squared cosine already folds direction symmetry).
    """
    k2 = kx * kx + kz * kz
    k = np.sqrt(k2)
    big_l = wind_speed * wind_speed / GRAVITY
    small_l = SMALL_WAVE_FACTOR * big_l
    theta = math.radians(wind_dir_deg)
    wx, wz = math.cos(theta), math.sin(theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        dot = np.where(k > 0, (kx * wx + kz * wz) / np.where(k > 0, k, 1.0), 0.0)
        p = (
            PHILLIPS_A
            * np.exp(-1.0 / np.where(k2 > 0, k2 * big_l * big_l, np.inf))
            / np.where(k2 > 0, k2 * k2, 1.0)
            * dot
            * dot
            * np.exp(-k2 * small_l * small_l)
        )
    p[k2 == 0] = 0.0
    return p


def init_spectrum(
    wind_speed: float,
    wind_dir: float,
    n: int = DEFAULT_GRID_N,
    domain_len: float = DEFAULT_DOMAIN_LEN,
    seed: int = 0,
) -> SpectrumGrid:
    """Seeded initial amplitudes h0(k) = (xi_r + i xi_i)/sqrt(2) * sqrt(P(k))."""
    lo, hi = WIND_SPEED_RANGE
    if not lo <= wind_speed <= hi:
        raise ValueError(f"wind_speed {wind_speed} outside [{lo}, {hi}]")
    lo, hi = WIND_DIR_RANGE
    if not lo <= wind_dir <= hi:
        raise ValueError(f"wind_dir {wind_dir} outside [{lo}, {hi}]")
    if n <= 0 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two, got {n}")

    kx, kz = wavevectors(n, domain_len)
    p = phillips_spectrum(kx, kz, wind_speed, wind_dir)
    xi = gaussian_pairs(seed, n * n).reshape(n, n, 2)
    amp = np.sqrt(p) / math.sqrt(2.0)
    h0 = (xi[..., 0] + 1j * xi[..., 1]) * amp
    h0[0, 0] = 0.0
    return SpectrumGrid(
        n=n, domain_len=domain_len, wind_speed=wind_speed, wind_dir=wind_dir,
        rng_seed=seed, h0=h0,
    )


# ---------------------------------------------------------------------------
# Time evolution and synthesis
# ---------------------------------------------------------------------------

def dispersion(k_mag) -> np.ndarray:
    """Deep-water dispersion: omega = sqrt(g |k|)."""
    return np.sqrt(GRAVITY * np.asarray(k_mag, dtype=np.float64))


def _conj_index(n: int) -> np.ndarray:
    return (-np.arange(n)) % n


def evolve(spec: SpectrumGrid, t: float, loop_period: float | None = None) -> np.ndarray:
    """Hermitian-symmetric amplitudes at time t:
    h(k, t) = h0(k) e^{i w t} + conj(h0(-k)) e^{-i w t}.

    loop_period, when given, quantizes omega to multiples of 2*pi/T so the
    animation tiles in time (off by default).
    """
    kx, kz = wavevectors(spec.n, spec.domain_len)
    omega = dispersion(np.hypot(kx, kz))
    if loop_period is not None:
        omega0 = 2.0 * np.pi / loop_period
        omega = np.floor(omega / omega0) * omega0
    idx = _conj_index(spec.n)
    h0_neg = spec.h0[np.ix_(idx, idx)]
    phase = np.exp(1j * omega * t)
    return spec.h0 * phase + np.conj(h0_neg) * np.conj(phase)


@dataclass(frozen=True)
class DisplacementField:
    """Synthesized surface rasters at one time sample (meters / unit vecs)."""

    height: np.ndarray
    displace_x: np.ndarray
    displace_z: np.ndarray
    normal: np.ndarray  # (n, n, 3) unit vectors, y up
    time: float
    domain_len: float


def ifft2(field: np.ndarray) -> np.ndarray:
    """Inverse 2D DFT with 1/N^2 normalization; power-of-two sizes only."""
    field = np.asarray(field)
    n0, n1 = field.shape
    for n in (n0, n1):
        if n <= 0 or (n & (n - 1)) != 0:
            raise ValueError(f"size must be a power of two, got {field.shape}")
    return np.fft.ifft2(field)


def fft2(field: np.ndarray) -> np.ndarray:
    """Forward 2D DFT (no normalization), the inverse pair of ifft2."""
    field = np.asarray(field)
    n0, n1 = field.shape
    for n in (n0, n1):
        if n <= 0 or (n & (n - 1)) != 0:
            raise ValueError(f"size must be a power of two, got {field.shape}")
    return np.fft.fft2(field)


def synthesize(spec: SpectrumGrid, t: float, choppiness: float,
               loop_period: float | None = None) -> DisplacementField:
    """Height, choppy displacement, and normals at time t.

    The inverse transforms are scaled by N^2 so that a unit spectral pair
    yields an order-one spatial wave independent of grid resolution
    (amplitudes live in h0; the 1/N^2 of the plain inverse DFT would make
    the surface vanish as the grid is refined).
    """
    lo, hi = CHOPPINESS_RANGE
    if not lo <= choppiness <= hi:
        raise ValueError(f"choppiness {choppiness} outside [{lo}, {hi}]")
    n = spec.n
    ht = evolve(spec, t, loop_period)
    kx, kz = wavevectors(n, spec.domain_len)
    k = np.hypot(kx, kz)
    with np.errstate(divide="ignore", invalid="ignore"):
        kxn = np.where(k > 0, kx / np.where(k > 0, k, 1.0), 0.0)
        kzn = np.where(k > 0, kz / np.where(k > 0, k, 1.0), 0.0)

    scale = n * n
    height_c = ifft2(ht) * scale
    dx_c = ifft2(-1j * kxn * ht) * scale
    dz_c = ifft2(-1j * kzn * ht) * scale
    sx_c = ifft2(1j * kx * ht) * scale
    sz_c = ifft2(1j * kz * ht) * scale

    height = np.real(height_c)
    disp_x = choppiness * np.real(dx_c)
    disp_z = choppiness * np.real(dz_c)
    slope_x = np.real(sx_c)
    slope_z = np.real(sz_c)

    normal = np.stack(
        [-slope_x, np.ones_like(slope_x), -slope_z], axis=2
    )
    normal /= np.linalg.norm(normal, axis=2, keepdims=True)

    return DisplacementField(
        height=height, displace_x=disp_x, displace_z=disp_z,
        normal=normal, time=t, domain_len=spec.domain_len,
    )
