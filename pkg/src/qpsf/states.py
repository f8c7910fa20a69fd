"""State constructors on the wavefunction and Fock-basis sides, plus the
closed-form phase-space oracles used to validate the numerical engines.

Phase-space correspondence (fixed once for the whole package):
alpha = (q + i p)/sqrt(2 hbar), i.e. q0 = sqrt(2 hbar) Re(alpha0),
p0 = sqrt(2 hbar) Im(alpha0).  Under this map the plotted oscillation of
the vacuum anti-standard distribution is cos(2 Re(alpha) Im(alpha)) =
cos(q p / hbar), which pins the convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, TruncationError
from .grids import TWO_PI, PositionGrid, WaveField


# ---------------------------------------------------------------------------
# parameter sets


@dataclass(frozen=True)
class CoherentParams:
    """Dimensionless phase-space displacement alpha0."""

    alpha0: complex

    def __post_init__(self):
        if not np.isfinite(self.alpha0):
            raise ConfigurationError("alpha0 must be finite")


@dataclass(frozen=True)
class SqueezeParams:
    """Squeeze magnitude |xi| >= 0 and phase phi_xi.

    mu = cosh|xi| and nu = exp(i phi_xi) sinh|xi| satisfy
    mu^2 - |nu|^2 = 1 identically.
    """

    xi_abs: float
    phi_xi: float = 0.0

    def __post_init__(self):
        if self.xi_abs < 0 or not np.isfinite(self.xi_abs):
            raise ConfigurationError("xi_abs must be finite and >= 0")

    @property
    def mu(self) -> float:
        return float(np.cosh(self.xi_abs))

    @property
    def nu(self) -> complex:
        return complex(np.exp(1j * self.phi_xi) * np.sinh(self.xi_abs))

    @property
    def xi(self) -> complex:
        return complex(self.xi_abs * np.exp(1j * self.phi_xi))


@dataclass(frozen=True)
class PlaneWavePairParams:
    """Two plane-wave momenta and the Gaussian window length regularizing
    them (delta peaks become peaks of width ~hbar/L)."""

    p1: float
    p2: float
    window_width: float

    def __post_init__(self):
        if self.p1 == self.p2:
            raise ConfigurationError("p1 and p2 must differ")
        if self.window_width <= 0:
            raise ConfigurationError("window width must be positive")

    @property
    def delta_p(self) -> float:
        return self.p2 - self.p1

    @property
    def mean_p(self) -> float:
        return 0.5 * (self.p1 + self.p2)


# ---------------------------------------------------------------------------
# wavefunction-side constructors


def _gaussian_packet(grid: PositionGrid, q0: float, p0: float, log_width_scale: float = 0.0):
    """Gaussian with Var(q) = hbar/2 * exp(-2*log_width_scale), centered at
    (q0, p0), with the D(alpha)S(xi)|0> phase convention."""
    hbar = grid.hbar
    q = grid.q
    s = np.exp(log_width_scale)
    env = (np.pi * hbar) ** -0.25 * np.sqrt(s) * np.exp(-(s * s) * (q - q0) ** 2 / (2.0 * hbar))
    phase = np.exp(1j * p0 * q / hbar - 1j * p0 * q0 / (2.0 * hbar))
    return env * phase


def _alpha_to_qp(alpha0: complex, hbar: float):
    w = np.sqrt(2.0 * hbar)
    return w * alpha0.real, w * alpha0.imag


def coherent_wave(params: CoherentParams, grid: PositionGrid) -> WaveField:
    """Coherent-state wavefunction <q|alpha0>: a vacuum-width Gaussian
    displaced to (q0, p0) = sqrt(2 hbar)(Re alpha0, Im alpha0)."""
    q0, p0 = _alpha_to_qp(complex(params.alpha0), grid.hbar)
    _require_inside(grid, q0, np.sqrt(grid.hbar / 2.0), "coherent state")
    return WaveField(grid, _gaussian_packet(grid, q0, p0))


def fock_wave(n: int, grid: PositionGrid) -> WaveField:
    """n-th harmonic-oscillator eigenfunction (unit mass and frequency,
    hbar from the grid), evaluated with the stable normalized recurrence."""
    if not 0 <= n <= 50:
        raise ConfigurationError(f"fock_wave supports 0 <= n <= 50, got {n}")
    hbar = grid.hbar
    x = grid.q / np.sqrt(hbar)
    turning = np.sqrt(hbar * (2 * n + 1))
    if grid.q_min > -turning - 2 or grid.q_axis.stop < turning + 2:
        raise TruncationError(
            f"grid does not cover the n={n} oscillator state (needs |q| beyond {turning:.2f})"
        )
    # shortest local wavelength ~ pi sqrt(hbar)/sqrt(2n+1); require >= 4 samples
    if grid.dq > np.pi * np.sqrt(hbar) / np.sqrt(2 * n + 1) / 4:
        raise TruncationError(f"dq={grid.dq:g} too coarse to resolve the n={n} state")
    phi_prev = np.zeros_like(x)
    phi = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    for k in range(1, n + 1):
        phi, phi_prev = np.sqrt(2.0 / k) * x * phi - np.sqrt((k - 1) / k) * phi_prev, phi
    return WaveField(grid, hbar ** -0.25 * phi.astype(complex))


def coherent_cat_norm(alpha0: complex) -> float:
    """Amplitude normalization N = (2 + 2 exp(-2|alpha0|^2))^(-1/2) of the
    even superposition of |alpha0> and |-alpha0>."""
    return float((2.0 + 2.0 * np.exp(-2.0 * abs(alpha0) ** 2)) ** -0.5)


def cat_wave(params: CoherentParams, grid: PositionGrid) -> WaveField:
    """Even coherent superposition N(|alpha0> + |-alpha0>)."""
    a0 = complex(params.alpha0)
    hbar = grid.hbar
    q0, p0 = _alpha_to_qp(a0, hbar)
    lobe_plus = _gaussian_packet(grid, q0, p0)
    lobe_minus = _gaussian_packet(grid, -q0, -p0)
    _require_inside(grid, abs(q0), np.sqrt(hbar / 2.0), "cat state")
    return WaveField(grid, coherent_cat_norm(a0) * (lobe_plus + lobe_minus))


def plane_wave_pair(params: PlaneWavePairParams, grid: PositionGrid) -> WaveField:
    """Gaussian-windowed superposition [e^{i p1 q/hbar} + e^{i p2 q/hbar}]
    * exp(-q^2/(2 L^2)), normalized.

    Requires L >= 5 * 2 pi hbar/|p2-p1| (fringes resolvable inside the
    window) and a grid spanning at least 4 L.
    """
    hbar = grid.hbar
    L = params.window_width
    fringe = TWO_PI * hbar / abs(params.delta_p)
    if L < 5.0 * fringe:
        raise ConfigurationError(
            f"window width {L:g} too narrow: needs >= 5 * 2*pi*hbar/|dp| = {5 * fringe:g}"
        )
    if grid.span < 4.0 * L:
        raise TruncationError(
            f"grid span {grid.span:g} must be at least 4 L = {4 * L:g}"
        )
    p_nyquist = np.pi * hbar / grid.dq
    if max(abs(params.p1), abs(params.p2)) >= p_nyquist:
        raise ConfigurationError(
            f"momenta exceed the grid Nyquist limit {p_nyquist:g}"
        )
    q = grid.q
    vals = (np.exp(1j * params.p1 * q / hbar) + np.exp(1j * params.p2 * q / hbar)) \
        * np.exp(-q * q / (2.0 * L * L))
    return WaveField(grid, vals)


def squeezed_coherent_wave(c: CoherentParams, s: SqueezeParams,
                           grid: PositionGrid) -> WaveField:
    """Displaced squeezed vacuum D(alpha0) S(xi) |0> for axis-aligned
    squeezing (phi_xi in {0, pi}); Var(q) = hbar/2 * exp(-2 xi_signed)."""
    if s.xi_abs > 3.0:
        raise TruncationError("squeeze magnitude above 3 is not grid-resolvable")
    phi = s.phi_xi % (2.0 * np.pi)
    if not (abs(phi) < 1e-12 or abs(phi - np.pi) < 1e-12):
        raise ConfigurationError(
            "wavefunction-side squeezing supports phi_xi in {0, pi} only"
        )
    xi_signed = s.xi_abs if abs(phi) < 1e-12 else -s.xi_abs
    sigma_q = np.sqrt(grid.hbar / 2.0) * np.exp(-xi_signed)
    if grid.dq > sigma_q / 4:
        raise TruncationError("dq too coarse for the squeezed quadrature")
    q0, p0 = _alpha_to_qp(complex(c.alpha0), grid.hbar)
    _require_inside(grid, q0, max(sigma_q, np.sqrt(grid.hbar / 2.0) * np.exp(s.xi_abs)),
                    "squeezed state")
    return WaveField(grid, _gaussian_packet(grid, q0, p0, log_width_scale=xi_signed))


def squeezed_cat_wave(s: SqueezeParams, grid: PositionGrid) -> WaveField:
    """Superposition of two perpendicularly squeezed vacua
    N(S(xi)|0> + S(-xi)|0>), normalized numerically."""
    if s.xi_abs > 3.0:
        raise TruncationError("squeeze magnitude above 3 is not grid-resolvable")
    narrow = _gaussian_packet(grid, 0.0, 0.0, log_width_scale=s.xi_abs)
    wide = _gaussian_packet(grid, 0.0, 0.0, log_width_scale=-s.xi_abs)
    return WaveField(grid, narrow + wide)


def _require_inside(grid: PositionGrid, center_extent: float, width: float, what: str):
    margin = abs(center_extent) + 6.0 * width
    if grid.q_min > -margin or grid.q_axis.stop < margin:
        raise TruncationError(
            f"{what}: grid [{grid.q_min:g}, {grid.q_axis.stop:g}] does not cover "
            f"support out to |q|~{margin:g}"
        )


# ---------------------------------------------------------------------------
# Fock-basis constructors (truncated number basis, dimension dim)


def vacuum_vec(dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[0] = 1.0
    return v


def fock_vec(n: int, dim: int) -> np.ndarray:
    if not 0 <= n < dim:
        raise ConfigurationError(f"fock level {n} outside truncation {dim}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def coherent_vec(alpha0: complex, dim: int) -> np.ndarray:
    """Truncated coherent state exp(-|a|^2/2) sum a^n/sqrt(n!) |n>."""
    v = np.empty(dim, dtype=complex)
    v[0] = 1.0
    for n in range(1, dim):
        v[n] = v[n - 1] * alpha0 / np.sqrt(n)
    v *= np.exp(-0.5 * abs(alpha0) ** 2)
    return v


def coherent_vec_batch(alphas: np.ndarray, dim: int) -> np.ndarray:
    """coherent_vec vectorized over a 1D batch of alphas: shape (N, dim)."""
    al = np.asarray(alphas, dtype=complex).ravel()
    out = np.empty((al.size, dim), dtype=complex)
    out[:, 0] = 1.0
    for n in range(1, dim):
        out[:, n] = out[:, n - 1] * al / np.sqrt(n)
    out *= np.exp(-0.5 * np.abs(al) ** 2)[:, None]
    return out


def cat_vec(alpha0: complex, dim: int) -> np.ndarray:
    """Truncated even cat N(|alpha0> + |-alpha0>), renormalized."""
    v = coherent_vec(alpha0, dim) + coherent_vec(-alpha0, dim)
    return v / np.linalg.norm(v)


def pure_density(vec: np.ndarray) -> np.ndarray:
    """|psi><psi| from a (not necessarily normalized) state vector."""
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


# ---------------------------------------------------------------------------
# closed-form oracles on the alpha plane


def oracle_generalized_kr_coherent(alpha, alpha0: complex, sigma: float):
    """Closed form of the sigma-ordered anti-standard distribution of a
    coherent state |alpha0>: a Gaussian bell at alpha0 carrying the phase
    factor exp[i 4 sigma (Im a - Im a0)(Re a - Re a0)/(1+sigma^2)].

    Vectorized over `alpha`; sigma=0 gives the coherent-state Wigner
    function, sigma=1 the anti-standard (K-R) distribution.
    """
    a = np.asarray(alpha, dtype=complex)
    d = a - alpha0
    dc = np.conj(d)
    denom = 1.0 + sigma * sigma
    expo = (sigma * dc * dc - 2.0 * d * dc - sigma * d * d) / denom
    return 2.0 / (np.pi * np.sqrt(denom)) * np.exp(expo)


def oracle_kr_cat(alpha, alpha0: complex, sigma: float):
    """Four-exponential closed form for the even cat N(|a0> + |-a0>).

    The overall factor is 2 N^2 (the density operator is quadratic in the
    amplitude normalization N), which reduces to the coherent-state form
    at alpha0 = 0 and matches the numerically computed distribution.
    """
    a = np.asarray(alpha, dtype=complex)
    a0 = complex(alpha0)
    denom = 1.0 + sigma * sigma
    nn = coherent_cat_norm(a0) ** 2

    dm = a - a0          # alpha - alpha0
    dp = a + a0          # alpha + alpha0
    dmc = np.conj(dm)
    dpc = np.conj(dp)

    e1 = np.exp((sigma * dmc * dmc - sigma * dm * dm - 2.0 * dm * dmc) / denom)
    e2 = np.exp((sigma * dpc * dpc - sigma * dp * dp - 2.0 * dp * dpc) / denom)
    cross = np.exp(-2.0 * abs(a0) ** 2)
    e3 = np.exp((sigma * dpc * dpc - sigma * dm * dm - 2.0 * dpc * dm) / denom)
    e4 = np.exp((sigma * dmc * dmc - sigma * dp * dp - 2.0 * dmc * dp) / denom)
    return 2.0 * nn / (np.pi * np.sqrt(denom)) * (e1 + e2 + cross * (e3 + e4))


def oracle_kr_fock1(alpha):
    """Anti-standard (sigma=1) distribution of the one-photon state:
    (sqrt(2)/pi)(a^2 - a*^2) exp(-|a|^2 - a^2/2 + a*^2/2)."""
    a = np.asarray(alpha, dtype=complex)
    ac = np.conj(a)
    return (np.sqrt(2.0) / np.pi) * (a * a - ac * ac) \
        * np.exp(-a * ac - 0.5 * a * a + 0.5 * ac * ac)
