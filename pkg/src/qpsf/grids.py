"""Uniform grids, complex fields, and the Fourier engine.

Conventions used throughout the package:

* momentum wavefunction:  psit(p) = sum_i exp(-i p q_i / hbar) psi(q_i) dq
  (no prefactor), so the momentum density carries a 1/(2 pi hbar) measure;
* the conjugate momentum axis of an n-point position grid has spacing
  dp = 2 pi hbar / (n dq) and spans one period centered on 0;
* all quadrature is the plain Riemann sum on the uniform grid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

TWO_PI = 2.0 * np.pi

# |psi| at a grid edge above this fraction of max(|psi|) means the grid
# probably truncates the state; constructors warn.
EDGE_RATIO_WARN = 1e-6


class CoverageWarning(UserWarning):
    """State amplitude is not negligible at a grid edge."""


@dataclass(frozen=True)
class Axis:
    """Uniform 1D sampling: values start + step*k for k = 0..count-1."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.step <= 0:
            raise ConfigurationError(f"axis step must be positive, got {self.step}")
        if self.count < 2:
            raise ConfigurationError(f"axis needs at least 2 points, got {self.count}")

    @property
    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    def matches(self, other: "Axis", tol: float = 1e-9) -> bool:
        return (
            self.count == other.count
            and abs(self.start - other.start) <= tol * max(1.0, abs(self.start))
            and abs(self.step - other.step) <= tol * self.step
        )


@dataclass(frozen=True)
class PositionGrid:
    """Uniform sampling q_i = q_min + i*dq, i = 0..n-1, carrying hbar.

    The conjugate momentum grid is fully determined: dp = 2 pi hbar/(n dq),
    with p values spanning one period centered on 0.
    """

    q_min: float
    dq: float
    n: int
    hbar: float = 1.0

    def __post_init__(self):
        if self.n < 8:
            raise ConfigurationError(f"grid too small: n={self.n} < 8")
        if self.n % 2:
            raise ConfigurationError(f"n must be even for the FFT engine, got {self.n}")
        if self.dq <= 0:
            raise ConfigurationError(f"dq must be positive, got {self.dq}")
        if self.hbar <= 0:
            raise ConfigurationError(f"hbar must be positive, got {self.hbar}")

    @classmethod
    def from_span(cls, q_min: float, q_max: float, n: int, hbar: float = 1.0):
        """Grid of n samples on [q_min, q_max), spacing (q_max-q_min)/n."""
        if q_max <= q_min:
            raise ConfigurationError("q_max must exceed q_min")
        return cls(q_min, (q_max - q_min) / n, n, hbar)

    @property
    def q(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.n)

    @property
    def span(self) -> float:
        return self.n * self.dq

    @property
    def dp(self) -> float:
        return TWO_PI * self.hbar / (self.n * self.dq)

    @property
    def p_min(self) -> float:
        return -(self.n // 2) * self.dp

    @property
    def p(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.n)

    @property
    def q_axis(self) -> Axis:
        return Axis(self.q_min, self.dq, self.n)

    @property
    def p_axis(self) -> Axis:
        return Axis(self.p_min, self.dp, self.n)


def _warn_on_edges(values: np.ndarray, what: str):
    peak = np.abs(values).max()
    if peak == 0.0:
        return
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > EDGE_RATIO_WARN * peak:
        warnings.warn(
            f"{what}: |amplitude| at grid edge is {edge / peak:.2e} of max; "
            "the grid may truncate the state",
            CoverageWarning,
            stacklevel=3,
        )


class WaveField:
    """Complex wavefunction samples on a PositionGrid, normalized so that
    sum |psi|^2 dq = 1 (constructors normalize unless told otherwise)."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: PositionGrid, values, normalize: bool = True):
        vals = np.array(values, dtype=complex)
        if vals.shape != (grid.n,):
            raise ConfigurationError(
                f"wavefunction has {vals.shape} samples, grid expects ({grid.n},)"
            )
        if normalize:
            nrm2 = float((np.abs(vals) ** 2).sum() * grid.dq)
            if nrm2 <= 0.0 or not np.isfinite(nrm2):
                raise ConfigurationError("cannot normalize: zero or non-finite field")
            vals /= np.sqrt(nrm2)
        vals.flags.writeable = False
        self.grid = grid
        self.values = vals
        _warn_on_edges(vals, "WaveField")

    def norm_squared(self) -> float:
        return float((np.abs(self.values) ** 2).sum() * self.grid.dq)

    def position_density(self) -> np.ndarray:
        """|psi(q)|^2 on the grid."""
        return np.abs(self.values) ** 2


class MomentumField:
    """Momentum wavefunction psit(p) on the conjugate grid of a
    PositionGrid, normalized with the 1/(2 pi hbar) measure."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: PositionGrid, values):
        vals = np.array(values, dtype=complex)
        if vals.shape != (grid.n,):
            raise ConfigurationError(
                f"momentum field has {vals.shape} samples, grid expects ({grid.n},)"
            )
        vals.flags.writeable = False
        self.grid = grid
        self.values = vals

    def norm_squared(self) -> float:
        g = self.grid
        return float((np.abs(self.values) ** 2).sum() * g.dp / (TWO_PI * g.hbar))

    def momentum_density(self) -> np.ndarray:
        """|psit(p)|^2 / (2 pi hbar) on the conjugate grid."""
        g = self.grid
        return np.abs(self.values) ** 2 / (TWO_PI * g.hbar)


@dataclass(frozen=True)
class PhaseGrid:
    """2D lattice for phase-space fields.

    plane='qp' means axes (q, p); plane='alpha' means axes
    (Re alpha, Im alpha) on the complex plane (hbar plays no role there).
    """

    q_axis: Axis
    p_axis: Axis
    hbar: float = 1.0
    plane: str = "qp"

    def __post_init__(self):
        if self.plane not in ("qp", "alpha"):
            raise ConfigurationError(f"unknown plane {self.plane!r}")
        if self.hbar <= 0:
            raise ConfigurationError("hbar must be positive")

    @classmethod
    def conjugate(cls, grid: PositionGrid) -> "PhaseGrid":
        """The natural phase grid: q axis of `grid` times its conjugate
        momentum axis."""
        return cls(grid.q_axis, grid.p_axis, grid.hbar)

    @classmethod
    def with_p_window(cls, grid: PositionGrid, p_lo: float, p_hi: float) -> "PhaseGrid":
        """Conjugate grid restricted to momentum nodes inside [p_lo, p_hi]."""
        p = grid.p
        mask = (p >= p_lo - 1e-12) & (p <= p_hi + 1e-12)
        idx = np.nonzero(mask)[0]
        if idx.size < 2:
            raise ConfigurationError("momentum window contains fewer than 2 nodes")
        return cls(grid.q_axis, Axis(p[idx[0]], grid.dp, idx.size), grid.hbar)

    @classmethod
    def alpha(cls, re_min, d_re, n_re, im_min, d_im, n_im) -> "PhaseGrid":
        return cls(Axis(re_min, d_re, n_re), Axis(im_min, d_im, n_im), 1.0, "alpha")

    @classmethod
    def alpha_square(cls, half_width: float, count: int) -> "PhaseGrid":
        """Symmetric alpha lattice on [-half_width, half_width]^2."""
        step = 2.0 * half_width / (count - 1)
        return cls.alpha(-half_width, step, count, -half_width, step, count)

    @property
    def q(self) -> np.ndarray:
        return self.q_axis.values

    @property
    def p(self) -> np.ndarray:
        return self.p_axis.values

    @property
    def shape(self):
        return (self.q_axis.count, self.p_axis.count)

    @property
    def cell(self) -> float:
        return self.q_axis.step * self.p_axis.step

    def alphas(self) -> np.ndarray:
        """Complex lattice points; for plane='alpha' these are the alpha
        values themselves, for plane='qp' the alpha-map (q+ip)/sqrt(2 hbar)."""
        if self.plane == "alpha":
            return self.q[:, None] + 1j * self.p[None, :]
        return (self.q[:, None] + 1j * self.p[None, :]) / np.sqrt(2.0 * self.hbar)


PHASE_FIELD_TAGS = (
    "wigner",
    "kr",
    "mh",
    "cohen",
    "sigma-kr",
    "s-ordered",
    "product",
    "omega",
)


class PhaseField:
    """Complex 2D array of quasi-distribution values on a PhaseGrid.

    `tag` records the distribution kind; `param` carries the family
    parameter (sigma for 'sigma-kr', s for 's-ordered') when there is one.
    """

    __slots__ = ("grid", "values", "tag", "param")

    def __init__(self, grid: PhaseGrid, values, tag: str, param: float | None = None):
        if tag not in PHASE_FIELD_TAGS:
            raise ConfigurationError(f"unknown phase-field tag {tag!r}")
        vals = np.array(values, dtype=complex)
        if vals.shape != grid.shape:
            raise ConfigurationError(
                f"field shape {vals.shape} does not match grid shape {grid.shape}"
            )
        vals.flags.writeable = False
        self.grid = grid
        self.values = vals
        self.tag = tag
        self.param = param


def integrate_2d(field: PhaseField) -> complex:
    """Riemann sum of the field with dq*dp cell weights."""
    return complex(field.values.sum() * field.grid.cell)


def fourier_sum(values, x0: float, dx: float, y0: float, dy: float, m: int,
                sign: int, hbar: float = 1.0) -> np.ndarray:
    """Continuous-convention Fourier sum evaluated on a uniform target axis.

        F[..., j] = sum_k values[..., k] * exp(sign * 1j * x_k * y_j / hbar)

    with x_k = x0 + k*dx over the last axis and y_j = y0 + j*dy,
    j = 0..m-1.  When dy is an integer multiple r of the resonant spacing
    2 pi hbar/(N dx) the sum reduces to FFT bins (j*r mod N) with explicit
    phase corrections for x0 and y0; otherwise a direct matrix product is
    used.  Both paths agree to rounding.
    """
    if sign not in (-1, 1):
        raise ConfigurationError("sign must be +1 or -1")
    vals = np.asarray(values, dtype=complex)
    n = vals.shape[-1]
    ratio = dy * n * dx / (TWO_PI * hbar)
    r = int(round(ratio))
    y = y0 + dy * np.arange(m)
    if r >= 1 and abs(ratio - r) <= 1e-9 * max(1.0, r):
        k = np.arange(n)
        g = vals * np.exp(sign * 1j * (k * dx) * y0 / hbar)
        if sign < 0:
            spect = np.fft.fft(g, axis=-1)
        else:
            spect = n * np.fft.ifft(g, axis=-1)
        bins = (np.arange(m) * r) % n
        out = spect[..., bins]
        out *= np.exp(sign * 1j * x0 * y / hbar)
        return out
    x = x0 + dx * np.arange(n)
    return vals @ np.exp(sign * 1j * np.outer(x, y) / hbar)


def forward_fourier(psi: WaveField) -> MomentumField:
    """psit(p_j) = sum_i exp(-i p_j q_i/hbar) psi(q_i) dq on the conjugate
    momentum grid, via FFT with explicit phase corrections."""
    g = psi.grid
    vals = g.dq * fourier_sum(psi.values, g.q_min, g.dq, g.p_min, g.dp, g.n,
                              sign=-1, hbar=g.hbar)
    return MomentumField(g, vals)


def inverse_fourier(phi: MomentumField) -> WaveField:
    """Inverse of forward_fourier with the 1/(2 pi hbar) measure; the
    round trip is the identity to rounding."""
    g = phi.grid
    vals = fourier_sum(phi.values, g.p_min, g.dp, g.q_min, g.dq, g.n,
                       sign=+1, hbar=g.hbar)
    vals *= g.dp / (TWO_PI * g.hbar)
    return WaveField(g, vals, normalize=False)


def momentum_on_axis(psi: WaveField, axis: Axis) -> np.ndarray:
    """psit evaluated on an arbitrary uniform momentum axis (must lie
    within the conjugate Nyquist range of psi's grid)."""
    g = psi.grid
    p_lim = (g.n // 2) * g.dp
    if axis.start < -p_lim - 1e-9 or axis.stop > p_lim + 1e-9:
        raise ConfigurationError(
            f"momentum axis [{axis.start:g}, {axis.stop:g}] exceeds the "
            f"conjugate range [-{p_lim:g}, {p_lim:g}]"
        )
    return g.dq * fourier_sum(psi.values, g.q_min, g.dq, axis.start, axis.step,
                              axis.count, sign=-1, hbar=g.hbar)


def refine_twice(values: np.ndarray) -> np.ndarray:
    """Band-limited 2x upsampling by Fourier zero padding.

    Input samples at spacing d starting at x0 come back as 2n samples at
    spacing d/2 starting at x0 (periodic interpolation; fine for fields
    that decay at the edges, which the coverage guards enforce).
    """
    n = len(values)
    spec = np.fft.fft(values)
    half = n // 2
    out = np.zeros(2 * n, dtype=complex)
    out[:half] = spec[:half]
    out[half] = 0.5 * spec[half]
    out[2 * n - half] = 0.5 * spec[half]
    if half > 1:
        out[2 * n - half + 1:] = spec[half + 1:]
    return 2.0 * np.fft.ifft(out)
