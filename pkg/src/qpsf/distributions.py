"""Wavefunction-side quasi-distributions: anti-standard (Kirkwood-Rihaczek),
Margenau-Hill, Wigner, the generic Cohen class, the sigma-ordered family,
the ambiguity function, and the marginal-product distribution.

All transforms are pure functions of immutable inputs.  Sign conventions
are pinned by two requirements checked in the tests: the unit kernel
reproduces the Wigner transform, and the kernel exp(-i p' q'/(2 hbar))
reproduces the anti-standard distribution exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, ValidationError
from .grids import (
    TWO_PI,
    Axis,
    PhaseField,
    PhaseGrid,
    WaveField,
    fourier_sum,
    momentum_on_axis,
    refine_twice,
)

_AXIS_TOL = 1e-12


@dataclass(frozen=True)
class CohenKernel:
    """Evaluable kernel Phi(q', p') of the Cohen class.

    The evaluator takes (qp, pp, hbar) broadcastable arrays and must
    satisfy Phi(q', 0) = 1 = Phi(0, p'); `validate` checks this on the
    axes of a given ambiguity grid.
    """

    evaluator: Callable[..., np.ndarray]
    name: str = "custom"

    def __call__(self, qp, pp, hbar: float = 1.0):
        return np.asarray(self.evaluator(np.asarray(qp), np.asarray(pp), hbar),
                          dtype=complex)

    def validate(self, qp_values: np.ndarray, pp_values: np.ndarray, hbar: float):
        on_q = self(qp_values, np.zeros_like(qp_values), hbar)
        on_p = self(np.zeros_like(pp_values), pp_values, hbar)
        dev = max(np.abs(on_q - 1.0).max(), np.abs(on_p - 1.0).max())
        if dev > _AXIS_TOL:
            raise ValidationError(
                f"kernel {self.name!r} violates Phi(q',0)=1=Phi(0,p') "
                f"on the grid axes (max deviation {dev:.2e})"
            )


def unit_kernel() -> CohenKernel:
    """Phi = 1: the Wigner member of the class."""
    return CohenKernel(lambda qp, pp, hbar: np.ones(np.broadcast(qp, pp).shape),
                       name="unit")


def kr_kernel() -> CohenKernel:
    """Phi = exp(-i p' q'/(2 hbar)): the anti-standard member."""
    return CohenKernel(lambda qp, pp, hbar: np.exp(-1j * pp * qp / (2.0 * hbar)),
                       name="kr")


def mh_kernel() -> CohenKernel:
    """Phi = cos(p' q'/(2 hbar)): the Margenau-Hill member."""
    return CohenKernel(
        lambda qp, pp, hbar: np.cos(pp * qp / (2.0 * hbar)).astype(complex),
        name="mh",
    )


def sigma_kernel(sigma: float) -> CohenKernel:
    """Phi_sigma = exp(-i sigma q' p'/(2 hbar)).

    sigma = 0 gives the unit (Wigner) kernel, sigma = 1 the anti-standard
    kernel; sigma may be any finite real number.
    """
    if not np.isfinite(sigma):
        raise ConfigurationError("sigma must be finite")
    return CohenKernel(
        lambda qp, pp, hbar: np.exp(-1j * sigma * qp * pp / (2.0 * hbar)),
        name=f"sigma={sigma:g}",
    )


class AmbiguityField:
    """A(q', p') on a PhaseGrid over the (q', p') plane.  For a normalized
    state A(0, 0) = 1."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: PhaseGrid, values):
        vals = np.array(values, dtype=complex)
        if vals.shape != grid.shape:
            raise ConfigurationError("ambiguity array does not match its grid")
        vals.flags.writeable = False
        self.grid = grid
        self.values = vals


def ambiguity_grid(grid) -> PhaseGrid:
    """Natural centered (q', p') lattice for a position grid: 2n points of
    spacing dq (shifts are supported out to the full grid span; correlation
    cross terms of well-separated superpositions live near q' = +-2 q0)
    times n points of spacing dp, centered on 0."""
    n = grid.n
    return PhaseGrid(
        Axis(-float(n) * grid.dq, grid.dq, 2 * n),
        Axis(-(n // 2) * grid.dp, grid.dp, n),
        grid.hbar,
    )


def _check_q_axis(psi: WaveField, grid: PhaseGrid):
    if grid.plane != "qp":
        raise ConfigurationError("wavefunction-side distributions need a qp-plane grid")
    if not grid.q_axis.matches(psi.grid.q_axis):
        raise ConfigurationError("phase grid must share the wavefunction q axis")
    if abs(grid.hbar - psi.grid.hbar) > 1e-12 * psi.grid.hbar:
        raise ConfigurationError("phase grid and wavefunction disagree on hbar")


def _check_p_range(psi: WaveField, axis: Axis):
    p_lim = (psi.grid.n // 2) * psi.grid.dp
    if axis.start < -p_lim - 1e-9 or axis.stop > p_lim + 1e-9:
        raise ConfigurationError(
            f"p axis [{axis.start:g}, {axis.stop:g}] outside the conjugate "
            f"range [-{p_lim:g}, {p_lim:g}]"
        )


def kirkwood_rihaczek(psi: WaveField, grid: PhaseGrid | None = None) -> PhaseField:
    """K(q, p) = (1/2 pi hbar) psi(q) exp(-i p q/hbar) conj(psit(p)).

    One momentum transform plus an O(n m) outer product; exact marginals
    by construction of the discrete transform pair.
    """
    if grid is None:
        grid = PhaseGrid.conjugate(psi.grid)
    _check_q_axis(psi, grid)
    _check_p_range(psi, grid.p_axis)
    hbar = psi.grid.hbar
    psit = momentum_on_axis(psi, grid.p_axis)
    q = grid.q
    p = grid.p
    vals = (psi.values[:, None] * np.conj(psit)[None, :]) \
        * np.exp(-1j * np.outer(q, p) / hbar) / (TWO_PI * hbar)
    return PhaseField(grid, vals, "kr", param=1.0)


def margenau_hill(psi: WaveField, grid: PhaseGrid | None = None) -> PhaseField:
    """Real part of the anti-standard distribution; identical marginals."""
    kr = kirkwood_rihaczek(psi, grid)
    return PhaseField(kr.grid, kr.values.real.astype(complex), "mh")


def product_distribution(psi: WaveField, grid: PhaseGrid | None = None) -> PhaseField:
    """P(q, p) = (1/2 pi hbar) |psi(q)|^2 |psit(p)|^2."""
    if grid is None:
        grid = PhaseGrid.conjugate(psi.grid)
    _check_q_axis(psi, grid)
    _check_p_range(psi, grid.p_axis)
    hbar = psi.grid.hbar
    psit = momentum_on_axis(psi, grid.p_axis)
    vals = np.outer(np.abs(psi.values) ** 2, np.abs(psit) ** 2) / (TWO_PI * hbar)
    return PhaseField(grid, vals.astype(complex), "product")


def _fine_correlation_rows(psi: WaveField):
    """Rows g_i[k] = conj(psi(q_i + k dq/2)) psi(q_i - k dq/2) for
    k = -n..n-1, built from the band-limited 2x refinement (zero outside
    the grid).  Returns (rows, k_values)."""
    n = psi.grid.n
    fine = refine_twice(psi.values)
    kk = np.arange(2 * n) - n
    plus = 2 * np.arange(n)[:, None] + kk[None, :]
    minus = 2 * np.arange(n)[:, None] - kk[None, :]
    valid = (plus >= 0) & (plus < 2 * n) & (minus >= 0) & (minus < 2 * n)
    rows = np.where(
        valid,
        np.conj(fine[np.clip(plus, 0, 2 * n - 1)]) * fine[np.clip(minus, 0, 2 * n - 1)],
        0.0,
    )
    return rows, kk


def wigner(psi: WaveField, grid: PhaseGrid | None = None) -> PhaseField:
    """W(q, p) = (1/2 pi hbar) int conj(psi(q+xi/2)) e^{i p xi/hbar}
    psi(q-xi/2) dxi, with the half-offset samples taken from a band-limited
    2x refinement and one transform per q row."""
    if grid is None:
        grid = PhaseGrid.conjugate(psi.grid)
    _check_q_axis(psi, grid)
    _check_p_range(psi, grid.p_axis)
    g = psi.grid
    rows, _ = _fine_correlation_rows(psi)
    vals = fourier_sum(rows, -g.n * g.dq, g.dq,
                       grid.p_axis.start, grid.p_axis.step, grid.p_axis.count,
                       sign=+1, hbar=g.hbar)
    vals *= g.dq / (TWO_PI * g.hbar)
    return PhaseField(grid, vals, "wigner", param=0.0)


def ambiguity(psi: WaveField, grid: PhaseGrid | None = None) -> AmbiguityField:
    """A(q', p') = int e^{-i p' xi/hbar} conj(psi(xi - q'/2))
    psi(xi + q'/2) dxi.

    The q' axis must consist of integer multiples of the grid spacing dq;
    the half-shifts then land on the band-limited 2x refinement.
    """
    if grid is None:
        grid = ambiguity_grid(psi.grid)
    if grid.plane != "qp":
        raise ConfigurationError("ambiguity grid must be a qp-plane grid")
    g = psi.grid
    n = g.n
    steps = grid.q / g.dq
    kappa = np.round(steps).astype(int)
    if np.abs(steps - kappa).max() > 1e-9:
        raise ConfigurationError("ambiguity q' axis must lie on the dq lattice")
    if np.abs(kappa).max() >= 2 * n:
        raise ConfigurationError("ambiguity q' axis exceeds twice the grid span")
    fine = refine_twice(psi.values)
    jj = np.arange(2 * n)
    lo = jj[None, :] - kappa[:, None]
    hi = jj[None, :] + kappa[:, None]
    valid = (lo >= 0) & (lo < 2 * n) & (hi >= 0) & (hi < 2 * n)
    prod = np.where(
        valid,
        np.conj(fine[np.clip(lo, 0, 2 * n - 1)]) * fine[np.clip(hi, 0, 2 * n - 1)],
        0.0,
    )
    h = g.dq / 2.0
    vals = h * fourier_sum(prod, g.q_min, h,
                           grid.p_axis.start, grid.p_axis.step, grid.p_axis.count,
                           sign=-1, hbar=g.hbar)
    return AmbiguityField(grid, vals)


def cohen(psi: WaveField, kernel: CohenKernel, grid: PhaseGrid | None = None,
          tag: str = "cohen", param: float | None = None) -> PhaseField:
    """P_Phi(q, p) = (1/(2 pi hbar)^2) double-Fourier of Phi * A with the
    e^{i(p' q - q' p)/hbar} kernel.

    The kernel is validated on the ambiguity-grid axes first; marginals
    are then guaranteed up to spectral truncation.
    """
    if grid is None:
        grid = PhaseGrid.conjugate(psi.grid)
    _check_q_axis(psi, grid)
    _check_p_range(psi, grid.p_axis)
    g = psi.grid
    agrid = ambiguity_grid(g)
    kernel.validate(agrid.q, agrid.p, g.hbar)
    amb = ambiguity(psi, agrid)
    shaped = kernel(agrid.q[:, None], agrid.p[None, :], g.hbar) * amb.values
    # p' -> q along the last axis, then q' -> p
    half = fourier_sum(shaped, agrid.p_axis.start, agrid.p_axis.step,
                       g.q_min, g.dq, g.n, sign=+1, hbar=g.hbar)
    full = fourier_sum(np.ascontiguousarray(half.T),
                       agrid.q_axis.start, agrid.q_axis.step,
                       grid.p_axis.start, grid.p_axis.step, grid.p_axis.count,
                       sign=-1, hbar=g.hbar)
    full *= agrid.cell / (TWO_PI * g.hbar) ** 2
    return PhaseField(grid, full, tag, param=param)


def sigma_kr(psi: WaveField, sigma: float, grid: PhaseGrid | None = None) -> PhaseField:
    """The sigma-ordered family via the Cohen transform: sigma=0 is the
    Wigner function, sigma=1 the anti-standard distribution."""
    return cohen(psi, sigma_kernel(sigma), grid, tag="sigma-kr", param=float(sigma))


def marginals(field: PhaseField) -> tuple[np.ndarray, np.ndarray]:
    """(sum over p * dp, sum over q * dq): the position and momentum
    marginals of a phase-space field."""
    dq = field.grid.q_axis.step
    dp = field.grid.p_axis.step
    return field.values.sum(axis=1) * dp, field.values.sum(axis=0) * dq
