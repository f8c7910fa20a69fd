"""Free time evolution of wavefunctions and of anti-standard phase-space
fields, plus the residual check of the transport equation

    dK/dt + (p/m) dK/dq = (i hbar / 2m) d^2K/dq^2.

Both propagation paths are spectral and exact up to grid truncation; the
PDE above is verified as a residual property rather than time-stepped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, TruncationError
from .grids import (
    MomentumField,
    PhaseField,
    PhaseGrid,
    WaveField,
    forward_fourier,
    inverse_fourier,
)


@dataclass(frozen=True)
class FreeEvolutionParams:
    mass: float
    t: float

    def __post_init__(self):
        if self.mass <= 0 or not np.isfinite(self.mass):
            raise ConfigurationError(f"mass must be finite and positive, got {self.mass}")
        if not np.isfinite(self.t):
            raise ConfigurationError("time must be finite")


def evolve_wave(psi: WaveField, params: FreeEvolutionParams) -> WaveField:
    """Exact free propagation: multiply psit(p) by exp(-i p^2 t/(2 m hbar)).

    Unitary, momentum-distribution preserving; raises if the spread state
    reaches the grid edge.
    """
    g = psi.grid
    phi = forward_fourier(psi)
    kicked = phi.values * np.exp(-1j * g.p ** 2 * params.t / (2.0 * params.mass * g.hbar))
    out = inverse_fourier(MomentumField(g, kicked))
    _check_edges(out.values, "evolved wavefunction")
    return out


def _check_edges(values: np.ndarray, what: str, ratio: float = 1e-3):
    peak = np.abs(values).max()
    if peak == 0:
        return
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > ratio * peak:
        raise TruncationError(
            f"{what}: edge amplitude {edge / peak:.2e} of max; state left the grid"
        )


def _require_kr_tag(field: PhaseField):
    if field.tag == "kr":
        return
    if field.tag == "sigma-kr" and field.param is not None and abs(field.param - 1.0) < 1e-9:
        return
    raise DomainError(
        f"free-evolution transport applies to the anti-standard field only, got "
        f"tag={field.tag!r}, param={field.param}"
    )


def _q_wavenumbers(grid: PhaseGrid) -> np.ndarray:
    n = grid.q_axis.count
    return 2.0 * np.pi * np.fft.fftfreq(n, d=grid.q_axis.step)


def evolve_kr_field(k0: PhaseField, params: FreeEvolutionParams) -> PhaseField:
    """Propagate an anti-standard field with the closed-form solution
    operator exp[t(i hbar/(2m) d_q^2 - (p/m) d_q)], applied spectrally
    per momentum row."""
    _require_kr_tag(k0)
    if k0.grid.plane != "qp":
        raise DomainError("field evolution needs a qp-plane field")
    hbar = k0.grid.hbar
    k = _q_wavenumbers(k0.grid)
    p = k0.grid.p
    spect = np.fft.fft(k0.values, axis=0)
    factor = np.exp(params.t * (-1j * hbar * k[:, None] ** 2 / (2.0 * params.mass)
                                - 1j * k[:, None] * p[None, :] / params.mass))
    out = np.fft.ifft(spect * factor, axis=0)
    _guard_wraparound(k0.values, out)
    return PhaseField(k0.grid, out, k0.tag, param=k0.param)


def _guard_wraparound(before: np.ndarray, after: np.ndarray):
    peak = np.abs(after).max()
    if peak == 0:
        return
    edge_after = max(np.abs(after[0, :]).max(), np.abs(after[-1, :]).max())
    edge_before = max(np.abs(before[0, :]).max(), np.abs(before[-1, :]).max())
    peak_before = np.abs(before).max() or 1.0
    if edge_after / peak > max(1e-6, 10.0 * edge_before / peak_before):
        raise TruncationError(
            f"evolved field reaches the q edge at {edge_after / peak:.2e} of max; "
            "the boost term wrapped around the grid"
        )


def residual_of_pde(k_prev: PhaseField, k_now: PhaseField, k_next: PhaseField,
                    dt: float, params: FreeEvolutionParams) -> float:
    """Max-norm residual of the transport equation using a centered time
    difference between the three snapshots and spectral q derivatives of
    the middle one.  Decays as O(dt^2) for consistent snapshots."""
    for f in (k_prev, k_next):
        if f.grid != k_now.grid:
            raise ConfigurationError("PDE residual needs snapshots on one grid")
    if dt <= 0:
        raise ConfigurationError("dt must be positive")
    grid = k_now.grid
    hbar = grid.hbar
    k = _q_wavenumbers(grid)
    spect = np.fft.fft(k_now.values, axis=0)
    dq1 = np.fft.ifft(1j * k[:, None] * spect, axis=0)
    dq2 = np.fft.ifft(-(k[:, None] ** 2) * spect, axis=0)
    dt_term = (k_next.values - k_prev.values) / (2.0 * dt)
    residual = dt_term + (grid.p[None, :] / params.mass) * dq1 \
        - 1j * hbar / (2.0 * params.mass) * dq2
    return float(np.abs(residual).max())
