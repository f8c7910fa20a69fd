"""Command-line interface.

Subcommands: compute (phase-space field of a named state), evolve (free
evolution of the anti-standard field, two-path checked per frame),
reconstruct (density matrix from sigma=1 samples), render (PGM heatmap /
contour CSV / matplotlib PNG from a QPSF file).

Exit codes: 0 ok, 2 usage or configuration problem, 3 coverage or
truncation guard, 4 failed numerical checks.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, distributions, fock, gridfile, states
from .errors import (
    ConfigurationError,
    DomainError,
    QpsfError,
    TruncationError,
    ValidationError,
)
from .evolution import FreeEvolutionParams, evolve_kr_field, evolve_wave
from .grids import Axis, PhaseGrid, PositionGrid

CHECK_FAILED = 4

STATE_CHOICES = ("coherent", "fock", "cat", "plane-pair", "squeezed", "squeezed-cat")
DIST_CHOICES = ("wigner", "kr", "mh", "cohen", "sigma-kr", "s-ordered")


def _parse_kv(text: str) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise ConfigurationError(f"expected k=v in {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _as_complex(raw: str) -> complex:
    try:
        return complex(raw.replace(" ", ""))
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse complex number {raw!r}") from exc


def _as_float(raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse number {raw!r}") from exc


def _parse_grid_spec(text: str) -> dict:
    spec = _parse_kv(text)
    known = {"n", "m", "qmin", "qmax", "pmin", "pmax"}
    unknown = set(spec) - known
    if unknown:
        raise ConfigurationError(f"unknown grid keys {sorted(unknown)}")
    for key in ("n", "qmin", "qmax"):
        if key not in spec:
            raise ConfigurationError(f"grid spec needs {key}=")
    return spec


def _position_grid(spec: dict, hbar: float) -> PositionGrid:
    return PositionGrid.from_span(_as_float(spec["qmin"]), _as_float(spec["qmax"]),
                                  int(spec["n"]), hbar)


def _phase_grid(spec: dict, grid: PositionGrid) -> PhaseGrid:
    if "pmin" not in spec and "pmax" not in spec:
        return PhaseGrid.conjugate(grid)
    if "pmin" not in spec or "pmax" not in spec:
        raise ConfigurationError("give both pmin and pmax or neither")
    p_lo, p_hi = _as_float(spec["pmin"]), _as_float(spec["pmax"])
    if "m" in spec:
        m = int(spec["m"])
        if m < 2:
            raise ConfigurationError("m must be at least 2")
        return PhaseGrid(grid.q_axis, Axis(p_lo, (p_hi - p_lo) / (m - 1), m), grid.hbar)
    return PhaseGrid.with_p_window(grid, p_lo, p_hi)


def _alpha_grid(spec: dict) -> PhaseGrid:
    n = int(spec["n"])
    m = int(spec.get("m", n))
    re_lo, re_hi = _as_float(spec["qmin"]), _as_float(spec["qmax"])
    im_lo = _as_float(spec.get("pmin", spec["qmin"]))
    im_hi = _as_float(spec.get("pmax", spec["qmax"]))
    return PhaseGrid.alpha(re_lo, (re_hi - re_lo) / (n - 1), n,
                           im_lo, (im_hi - im_lo) / (m - 1), m)


def _build_wave(state: str, args: dict, grid: PositionGrid):
    if state == "coherent":
        return states.coherent_wave(states.CoherentParams(_as_complex(args["alpha0"])), grid)
    if state == "fock":
        return states.fock_wave(int(args["n"]), grid)
    if state == "cat":
        return states.cat_wave(states.CoherentParams(_as_complex(args["alpha0"])), grid)
    if state == "plane-pair":
        params = states.PlaneWavePairParams(
            _as_float(args["p1"]), _as_float(args["p2"]), _as_float(args["width"]))
        return states.plane_wave_pair(params, grid)
    if state == "squeezed":
        cp = states.CoherentParams(_as_complex(args.get("alpha0", "0")))
        sp = states.SqueezeParams(_as_float(args["xi"]), _as_float(args.get("phi", "0")))
        return states.squeezed_coherent_wave(cp, sp, grid)
    if state == "squeezed-cat":
        return states.squeezed_cat_wave(states.SqueezeParams(_as_float(args["xi"])), grid)
    raise ConfigurationError(f"unknown state {state!r}")


def _build_fock_vec(state: str, args: dict, dim: int) -> np.ndarray:
    if state == "coherent":
        return states.coherent_vec(_as_complex(args["alpha0"]), dim)
    if state == "fock":
        return states.fock_vec(int(args["n"]), dim)
    if state == "cat":
        return states.cat_vec(_as_complex(args["alpha0"]), dim)
    if state == "squeezed":
        sp = states.SqueezeParams(_as_float(args["xi"]), _as_float(args.get("phi", "0")))
        vec = fock.squeeze(sp, dim)[:, 0]
        alpha0 = _as_complex(args.get("alpha0", "0"))
        if alpha0 != 0:
            vec = fock.displacement(alpha0, dim) @ vec
        return vec
    if state == "squeezed-cat":
        sp = states.SqueezeParams(_as_float(args["xi"]), 0.0)
        sm = states.SqueezeParams(_as_float(args["xi"]), np.pi)
        vec = fock.squeeze(sp, dim)[:, 0] + fock.squeeze(sm, dim)[:, 0]
        return vec / np.linalg.norm(vec)
    raise ConfigurationError(f"state {state!r} has no Fock-basis construction")


def _parse_truth(text: str):
    if ":" in text:
        kind, rest = text.split(":", 1)
    else:
        kind, rest = text, ""
    kind = kind.strip()
    if kind not in STATE_CHOICES:
        raise ConfigurationError(f"unknown truth state {kind!r}")
    return kind, _parse_kv(rest)


def _cmd_compute(ns) -> int:
    state_args = _parse_kv(ns.state_args or "")
    spec = _parse_grid_spec(ns.grid)

    if ns.plane == "alpha":
        if ns.dim is None:
            raise ConfigurationError("--plane alpha needs --dim")
        agrid = _alpha_grid(spec)
        rho = states.pure_density(_build_fock_vec(ns.state, state_args, ns.dim))
        if ns.dist == "sigma-kr":
            fld = fock.generalized_kr(rho, agrid, ns.sigma)
        elif ns.dist == "kr":
            fld = fock.generalized_kr(rho, agrid, 1.0)
        elif ns.dist == "wigner":
            fld = fock.generalized_kr(rho, agrid, 0.0)
        elif ns.dist == "s-ordered":
            fld = fock.s_ordered(rho, agrid, ns.s)
        else:
            raise ConfigurationError(
                f"--plane alpha supports dists sigma-kr, kr, wigner, s-ordered; "
                f"got {ns.dist!r}"
            )
        psi = None
    else:
        grid = _position_grid(spec, ns.hbar)
        pgrid = _phase_grid(spec, grid)
        psi = _build_wave(ns.state, state_args, grid)
        if ns.dist == "wigner":
            fld = distributions.wigner(psi, pgrid)
        elif ns.dist == "kr":
            fld = distributions.kirkwood_rihaczek(psi, pgrid)
        elif ns.dist == "mh":
            fld = distributions.margenau_hill(psi, pgrid)
        elif ns.dist == "sigma-kr":
            fld = distributions.sigma_kr(psi, ns.sigma, pgrid)
        elif ns.dist == "cohen":
            kernel = {
                "unit": distributions.unit_kernel,
                "kr": distributions.kr_kernel,
                "mh": distributions.mh_kernel,
            }.get(ns.kernel)
            if kernel is None and ns.kernel == "sigma":
                fld = distributions.cohen(psi, distributions.sigma_kernel(ns.sigma), pgrid)
            elif kernel is None:
                raise ConfigurationError(f"unknown kernel {ns.kernel!r}")
            else:
                fld = distributions.cohen(psi, kernel(), pgrid)
        else:
            raise ConfigurationError("s-ordered fields live on the alpha plane: "
                                     "use --plane alpha")

    gridfile.write_qpsf(ns.out, fld)
    if ns.csv:
        gridfile.write_field_csv(ns.csv, fld)
    if ns.marginals:
        if psi is None:
            raise ConfigurationError("--marginals needs a qp-plane computation")
        gridfile.write_marginals_csv(ns.marginals, fld, psi)
    if ns.png:
        gridfile.render_png(ns.png, fld, "re")

    if ns.check:
        reports = []
        if psi is not None:
            reports += diagnostics.check_marginals(fld, psi)
            reports.append(diagnostics.check_reality_wigner(fld))
            if fld.tag == "kr":
                reports += diagnostics.check_kr_identities(psi, fld.grid)
        else:
            reports.append(diagnostics.check_normalization(fld, tol=1e-4))
        print(diagnostics.format_reports(reports))
        if not diagnostics.all_passed(reports):
            return CHECK_FAILED
    return 0


def _cmd_evolve(ns) -> int:
    if ns.frames < 1:
        raise ConfigurationError("--frames must be >= 1")
    state_args = _parse_kv(ns.state_args or "")
    spec = _parse_grid_spec(ns.grid)
    grid = _position_grid(spec, ns.hbar)
    pgrid = _phase_grid(spec, grid)
    psi = _build_wave(ns.state, state_args, grid)
    k0 = distributions.kirkwood_rihaczek(psi, pgrid)
    times = np.linspace(0.0, ns.t, ns.frames) if ns.frames > 1 else np.array([ns.t])
    out_dir = Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ok = True
    for idx, t in enumerate(times):
        params = FreeEvolutionParams(ns.mass, float(t))
        frame = evolve_kr_field(k0, params) if t else k0
        psi_t = evolve_wave(psi, params) if t else psi
        schro = distributions.kirkwood_rihaczek(psi_t, pgrid)
        dev = float(np.abs(frame.values - schro.values).max())
        reports = diagnostics.check_marginals(frame, psi_t)
        ok = ok and diagnostics.all_passed(reports) and dev < 1e-6
        gridfile.write_qpsf(out_dir / f"frame_{idx:03d}.qpsf", frame)
        status = "PASS" if diagnostics.all_passed(reports) else "FAIL"
        print(f"frame {idx:03d} t={t:.6g} two-path-dev={dev:.3e} marginals {status}")
    return 0 if ok else CHECK_FAILED


def _cmd_reconstruct(ns) -> int:
    fld = gridfile.read_qpsf(ns.infile)
    if fld.grid.plane != "alpha" or fld.tag not in ("kr", "sigma-kr") \
            or fld.param is None or abs(fld.param - 1.0) > 1e-9:
        raise ConfigurationError(
            "reconstruction input must be a sigma=1 anti-standard field on an "
            f"alpha-plane grid (got tag={fld.tag!r}, param={fld.param}, "
            f"plane={fld.grid.plane!r})"
        )
    rho = fock.reconstruct(fld, ns.dim, boundary_tol=ns.boundary_tol)
    reach = float(np.abs(fld.grid.alphas()).max() ** 2)
    if reach > ns.dim * (1.0 + 1e-9):
        print(f"warning: grid reaches |alpha|^2 = {reach:.1f} beyond the "
              f"truncation budget --dim {ns.dim}; fidelity degrades", file=sys.stderr)
    with open(ns.out, "w") as fh:
        for row in rho:
            fh.write(",".join(f"{z.real:.17g},{z.imag:.17g}" for z in row) + "\n")
    if ns.truth:
        kind, args = _parse_truth(ns.truth)
        vec = _build_fock_vec(kind, args, ns.dim)
        print(f"fidelity={fock.fidelity(rho, vec):.6f}")
    return 0


def _cmd_render(ns) -> int:
    fld = gridfile.read_qpsf(ns.infile)
    if ns.mode == "heatmap":
        gridfile.write_pgm(ns.out, fld, ns.part)
    elif ns.mode == "contour-data":
        gridfile.write_contour_csv(ns.out, fld, ns.part, ns.levels)
    else:
        raise ConfigurationError(f"unknown mode {ns.mode!r}")
    if ns.png:
        gridfile.render_png(ns.png, fld, ns.part,
                            "heatmap" if ns.mode == "heatmap" else "contour")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpsf",
        description="Phase-space quasi-distributions: compute, evolve, "
                    "reconstruct, render.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    comp = sub.add_parser("compute", help="compute a phase-space field")
    comp.add_argument("--state", required=True, choices=STATE_CHOICES)
    comp.add_argument("--state-args", default="", help="k=v,... state parameters")
    comp.add_argument("--dist", required=True, choices=DIST_CHOICES)
    comp.add_argument("--sigma", type=float, default=1.0,
                      help="ordering parameter for sigma-kr / cohen --kernel sigma")
    comp.add_argument("--s", type=float, default=0.0, dest="s",
                      help="Cahill-Glauber parameter for s-ordered (s < 1)")
    comp.add_argument("--kernel", default="unit",
                      help="cohen kernel: unit, kr, mh, or sigma")
    comp.add_argument("--grid", required=True,
                      help="n=..,qmin=..,qmax=..[,pmin=..,pmax=..][,m=..]")
    comp.add_argument("--hbar", type=float, default=1.0)
    comp.add_argument("--plane", choices=("qp", "alpha"), default="qp")
    comp.add_argument("--dim", type=int, default=None,
                      help="Fock truncation (alpha plane)")
    comp.add_argument("--out", required=True, help="QPSF output path")
    comp.add_argument("--csv", default=None, help="field CSV output path")
    comp.add_argument("--marginals", default=None, help="marginal CSV output path")
    comp.add_argument("--png", default=None, help="matplotlib figure output path")
    comp.add_argument("--check", action="store_true",
                      help="run the diagnostics suite; nonzero exit on failure")
    comp.set_defaults(func=_cmd_compute)

    evo = sub.add_parser("evolve", help="free evolution of the anti-standard field")
    evo.add_argument("--state", required=True, choices=STATE_CHOICES)
    evo.add_argument("--state-args", default="")
    evo.add_argument("--t", type=float, required=True, help="final time")
    evo.add_argument("--mass", type=float, required=True)
    evo.add_argument("--frames", type=int, required=True)
    evo.add_argument("--grid", required=True)
    evo.add_argument("--hbar", type=float, default=1.0)
    evo.add_argument("--out-dir", required=True)
    evo.set_defaults(func=_cmd_evolve)

    rec = sub.add_parser("reconstruct", help="density matrix from sigma=1 samples")
    rec.add_argument("--in", dest="infile", required=True)
    rec.add_argument("--dim", type=int, required=True)
    rec.add_argument("--out", required=True, help="matrix CSV (row-major re,im pairs)")
    rec.add_argument("--truth", default=None, help="state spec kind:k=v,...")
    rec.add_argument("--boundary-tol", type=float, default=1e-6)
    rec.set_defaults(func=_cmd_reconstruct)

    ren = sub.add_parser("render", help="PGM heatmap or contour CSV from QPSF")
    ren.add_argument("--in", dest="infile", required=True)
    ren.add_argument("--part", required=True, choices=("re", "im", "abs"))
    ren.add_argument("--mode", required=True, choices=("heatmap", "contour-data"))
    ren.add_argument("--out", required=True)
    ren.add_argument("--levels", type=int, default=9)
    ren.add_argument("--png", default=None)
    ren.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except TruncationError as exc:
        print(f"truncation guard: {exc}", file=sys.stderr)
        return 3
    except (ConfigurationError, DomainError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QpsfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
