"""File formats: the QPSF binary grid container, CSV exports, PGM
heatmaps with sidecar scaling records, contour polyline extraction, and
optional matplotlib figure rendering.

QPSF layout (little-endian throughout):

    offset  size  field
    0       8     magic "QPSF0001"
    8       4     endianness marker 0x01020304 (uint32, little-endian)
    12      4     n (axis-0 sample count, uint32)
    16      4     m (axis-1 sample count, uint32)
    20      8x5   q_min, dq, p_min, dp, hbar (float64)
    60      16    tag, null-padded ASCII
    76      n*m*16  payload: row-major (axis-0 major) interleaved
                    re/im float64 pairs

For alpha-plane fields axis 0 is Re(alpha) and axis 1 is Im(alpha); the
tag then carries the ";a" flag.  Tag grammar: short kind code, optional
";<param>" with 6 significant digits, optional ";a", e.g. "skr;1;a".
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ValidationError
from .grids import Axis, PhaseField, PhaseGrid

MAGIC = b"QPSF0001"
ENDIAN_MARKER = 0x01020304
_HEADER = struct.Struct("<8sIII5d16s")

_KIND_TO_CODE = {
    "wigner": "wig",
    "kr": "kr",
    "mh": "mh",
    "cohen": "coh",
    "sigma-kr": "skr",
    "s-ordered": "sord",
    "product": "prod",
    "omega": "omg",
}
_CODE_TO_KIND = {v: k for k, v in _KIND_TO_CODE.items()}


def _encode_tag(field: PhaseField) -> bytes:
    parts = [_KIND_TO_CODE[field.tag]]
    if field.param is not None:
        parts.append(f"{field.param:.6g}")
    if field.grid.plane == "alpha":
        parts.append("a")
    raw = ";".join(parts).encode("ascii")
    if len(raw) > 16:
        raise ConfigurationError(f"tag {raw!r} exceeds the 16-byte field")
    return raw.ljust(16, b"\x00")


def _decode_tag(raw: bytes):
    text = raw.rstrip(b"\x00").decode("ascii")
    parts = text.split(";")
    kind = _CODE_TO_KIND.get(parts[0])
    if kind is None:
        raise ValidationError(f"unknown distribution code {parts[0]!r} in tag")
    plane = "alpha" if parts and parts[-1] == "a" else "qp"
    mid = parts[1:-1] if plane == "alpha" else parts[1:]
    param = float(mid[0]) if mid else None
    return kind, param, plane


def write_qpsf(path, field: PhaseField):
    grid = field.grid
    n, m = grid.shape
    header = _HEADER.pack(
        MAGIC, ENDIAN_MARKER, n, m,
        grid.q_axis.start, grid.q_axis.step,
        grid.p_axis.start, grid.p_axis.step,
        grid.hbar, _encode_tag(field),
    )
    payload = np.empty((n, m, 2), dtype="<f8")
    payload[..., 0] = field.values.real
    payload[..., 1] = field.values.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_qpsf(path) -> PhaseField:
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise ValidationError(f"{path}: too short for a QPSF header")
    magic, marker, n, m, q_min, dq, p_min, dp, hbar, tag = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ValidationError(f"{path}: bad magic {magic!r}")
    if marker != ENDIAN_MARKER:
        raise ValidationError(f"{path}: endianness marker mismatch ({marker:#x})")
    expected = _HEADER.size + n * m * 16
    if len(blob) != expected:
        raise ValidationError(f"{path}: file length {len(blob)} != expected {expected}")
    kind, param, plane = _decode_tag(tag)
    raw = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).reshape(n, m, 2)
    values = raw[..., 0] + 1j * raw[..., 1]
    grid = PhaseGrid(Axis(q_min, dq, n), Axis(p_min, dp, m), hbar, plane)
    return PhaseField(grid, values, kind, param=param)


def write_field_csv(path, field: PhaseField):
    """Headered columns q,p,re,im (for alpha-plane fields q = Re alpha and
    p = Im alpha), one row per grid node, 17 significant digits."""
    q = field.grid.q
    p = field.grid.p
    with open(path, "w") as fh:
        fh.write("q,p,re,im\n")
        for i, qi in enumerate(q):
            row = field.values[i]
            for j, pj in enumerate(p):
                fh.write(f"{qi:.17g},{pj:.17g},{row[j].real:.17g},{row[j].imag:.17g}\n")


def read_field_csv(path):
    """Returns (q_values, p_values, complex values[n, m]) from a field CSV."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    q = np.unique(data[:, 0])
    p = np.unique(data[:, 1])
    vals = (data[:, 2] + 1j * data[:, 3]).reshape(q.size, p.size)
    return q, p, vals


def write_marginals_csv(path, field: PhaseField, psi=None):
    """Long-format CSV axis,coordinate,marginal[,reference]; the reference
    columns hold |psi|^2 and |psit|^2/(2 pi hbar) when psi is given."""
    from .distributions import marginals
    from .grids import TWO_PI, momentum_on_axis

    m_q, m_p = marginals(field)
    ref_q = ref_p = None
    if psi is not None:
        ref_q = psi.position_density()
        psit = momentum_on_axis(psi, field.grid.p_axis)
        ref_p = np.abs(psit) ** 2 / (TWO_PI * psi.grid.hbar)
    with open(path, "w") as fh:
        fh.write("axis,coordinate,marginal,reference\n")
        for arr, coords, ref, label in ((m_q, field.grid.q, ref_q, "q"),
                                        (m_p, field.grid.p, ref_p, "p")):
            for k, c in enumerate(coords):
                r = "" if ref is None else f"{ref[k]:.17g}"
                fh.write(f"{label},{c:.17g},{arr[k].real:.17g},{r}\n")


def field_part(field: PhaseField, part: str) -> np.ndarray:
    if part == "re":
        return field.values.real
    if part == "im":
        return field.values.imag
    if part == "abs":
        return np.abs(field.values)
    raise ConfigurationError(f"unknown part {part!r} (want re, im, or abs)")


def write_pgm(path, field: PhaseField, part: str):
    """8-bit binary PGM (P5) with rows running from p max down to p min
    and columns from q min to q max; the linear [min,max] -> [0,255] map
    is recorded in a '<path>.range.txt' sidecar."""
    data = field_part(field, part)
    lo, hi = float(data.min()), float(data.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    img = np.round((data - lo) * scale).astype(np.uint8)
    img = img.T[::-1, :]          # p vertical (up), q horizontal
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
    sidecar = str(path) + ".range.txt"
    g = field.grid
    with open(sidecar, "w") as fh:
        fh.write(f"part {part}\nmin {lo:.17g}\nmax {hi:.17g}\n"
                 f"q {g.q_axis.start:.17g} {g.q_axis.step:.17g} {g.q_axis.count}\n"
                 f"p {g.p_axis.start:.17g} {g.p_axis.step:.17g} {g.p_axis.count}\n")


def contour_levels(data: np.ndarray, count: int = 9) -> np.ndarray:
    """count levels evenly spaced strictly inside [min, max]."""
    lo, hi = float(data.min()), float(data.max())
    return np.linspace(lo, hi, count + 2)[1:-1]


def write_contour_csv(path, field: PhaseField, part: str, count: int = 9):
    """Iso-level polylines as CSV rows level_index,level,polyline,vertex,q,p."""
    import contourpy

    data = field_part(field, part)
    gen = contourpy.contour_generator(
        x=field.grid.q, y=field.grid.p, z=data.T,
        line_type=contourpy.LineType.Separate,
    )
    with open(path, "w") as fh:
        fh.write("level_index,level,polyline,vertex,q,p\n")
        for li, level in enumerate(contour_levels(data, count)):
            for pi, line in enumerate(gen.lines(level)):
                for vi, (x, y) in enumerate(line):
                    fh.write(f"{li},{level:.17g},{pi},{vi},{x:.17g},{y:.17g}\n")


def render_png(path, field: PhaseField, part: str, mode: str = "heatmap"):
    """Matplotlib rendering of the field to a PNG next to the delimited
    outputs (heatmap or contour view)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = field_part(field, part)
    g = field.grid
    xlabel, ylabel = ("q", "p") if g.plane == "qp" else (r"Re $\alpha$", r"Im $\alpha$")
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    if mode == "heatmap":
        im = ax.imshow(
            data.T, origin="lower", aspect="auto", cmap="RdBu_r",
            extent=(g.q_axis.start, g.q_axis.stop, g.p_axis.start, g.p_axis.stop),
        )
        fig.colorbar(im, ax=ax)
    else:
        cs = ax.contour(g.q, g.p, data.T, levels=contour_levels(data), cmap="RdBu_r")
        fig.colorbar(cs, ax=ax)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(f"{field.tag} ({part})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
