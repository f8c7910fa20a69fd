"""QPSF container, CSV exports, PGM rendering, and contour extraction."""

import struct

import numpy as np
import pytest

from qpsf.errors import ValidationError
from qpsf.gridfile import (
    contour_levels,
    read_field_csv,
    read_qpsf,
    write_contour_csv,
    write_field_csv,
    write_marginals_csv,
    write_pgm,
    write_qpsf,
)
from qpsf.grids import PhaseGrid, PhaseField
from qpsf.distributions import kirkwood_rihaczek
from qpsf.states import CoherentParams, coherent_wave


@pytest.fixture(scope="module")
def field(ref_grid):
    return kirkwood_rihaczek(coherent_wave(CoherentParams(1), ref_grid))


@pytest.fixture(scope="module")
def alpha_field():
    grid = PhaseGrid.alpha_square(3.0, 21)
    vals = np.exp(-np.abs(grid.alphas()) ** 2) + 0.1j
    return PhaseField(grid, vals, "sigma-kr", param=1.0)


class TestQpsf:
    def test_round_trip_bit_exact(self, tmp_path, field):
        p1 = tmp_path / "a.qpsf"
        p2 = tmp_path / "b.qpsf"
        write_qpsf(p1, field)
        back = read_qpsf(p1)
        assert np.array_equal(back.values, field.values)
        assert back.tag == field.tag and back.param == field.param
        assert back.grid.q_axis == field.grid.q_axis
        assert back.grid.p_axis == field.grid.p_axis
        write_qpsf(p2, back)
        assert p1.read_bytes() == p2.read_bytes()

    def test_alpha_plane_round_trip(self, tmp_path, alpha_field):
        path = tmp_path / "alpha.qpsf"
        write_qpsf(path, alpha_field)
        back = read_qpsf(path)
        assert back.grid.plane == "alpha"
        assert back.param == 1.0
        assert np.array_equal(back.values, alpha_field.values)

    def test_header_layout(self, tmp_path, field):
        path = tmp_path / "h.qpsf"
        write_qpsf(path, field)
        blob = path.read_bytes()
        assert blob[:8] == b"QPSF0001"
        assert struct.unpack_from("<I", blob, 8)[0] == 0x01020304
        n, m = struct.unpack_from("<II", blob, 12)
        assert (n, m) == field.grid.shape
        assert len(blob) == 76 + n * m * 16

    def test_bad_magic_rejected(self, tmp_path, field):
        path = tmp_path / "bad.qpsf"
        write_qpsf(path, field)
        blob = bytearray(path.read_bytes())
        blob[:4] = b"XXXX"
        path.write_bytes(bytes(blob))
        with pytest.raises(ValidationError):
            read_qpsf(path)

    def test_truncated_payload_rejected(self, tmp_path, field):
        path = tmp_path / "cut.qpsf"
        write_qpsf(path, field)
        blob = path.read_bytes()
        path.write_bytes(blob[:-8])
        with pytest.raises(ValidationError):
            read_qpsf(path)


class TestCsv:
    def test_matches_qpsf_values(self, tmp_path, field):
        qp = tmp_path / "f.qpsf"
        cv = tmp_path / "f.csv"
        write_qpsf(qp, field)
        write_field_csv(cv, field)
        q, p, vals = read_field_csv(cv)
        stored = read_qpsf(qp)
        assert np.abs(vals - stored.values).max() == 0.0
        assert np.abs(q - field.grid.q).max() < 1e-12

    def test_marginals_csv(self, tmp_path, ref_grid, field):
        psi = coherent_wave(CoherentParams(1), ref_grid)
        path = tmp_path / "m.csv"
        write_marginals_csv(path, field, psi)
        lines = path.read_text().splitlines()
        assert lines[0] == "axis,coordinate,marginal,reference"
        assert len(lines) == 1 + field.grid.shape[0] + field.grid.shape[1]


class TestPgm:
    def test_header_and_sidecar(self, tmp_path, field):
        path = tmp_path / "f.pgm"
        write_pgm(path, field, "re")
        blob = path.read_bytes()
        n, m = field.grid.shape
        header = f"P5\n{n} {m}\n255\n".encode()
        assert blob[:len(header)] == header
        assert len(blob) == len(header) + n * m
        sidecar = (tmp_path / "f.pgm.range.txt").read_text()
        assert "min" in sidecar and "max" in sidecar

    def test_linear_scaling(self, tmp_path, alpha_field):
        path = tmp_path / "a.pgm"
        write_pgm(path, alpha_field, "abs")
        blob = path.read_bytes()
        data = np.frombuffer(blob.split(b"\n", 3)[3], dtype=np.uint8)
        assert data.min() == 0 and data.max() == 255


class TestContours:
    def test_levels_strictly_inside(self, alpha_field):
        levels = contour_levels(np.abs(alpha_field.values))
        data = np.abs(alpha_field.values)
        assert len(levels) == 9
        assert levels[0] > data.min() and levels[-1] < data.max()

    def test_csv_sanity(self, tmp_path, field):
        path = tmp_path / "c.csv"
        write_contour_csv(path, field, "re")
        lines = path.read_text().splitlines()
        assert lines[0] == "level_index,level,polyline,vertex,q,p"
        rows = np.array([ln.split(",") for ln in lines[1:]], dtype=object)
        levels = np.unique(rows[:, 0].astype(int))
        assert len(levels) == 9
        # vertices stay inside the grid window
        q = rows[:, 4].astype(float)
        p = rows[:, 5].astype(float)
        assert q.min() >= field.grid.q[0] - 1e-9
        assert q.max() <= field.grid.q[-1] + 1e-9
        assert p.min() >= field.grid.p[0] - 1e-9
        assert p.max() <= field.grid.p[-1] + 1e-9
