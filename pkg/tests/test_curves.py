"""Unit tests for the degeneracy and hyperbolic-boundary curves."""

import cmath
import math

import numpy as np
import pytest

from lagstab.curves import (
    CurvePoint,
    CurveTable,
    degeneracy_betas,
    forward_slope_at_origin,
    gamma_k,
    minus_one_curves,
    omega_fan,
    restricted_degeneracy_beta,
    slope_at_origin,
    write_curve_csv,
)
from lagstab.model import Params
from lagstab.spectral import assemble_A, morse_and_nullity

SLOPE = math.sqrt(33.0) / 4.0


def test_degeneracy_anchor_double_point():
    b1, b2 = degeneracy_betas(0.0, -1.0, n_modes=64)
    assert abs(b1 - 0.75) < 1e-6
    assert abs(b2 - 0.75) < 1e-6


def test_degeneracy_anchor_exact_decimals():
    omega = cmath.exp(2j * math.pi * 0.4)
    b1, b2 = degeneracy_betas(0.0, omega, n_modes=64)
    assert abs(b1 - 0.5376) < 1e-8
    assert abs(b2 - 0.9216) < 1e-8


def test_degeneracy_omega_one_convention():
    assert degeneracy_betas(0.3, 1.0) == (0.0, 0.0)


def test_degeneracy_certificate():
    omega = cmath.exp(2j * math.pi * 0.3)
    b1, b2 = degeneracy_betas(0.2, omega, n_modes=64)
    for beta in (b1, b2):
        assert morse_and_nullity(assemble_A(Params(beta, 0.2), omega, 64)).nullity >= 1
        for off in (-0.01, 0.01):
            spec = morse_and_nullity(assemble_A(Params(beta + off, 0.2), omega, 64))
            assert spec.nullity == 0


def test_restricted_roots_and_mirror():
    b, residual = restricted_degeneracy_beta(0.0, "E1", 64)
    assert abs(b - 0.75) < 1e-6
    assert residual < 1e-10
    b1, _ = restricted_degeneracy_beta(0.37, "E1", 64)
    b2, _ = restricted_degeneracy_beta(-0.37, "E2", 64)
    assert abs(b1 - b2) < 1e-8


def test_curve_table_sorting_enforced():
    pts = [
        CurvePoint(e=0.1, beta=1.0, omega=-1.0 + 0j, label="E1", residual=0.0),
        CurvePoint(e=0.0, beta=1.0, omega=-1.0 + 0j, label="E1", residual=0.0),
    ]
    with pytest.raises(ValueError):
        CurveTable(label="E1", points=tuple(pts), metadata={})


def test_minus_one_tables():
    tables = minus_one_curves(np.linspace(-0.4, 0.4, 5), n_modes=48)
    assert set(tables) == {"E1", "E2", "GAMMA_S", "GAMMA_M"}
    gs, gm = tables["GAMMA_S"], tables["GAMMA_M"]
    for p_s, p_m in zip(gs.points, gm.points):
        assert p_s.beta <= p_m.beta
        assert p_s.e == p_m.e
    # both envelopes pass through the corner (3/4, 0)
    mid = len(gs.points) // 2
    assert gs.points[mid].e == 0.0
    assert abs(gs.points[mid].beta - 0.75) < 1e-6
    assert abs(gm.points[mid].beta - 0.75) < 1e-6
    assert gs.metadata["n_modes"] == 48
    # monotone ordering of e and the min/max relation to the branches
    e1b = {p.e: p.beta for p in tables["E1"].points}
    e2b = {p.e: p.beta for p in tables["E2"].points}
    for p in gs.points:
        assert p.beta == pytest.approx(min(e1b[p.e], e2b[p.e]))


def test_gamma_k_anchor_and_bracket():
    point = gamma_k(0.0, n_modes=48)
    assert abs(point.beta - 1.0) < 1e-5
    assert point.label == "GAMMA_K"
    assert point.omega is None
    assert point.residual <= 5e-7
    detail = dict(point.detail)
    assert detail["class_lo"] == "EE"
    assert detail["class_hi"] in ("CS", "HH")


def test_slopes():
    assert abs(slope_at_origin("E1", h=0.02, n_modes=48) + SLOPE) < 1e-2
    assert abs(slope_at_origin("E2", h=0.02, n_modes=48) - SLOPE) < 1e-2
    assert abs(slope_at_origin("GAMMA_S", h=0.02, n_modes=48) + SLOPE) < 1e-2
    assert abs(slope_at_origin("GAMMA_M", h=0.02, n_modes=48) - SLOPE) < 1e-2
    assert abs(forward_slope_at_origin("GAMMA_S", h=0.02, n_modes=48) + SLOPE) < 5e-2
    assert abs(slope_at_origin("BETA1", h=0.02, omega=1j, n_modes=48)) < 1e-2


def test_slope_validation():
    with pytest.raises(ValueError):
        slope_at_origin("E1", h=0.5)
    with pytest.raises(ValueError):
        slope_at_origin("E1", h=1e-5)
    with pytest.raises(ValueError):
        slope_at_origin("BETA1", h=0.01)  # omega required
    with pytest.raises(ValueError):
        slope_at_origin("NOPE", h=0.01)
    with pytest.raises(ValueError):
        forward_slope_at_origin("E1", h=0.01)


def test_omega_fan_evenness_and_labels():
    fan = omega_fan(np.linspace(-0.3, 0.3, 3), [2.0 * math.pi / 5.0], n_modes=48)
    assert [t.label for t in fan] == ["BETA1", "BETA2"]
    for table in fan:
        assert table.metadata["omega_theta"] == pytest.approx(2.0 * math.pi / 5.0)
        betas = table.betas()
        assert np.max(np.abs(betas - betas[::-1])) < 1e-8
        assert np.all((0.0 < betas) & (betas < 9.0))


def test_write_curve_csv(tmp_path):
    tables = minus_one_curves(np.linspace(-0.2, 0.2, 3), n_modes=48)
    dest = tmp_path / "curves.csv"
    write_curve_csv(str(dest), tables)
    rows = dest.read_text().strip().split("\n")
    assert rows[0] == "label,omega_theta,e,beta,residual,N"
    assert len(rows) == 1 + sum(len(t.points) for t in tables.values())
    assert rows[1].split(",")[0] in {"E1", "E2", "GAMMA_S", "GAMMA_M"}
