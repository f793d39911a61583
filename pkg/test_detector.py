"""
Tests for entanglement detection, witnesses and parameter sweeps
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from posmaps.blockmat import block, block_matrix
from posmaps.chanmap import apply, family_map, linear_map
from posmaps.detector import apply_id_tensor, detect, evaluate_witness, grid, sweep, witness_from_map
from posmaps.errors import DimensionMismatch, MapIsCp, NotHermitianPreserving, ParamOutOfDomain
from posmaps.models import (
    CertifierConfig, MapFamily, MapFamilySpec, StateFamily, StateFamilySpec, SweepCheck,
)
from posmaps.numcore import kron, matrix_unit, random_psd
from posmaps.statezoo import flip, isotropic, max_ent_projector, werner


def _density(rng, dim):
    rho = random_psd(dim, rng)
    return rho / np.trace(rho).real


# ==================== DETECTION ====================
def test_apply_id_tensor_is_blockwise(rng, random_psd_block):
    rho = random_psd_block(2, 3)
    phi = linear_map(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)), 3, 2)
    out = apply_id_tensor(phi, rho)
    assert (out.m, out.n) == (2, 2)
    for i in range(2):
        for j in range(2):
            assert_allclose(block(out, i, j), apply(phi, block(rho, i, j)), atol=1e-12)


def test_apply_id_tensor_dimension_check():
    with pytest.raises(DimensionMismatch):
        apply_id_tensor(family_map("transpose", 3), werner(2, 0.5))


def test_transpose_detects_isotropic():
    report = detect(family_map("transpose", 3), isotropic(3, 0.3), state_id="iso")
    assert report.detected
    assert report.min_eig == pytest.approx(0.7 / 9 - 0.1, abs=1e-12)
    assert report.map_id == family_map("transpose", 3).label
    assert report.state_id == "iso"
    assert not detect(family_map("transpose", 3), isotropic(3, 0.2)).detected


def test_detection_is_backed_by_spectrum():
    phi = family_map("phi3", 3, x=-0.5)
    for rho in [werner(3, -0.8), isotropic(3, 0.9), werner(3, 0.4)]:
        report = detect(phi, rho)
        lam = np.linalg.eigvalsh(apply_id_tensor(phi, rho).full).min()
        assert report.detected == (lam < -report.threshold)
        if report.detected:
            assert lam < 0


@pytest.mark.parametrize("m", [2, 3])
def test_transpose_detection_flips_at_separability_edge(m):
    edge = 1 / (m + 1)
    transpose = family_map("transpose", m)
    for y in np.linspace(-1 / (m * m - 1), 1, 60):
        if abs(y - edge) < 1e-3:
            continue
        assert detect(transpose, isotropic(m, float(y))).detected == (y > edge)


# ==================== WITNESSES ====================
def test_transpose_witness_is_scaled_flip():
    W = witness_from_map(family_map("transpose", 3))
    assert_allclose(W.full, flip(3).full / 3, atol=1e-15)
    assert evaluate_witness(W, max_ent_projector(3)) == pytest.approx(1 / 3)
    assert evaluate_witness(W, werner(3, -0.5)) == pytest.approx(-0.5 / 3)


def test_witness_has_negative_eigenvalue():
    W = witness_from_map(family_map("phi4", 3, y=0.8))
    assert np.allclose(W.full, W.full.conj().T)
    assert np.linalg.eigvalsh(W.full).min() < 0


def test_cp_map_yields_no_witness():
    with pytest.raises(MapIsCp):
        witness_from_map(family_map("phi4", 3, y=0.2))


def test_non_hermitian_map_yields_no_witness():
    with pytest.raises(NotHermitianPreserving):
        witness_from_map(linear_map(kron(matrix_unit(0, 1, 2), np.eye(2)), 2, 2))


@pytest.mark.parametrize("name,dim,params", [
    ("phi4", 3, {"y": 0.8}), ("phi3", 3, {"x": -0.5}), ("phi1", 3, {"a": 4.5}), ("transpose", 2, {}),
])
def test_witness_nonnegative_on_product_states(rng, name, dim, params):
    W = witness_from_map(family_map(name, dim, **params))
    for _ in range(50):
        product = block_matrix(kron(_density(rng, dim), _density(rng, dim)), dim, dim)
        assert evaluate_witness(W, product) >= -1e-9


def test_evaluate_witness_dimension_check():
    W = witness_from_map(family_map("transpose", 3))
    with pytest.raises(DimensionMismatch):
        evaluate_witness(W, werner(2, 0.5))


# ==================== SWEEPS ====================
def test_grid():
    assert grid(0, 5.5, 0.5) == [0.5 * i for i in range(12)]
    values = grid(-0.6, 1.1, 0.1)
    assert len(values) == 18
    assert values[1] == -0.5 and values[-1] == 1.1
    with pytest.raises(ParamOutOfDomain):
        grid(0, 1, 0)
    with pytest.raises(ParamOutOfDomain):
        grid(1, 0, 0.1)


def test_phi1_sweep_thresholds(cfg):
    rows = sweep(MapFamilySpec(family=MapFamily.PHI1), "a", grid(0, 5.5, 0.5),
                 [SweepCheck.CP, SweepCheck.POSITIVE], cfg)
    assert [r.param_value for r in rows] == grid(0, 5.5, 0.5)
    for row in rows:
        a = row.param_value
        assert row.param_name == "a"
        assert row.cp == (1.0 <= a <= 4.0), a
        assert row.positive == (a <= 5.0), a
        assert row.ppt is None


def test_phi4_sweep_thresholds(cfg):
    rows = sweep(MapFamilySpec(family=MapFamily.PHI4, dim=3), "y", grid(-0.6, 1.1, 0.1),
                 ["cp", "positive"], cfg)
    for row in rows:
        y = row.param_value
        assert row.cp == (-0.5 <= y <= 0.2), y
        assert row.positive == (-0.5 <= y <= 1.0), y
        assert row.seesaw_min == pytest.approx(min(1 - y, 1 + 2 * y), abs=1e-7)


def test_horodecki_ppt_sweep():
    rows = sweep(StateFamilySpec(family=StateFamily.HORODECKI), "a", grid(0, 5, 0.25), ["ppt"])
    assert len(rows) == 21
    for row in rows:
        a = row.param_value
        assert row.ppt == (1.0 <= a <= 4.0), a
        if a not in (1.0, 4.0):
            assert (row.choi_min_eig < 0) == (not row.ppt)
        assert row.cp is None and row.seesaw_min is None


def test_sweep_is_independent_of_workers():
    spec = MapFamilySpec(family=MapFamily.PHI3, dim=3)
    values = grid(-1.5, 3.5, 0.5)
    serial = sweep(spec, "x", values, ["cp", "positive", "ppt"], CertifierConfig(restarts=8, workers=1))
    threaded = sweep(spec, "x", values, ["cp", "positive", "ppt"], CertifierConfig(restarts=8, workers=4))
    assert serial == threaded


def test_sweep_grid_errors():
    spec = MapFamilySpec(family=MapFamily.PHI4)
    with pytest.raises(ParamOutOfDomain):
        sweep(spec, "y", [], ["cp"])
    with pytest.raises(ParamOutOfDomain):
        sweep(spec, "y", [0.2, 0.1], ["cp"])
