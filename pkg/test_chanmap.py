"""
Tests for Choi-canonical maps and the named families
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from posmaps.blockmat import partial_transpose
from posmaps.chanmap import (
    apply, choi_eigenvalues, choi_from_function, compose_with_transpose, family_map, from_kraus,
    is_completely_positive, is_hermiticity_preserving, is_trace_preserving, linear_map,
    make_family, map_distance, normalize_tp, params_dict, parse_map_family,
)
from posmaps.errors import (
    DimensionMismatch, MissingParam, NotTp, ParamOutOfDomain, ShapeMismatch, UnknownFamily,
)
from posmaps.models import MapFamily, MapFamilySpec
from posmaps.numcore import matrix_unit, random_unitary
from posmaps.statezoo import max_ent_projector


def _random_matrix(rng, dim):
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


# ==================== APPLY ====================
def test_apply_phi3_on_matrix_unit():
    phi = family_map("phi3", 3, x=-1)
    assert_allclose(apply(phi, matrix_unit(0, 0, 3)), np.diag([0, 4, 4]), atol=1e-12)


def test_apply_transpose_family(rng):
    X = _random_matrix(rng, 3)
    assert_allclose(apply(family_map("transpose", 3), X), X.T)


def test_apply_phi4_at_zero_is_trace(rng):
    X = _random_matrix(rng, 3)
    assert_allclose(apply(family_map("phi4", 3, y=0), X), np.trace(X) * np.eye(3), atol=1e-12)


def test_apply_returns_choi_blocks(rng):
    phi = linear_map(_random_matrix(rng, 6), 2, 3)
    T = phi.choi.tensor()
    for i in range(2):
        for j in range(2):
            assert_allclose(apply(phi, matrix_unit(i, j, 2)), T[i, :, j, :])


def test_apply_dimension_check():
    with pytest.raises(DimensionMismatch):
        apply(family_map("transpose", 3), np.eye(2))


def test_choi_round_trip(rng):
    phi = family_map("phi1", 3, a=2.5)
    rebuilt = choi_from_function(lambda X: apply(phi, X), 3)
    assert_allclose(rebuilt.choi.full, phi.choi.full, rtol=0, atol=0)


# ==================== KRAUS ====================
def test_unitary_kraus_channel(rng):
    phi = from_kraus([random_unitary(3, rng)])
    assert np.sum(choi_eigenvalues(phi) > 1e-9) == 1
    assert is_trace_preserving(phi)
    assert is_completely_positive(phi)


def test_dephasing_kraus_channel():
    phi = from_kraus([matrix_unit(0, 0, 2), matrix_unit(1, 1, 2)])
    C = phi.choi.full
    assert_allclose(C, np.diag(np.diag(C)))
    assert is_trace_preserving(phi)


def test_isometric_kraus_pair(rng):
    V, _ = np.linalg.qr(_random_matrix(rng, 6)[:, :3])
    phi = from_kraus([V[:3, :], V[3:, :]])
    assert is_completely_positive(phi)
    assert is_trace_preserving(phi)
    assert is_hermiticity_preserving(phi)


def test_random_kraus_always_cp(rng):
    for _ in range(10):
        ops = [rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2)) for _ in range(3)]
        assert is_completely_positive(from_kraus(ops), 1e-12)


def test_kraus_shape_errors():
    with pytest.raises(ShapeMismatch):
        from_kraus([])
    with pytest.raises(ShapeMismatch):
        from_kraus([np.eye(2), np.eye(3)])


# ==================== PROPERTY TESTS ====================
@pytest.mark.parametrize("family", ["phi1", "phi2"])
@pytest.mark.parametrize("a,cp", [(1.1, True), (2.1, True), (3.0, True), (3.9, True), (0.9, False), (4.1, False)])
def test_phi1_phi2_complete_positivity(family, a, cp):
    assert is_completely_positive(family_map(family, 3, a=a)) == cp


@pytest.mark.parametrize("x,cp", [(0.1, True), (2.9, True), (-0.1, False), (3.1, False)])
def test_phi3_complete_positivity(x, cp):
    assert is_completely_positive(family_map("phi3", 3, x=x)) == cp


@pytest.mark.parametrize("m", [2, 3])
def test_phi4_complete_positivity_thresholds(m):
    upper, lower = 1 / (m + 1), -1 / (m - 1)
    assert is_completely_positive(family_map("phi4", m, y=upper - 0.05))
    assert not is_completely_positive(family_map("phi4", m, y=upper + 0.05))
    assert is_completely_positive(family_map("phi4", m, y=lower + 0.05))
    assert not is_completely_positive(family_map("phi4", m, y=lower - 0.05))


def test_phi4_examples():
    assert is_completely_positive(family_map("phi4", 3, y=0.2))
    assert not is_completely_positive(family_map("phi4", 3, y=0.3))


def test_trace_preservation():
    assert is_trace_preserving(family_map("transpose", 3))
    phi3 = family_map("phi3", 3, x=0.5)
    assert not is_trace_preserving(phi3)
    normalized = normalize_tp(phi3)
    assert is_trace_preserving(normalized)
    assert map_distance(normalized, family_map("phi3", 3, x=0.5)) > 0
    assert_allclose(normalized.choi.full * 8, phi3.choi.full, atol=1e-12)


def test_normalize_tp_rejects_non_constant_trace():
    phi = linear_map(np.diag([1.0, 0, 0, 2.0]), 2, 2)
    with pytest.raises(NotTp):
        normalize_tp(phi)


def test_hermiticity_preservation():
    bad = linear_map(np.kron(matrix_unit(0, 1, 2), np.eye(2)), 2, 2)
    assert not is_hermiticity_preserving(bad)
    for name, params in [("phi1", {"a": 4.7}), ("phi2", {"a": -1.0}), ("phi3", {"x": 1.3}),
                         ("phi4", {"y": -0.4}), ("reduction", {}), ("transpose", {})]:
        assert is_hermiticity_preserving(family_map(name, 3, **params))


def test_non_hermitian_choi_is_not_completely_positive():
    bad = linear_map(np.kron(matrix_unit(0, 1, 2), np.eye(2)), 2, 2)
    assert is_completely_positive(bad) is False
    assert is_completely_positive(bad, 1e-3) is False


# ==================== TRANSPOSE COMPOSITION ====================
def test_transpose_composed_with_transpose_is_identity(rng):
    phi = compose_with_transpose(family_map("transpose", 3))
    assert_allclose(phi.choi.full, 3 * max_ent_projector(3).full, atol=1e-14)
    X = _random_matrix(rng, 3)
    assert_allclose(apply(phi, X), X, atol=1e-14)


def test_phi4_composed_with_transpose(rng):
    m, y = 3, 0.6
    phi = compose_with_transpose(family_map("phi4", m, y=y))
    X = _random_matrix(rng, m)
    assert_allclose(apply(phi, X), m * y * X + (1 - y) * np.trace(X) * np.eye(m), atol=1e-12)


def test_compose_with_transpose_choi_identity(rng):
    phi = linear_map(_random_matrix(rng, 6), 2, 3)
    composed = compose_with_transpose(phi)
    assert_allclose(composed.choi.full, partial_transpose(phi.choi, 1).full, atol=1e-14)
    assert_allclose(compose_with_transpose(composed).choi.full, phi.choi.full, atol=1e-14)


# ==================== FAMILIES ====================
@pytest.mark.parametrize("m", [2, 3, 4])
def test_phi3_at_minus_one_is_scaled_reduction(rng, m):
    X = _random_matrix(rng, m)
    expected = (m + 1) * (np.trace(X) * np.eye(m) - X)
    assert_allclose(apply(family_map("phi3", m, x=-1), X), expected, atol=1e-12)
    reduction = family_map("reduction", m)
    assert_allclose(family_map("phi3", m, x=-1).choi.full, (m + 1) * reduction.choi.full, atol=1e-12)


def test_phi4_at_one_is_scaled_transpose(rng):
    X = _random_matrix(rng, 3)
    assert_allclose(apply(family_map("phi4", 3, y=1), X), 3 * X.T, atol=1e-12)


def test_phi4_at_lower_bound_is_reduced_transpose(rng):
    m = 3
    X = _random_matrix(rng, m)
    out = apply(family_map("phi4", m, y=1 / (1 - m)), X)
    assert_allclose(out, m / (m - 1) * (np.trace(X) * np.eye(m) - X.T), atol=1e-12)


def test_phi2_is_phi1_with_mirrored_parameter():
    assert map_distance(family_map("phi2", 3, a=1.7), family_map("phi1", 3, a=3.3)) <= 1e-12


def test_phi1_trace_scale():
    phi = family_map("phi1", 3, a=2.0)
    assert_allclose(np.trace(apply(phi, matrix_unit(0, 0, 3))), 7)


def test_trace_sigma_family(rng):
    X = _random_matrix(rng, 2)
    uniform = family_map("trace_sigma", 2)
    assert_allclose(apply(uniform, X), np.trace(X) * np.eye(2) / 2, atol=1e-12)
    weighted = family_map("trace_sigma", 2, w1=1, w2=3)
    assert_allclose(apply(weighted, X), np.trace(X) * np.diag([0.25, 0.75]), atol=1e-12)
    assert is_trace_preserving(weighted)
    with pytest.raises(ParamOutOfDomain):
        family_map("trace_sigma", 2, w1=-1, w2=3)


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("y", [-0.3, 0.1, 0.7])
def test_phi4_choi_spectrum(m, y):
    eigs = choi_eigenvalues(family_map("phi4", m, y=y))
    assert abs(eigs.min() - min(1 - (m + 1) * y, 1 + (m - 1) * y)) <= 1e-10
    assert abs(eigs.max() - max(1 - (m + 1) * y, 1 + (m - 1) * y)) <= 1e-10


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("x", [-0.5, 0.4, 2.0])
def test_phi3_choi_spectrum(m, x):
    eigs = np.sort(choi_eigenvalues(family_map("phi3", m, x=x)))
    expected = np.sort([m - x] * (m * m - 1) + [x * (m * m - 1)])
    assert_allclose(eigs, expected, atol=1e-10)


def test_family_errors():
    with pytest.raises(MissingParam):
        make_family(MapFamilySpec(family=MapFamily.PHI3, dim=3))
    with pytest.raises(ParamOutOfDomain):
        family_map("phi1", 4, a=2.0)
    with pytest.raises(ParamOutOfDomain):
        family_map("phi3", 3, y=2.0)
    with pytest.raises(UnknownFamily):
        parse_map_family("phi9")
    with pytest.raises(ValidationError):
        MapFamilySpec(family="PHI9")
    with pytest.raises(ValidationError):
        MapFamilySpec(family=MapFamily.PHI3, dim=1, params={"x": 1})


def test_params_dict():
    assert params_dict(["a=3.5", "x=-1"]) == {"a": 3.5, "x": -1.0}
    with pytest.raises(ParamOutOfDomain):
        params_dict(["a"])
    with pytest.raises(ParamOutOfDomain):
        params_dict(["a=abc"])


def test_map_distance_dimension_check():
    with pytest.raises(DimensionMismatch):
        map_distance(family_map("transpose", 2), family_map("transpose", 3))
