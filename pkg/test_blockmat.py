"""
Tests for block-matrix views, partial operations and PPT classification
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from posmaps.blockmat import (
    block, block_matrix, compress_support, embed_first, partial_trace, partial_transpose,
    ppt_classify, rotate_first, tilde_block,
)
from posmaps.errors import IndexOutOfRange, NotPsd, NotUnitary, ShapeMismatch
from posmaps.models import BlockMatrix, PptTag
from posmaps.numcore import matrix_unit, random_psd
from posmaps.statezoo import flip, horodecki, max_ent_projector, werner


def _density(rng, dim):
    rho = random_psd(dim, rng)
    return rho / np.trace(rho).real


def test_block_of_single_block_matrix(rng):
    X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    A = block_matrix(np.kron(matrix_unit(0, 0, 2), X), 2, 2)
    assert_allclose(block(A, 0, 0), X)
    for i, j in [(0, 1), (1, 0), (1, 1)]:
        assert_allclose(block(A, i, j), np.zeros((2, 2)))


def test_flip_block():
    assert_allclose(block(flip(2), 0, 1), matrix_unit(1, 0, 2))


def test_tilde_block_duality(random_hermitian_block):
    A = random_hermitian_block(3, 3)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    assert tilde_block(A, k, l)[i, j] == block(A, i, j)[k, l]


def test_block_index_checks(random_hermitian_block):
    A = random_hermitian_block(2, 3)
    with pytest.raises(IndexOutOfRange):
        block(A, 2, 0)
    with pytest.raises(IndexOutOfRange):
        tilde_block(A, 0, 3)


def test_block_matrix_shape_check():
    with pytest.raises(ShapeMismatch):
        block_matrix(np.eye(5), 2, 2)


def test_block_matrix_rejects_non_finite():
    bad = np.eye(4)
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        BlockMatrix(m=2, n=2, full=bad)


@pytest.mark.parametrize("a", [0.0, 1.5, 3.5, 5.0])
def test_partial_trace_of_horodecki(a):
    assert_allclose(partial_trace(horodecki(a), 2), np.eye(3) / 3, atol=1e-12)


@pytest.mark.parametrize("m,x", [(2, 0.3), (3, -0.7)])
def test_partial_trace_of_werner(m, x):
    assert_allclose(partial_trace(werner(m, x), 2), np.eye(m) / m, atol=1e-12)


def test_partial_trace_of_product(rng):
    rho1, rho2 = random_psd(2, rng), random_psd(3, rng)
    A = block_matrix(np.kron(rho1, rho2), 2, 3)
    assert_allclose(partial_trace(A, 1), rho2 * np.trace(rho1), atol=1e-12)
    assert_allclose(partial_trace(A, 2), rho1 * np.trace(rho2), atol=1e-12)


def test_partial_traces_preserve_trace(random_hermitian_block):
    A = random_hermitian_block(3, 2)
    total = np.trace(A.full)
    assert abs(np.trace(partial_trace(A, 1)) - total) <= 1e-12
    assert abs(np.trace(partial_trace(A, 2)) - total) <= 1e-12


@pytest.mark.parametrize("m", [2, 3])
def test_flip_partial_transpose_is_max_ent(m):
    assert_allclose(partial_transpose(flip(m), 2).full, m * max_ent_projector(m).full, atol=1e-14)


def test_partial_transposes_compose_to_transpose(rng):
    A = block_matrix(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)), 2, 3)
    both = partial_transpose(partial_transpose(A, 1), 2)
    assert_allclose(both.full, A.full.T, atol=1e-14)
    swapped = partial_transpose(partial_transpose(A, 2), 1)
    assert_allclose(swapped.full, both.full, atol=1e-14)
    assert_allclose(partial_transpose(partial_transpose(A, 1), 1).full, A.full, atol=1e-14)


def test_horodecki_npt_region_has_negative_partial_transpose():
    assert np.linalg.eigvalsh(partial_transpose(horodecki(4.5), 2).full).min() < 0


def test_partial_transpose_sides_share_spectrum(random_hermitian_block):
    A = random_hermitian_block(2, 3)
    s1 = np.linalg.eigvalsh(partial_transpose(A, 1).full)
    s2 = np.linalg.eigvalsh(partial_transpose(A, 2).full)
    assert_allclose(s1, s2, atol=1e-12)


def test_rotate_first_identity_and_spectrum(random_hermitian_block, unitary):
    A = random_hermitian_block(3, 2)
    assert_allclose(rotate_first(A, np.eye(3)).full, A.full, atol=1e-14)
    rotated = rotate_first(A, unitary(3))
    assert_allclose(np.linalg.eigvalsh(rotated.full), np.linalg.eigvalsh(A.full), atol=1e-10)
    assert_allclose(partial_trace(rotated, 1), partial_trace(A, 1), atol=1e-12)


def test_rotate_first_on_flip(unitary):
    U = unitary(3)
    u = U[0, :].conj()
    assert_allclose(block(rotate_first(flip(3), U), 0, 0), np.outer(u, u.conj()), atol=1e-12)


def test_rotate_first_requires_unitary(random_hermitian_block):
    with pytest.raises(NotUnitary):
        rotate_first(random_hermitian_block(2, 2), np.diag([1.0, 2.0]))


@pytest.mark.parametrize("a,tag", [
    (3.5, PptTag.POSITIVE_PPT),
    (4.5, PptTag.POSITIVE_NPPT),
    (0.5, PptTag.POSITIVE_NPPT),
])
def test_ppt_classify_horodecki(a, tag):
    assert ppt_classify(horodecki(a), 1e-9).tag == tag


def test_ppt_classify_not_positive():
    result = ppt_classify(flip(2), 1e-9)
    assert result.tag == PptTag.NOT_POSITIVE
    assert result.min_eig == pytest.approx(-1.0)


def test_compress_support_rank_one_reduced(rng):
    rho2 = _density(rng, 3)
    A = block_matrix(np.kron(matrix_unit(0, 0, 3), rho2), 3, 3)
    compressed, V = compress_support(A)
    assert compressed.m == 1
    assert_allclose(compressed.full, rho2, atol=1e-12)
    assert_allclose(V.conj().T @ V, np.eye(1), atol=1e-12)


def test_compress_support_full_rank(rng):
    A = block_matrix(np.kron(_density(rng, 2), _density(rng, 3)), 2, 3)
    compressed, V = compress_support(A)
    assert compressed.m == 2
    assert_allclose(np.linalg.eigvalsh(compressed.full), np.linalg.eigvalsh(A.full), atol=1e-12)


def test_compress_support_reconstructs(random_psd_block):
    A = random_psd_block(3, 2, support=2)
    compressed, V = compress_support(A)
    assert compressed.m == 2
    assert_allclose(V.conj().T @ V, np.eye(2), atol=1e-12)
    assert np.linalg.norm(embed_first(compressed, V).full - A.full) <= 1e-9


def test_compress_support_requires_psd():
    with pytest.raises(NotPsd):
        compress_support(flip(2))


def test_reduced_matrices_of_psd_are_psd(random_psd_block):
    for _ in range(10):
        A = random_psd_block(2, 3)
        assert np.linalg.eigvalsh(partial_trace(A, 1)).min() >= -1e-10
        assert np.linalg.eigvalsh(partial_trace(A, 2)).min() >= -1e-10
