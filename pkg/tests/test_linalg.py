import numpy as np
import pytest

from css_sketch.errors import InvalidInput
from css_sketch.linalg import (
    best_rank_k,
    format_matrix,
    frobenius_norm,
    orthonormal_basis,
    parse_matrix,
    read_matrix,
    spectral_norm,
    thin_svd,
    write_matrix,
)


def test_thin_svd_identity():
    svd = thin_svd(np.eye(3))
    np.testing.assert_allclose(svd.singular_values, [1, 1, 1])
    assert svd.rank == 3


def test_thin_svd_drops_zero_direction():
    svd = thin_svd(np.diag([3.0, 2.0, 0.0]))
    np.testing.assert_allclose(svd.singular_values, [3, 2])
    assert svd.rank == 2
    assert svd.U.shape == (3, 2) and svd.V.shape == (3, 2)


def test_thin_svd_reconstructs(rng):
    A = rng.standard_normal((8, 5))
    svd = thin_svd(A)
    recon = (svd.U * svd.singular_values) @ svd.V.T
    assert np.linalg.norm(recon - A) / np.linalg.norm(A) <= 1e-10
    np.testing.assert_allclose(svd.U.T @ svd.U, np.eye(5), atol=1e-10)
    np.testing.assert_allclose(svd.V.T @ svd.V, np.eye(5), atol=1e-10)
    assert np.all(np.diff(svd.singular_values) <= 0)


@pytest.mark.parametrize("bad", [np.zeros((0, 3)), np.array([[1.0, np.nan]]), np.ones(3)])
def test_thin_svd_rejects(bad):
    with pytest.raises(InvalidInput):
        thin_svd(bad)


def test_sigma_beyond_rank_is_zero():
    svd = thin_svd(np.diag([3.0, 2.0, 0.0]))
    assert svd.sigma(1) == 3.0 and svd.sigma(3) == 0.0


def test_best_rank_k_diagonal():
    out = best_rank_k(thin_svd(np.diag([3.0, 2.0, 1.0])), 2)
    np.testing.assert_allclose(out, np.diag([3.0, 2.0, 0.0]), atol=1e-12)


def test_best_rank_k_full_rank_is_identity(rng):
    A = rng.standard_normal((6, 4))
    np.testing.assert_allclose(best_rank_k(thin_svd(A), 4), A, atol=1e-10)


def test_best_rank_k_rejects_large_k():
    with pytest.raises(InvalidInput):
        best_rank_k(thin_svd(np.diag([3.0, 2.0, 0.0])), 3)


def test_eckart_young(rng):
    for _ in range(50):
        A = rng.standard_normal((7, 6))
        svd = thin_svd(A)
        for k in (1, 2, 3):
            err = spectral_norm(A - best_rank_k(svd, k))
            assert err == pytest.approx(svd.sigma(k + 1), rel=1e-9)


def test_spectral_norm_cases(rng):
    assert spectral_norm(np.zeros((4, 4))) == 0.0
    assert spectral_norm(np.diag([5.0, 1.0])) == pytest.approx(5.0)
    A = rng.standard_normal((10, 7))
    # independent route: square root of the top eigenvalue of A^T A
    top = np.sqrt(np.linalg.eigvalsh(A.T @ A)[-1])
    assert spectral_norm(A) == pytest.approx(top, rel=1e-9)
    assert spectral_norm(A) == pytest.approx(thin_svd(A).singular_values[0], rel=1e-9)


def test_frobenius_norm(rng):
    assert frobenius_norm(np.zeros((2, 3))) == 0.0
    assert frobenius_norm(np.eye(3)) == pytest.approx(np.sqrt(3))
    A = rng.standard_normal((6, 9))
    s = np.linalg.svd(A, compute_uv=False)
    assert frobenius_norm(A) == pytest.approx(np.sqrt(np.sum(s**2)), rel=1e-10)


def test_orthonormal_basis_collapses_duplicates():
    e1 = np.array([1.0, 0.0, 0.0])
    Q = orthonormal_basis(np.column_stack([e1, e1]))
    assert Q.shape == (3, 1)
    np.testing.assert_allclose(Q @ Q.T, np.outer(e1, e1), atol=1e-12)


def test_orthonormal_basis_of_orthonormal(rng):
    C, _ = np.linalg.qr(rng.standard_normal((7, 3)))
    Q = orthonormal_basis(C)
    np.testing.assert_allclose(Q @ Q.T, C @ C.T, atol=1e-10)


def test_orthonormal_basis_projector(rng):
    C = rng.standard_normal((8, 5))
    Q = orthonormal_basis(C)
    P = Q @ Q.T
    assert np.linalg.norm(P @ C - C) <= 1e-9
    assert np.linalg.norm(P @ P - P) <= 1e-9


def test_orthonormal_basis_zero_matrix():
    assert orthonormal_basis(np.zeros((4, 2))).shape == (4, 0)


def test_matrix_roundtrip_exact(tmp_path, rng):
    A = rng.standard_normal((4, 3)) * 10.0 ** rng.integers(-20, 20, size=(4, 3))
    path = tmp_path / "a.txt"
    write_matrix(A, path)
    assert path.read_text().splitlines()[0] == "4 3"
    np.testing.assert_array_equal(read_matrix(path), A)


def test_parse_matrix_errors():
    with pytest.raises(InvalidInput, match=":2"):
        parse_matrix("2 2\n1 x\n3 4\n")
    with pytest.raises(InvalidInput, match="expected 4 entries"):
        parse_matrix("2 2\n1 2 3\n")
    with pytest.raises(InvalidInput, match="header"):
        parse_matrix("two two\n")
    assert format_matrix(np.eye(2)).startswith("2 2\n")
