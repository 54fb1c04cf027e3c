import numpy as np
import pytest

from symnmf.errors import DimensionMismatch, NotSymmetric
from symnmf.matcore import (
    Factor,
    FactorPair,
    SymmetricMatrix,
    fro_inner,
    fro_norm,
    load_csv,
    load_dense_text,
    make_symmetric,
    multiply,
    rank1_update,
    save_csv,
    save_dense_text,
    spectral_extremes,
    transpose_multiply,
)


def test_symmetric_matrix_basic():
    x = SymmetricMatrix(np.eye(3))
    assert x.n == 3
    assert x.fro == pytest.approx(np.sqrt(3.0))
    assert x.spec_norm == pytest.approx(1.0)
    assert x.sigma_min == pytest.approx(1.0)


def test_spectral_extremes_known_eigenvalues():
    # diag(3, -2, 1): largest |eig| = 3, smallest signed eig = -2
    x = SymmetricMatrix(np.diag([3.0, -2.0, 1.0]))
    spec, smin = spectral_extremes(x)
    assert spec == pytest.approx(3.0)
    assert smin == pytest.approx(-2.0)


def test_spectral_extremes_random_vs_eigvalsh():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(2, 10))
        a = rng.standard_normal((n, n))
        a = a + a.T
        x = SymmetricMatrix(a)
        w = np.linalg.eigvalsh(a)
        assert x.spec_norm == pytest.approx(np.max(np.abs(w)), rel=1e-12)
        assert x.sigma_min == pytest.approx(w[0], rel=1e-12, abs=1e-12)


def test_non_square_rejected():
    with pytest.raises(DimensionMismatch):
        SymmetricMatrix(np.zeros((2, 3)))
    with pytest.raises(DimensionMismatch):
        make_symmetric(np.zeros((2, 3)))


def test_make_symmetric_rejects_asymmetry():
    a = np.eye(3)
    a[0, 1] = 1e-6
    with pytest.raises(NotSymmetric):
        make_symmetric(a)
    # tiny asymmetry below 1e-12 * ||.||_F passes
    b = np.eye(3)
    b[0, 1] = 1e-14
    make_symmetric(b)


def test_factor_storage_and_validation():
    f = Factor([[1.0, 2.0], [0.0, 3.0]])
    assert f.entries.flags.f_contiguous
    assert (f.n, f.r) == (2, 2)
    with pytest.raises(ValueError):
        Factor([[-1.0]])
    with pytest.raises(DimensionMismatch):
        Factor(np.zeros(3))
    c = f.copy()
    c.entries[0, 0] = 9.0
    assert f.entries[0, 0] == 1.0


def test_factor_pair_shape_check():
    with pytest.raises(DimensionMismatch):
        FactorPair(Factor(np.ones((3, 2))), Factor(np.ones((3, 3))))
    w = FactorPair(np.ones((3, 2)), np.ones((3, 2)))
    assert isinstance(w.u, Factor)


def test_gemm_wrappers_match_numpy():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((4, 3))
    b = rng.standard_normal((3, 5))
    assert np.allclose(multiply(a, b), a @ b)
    c = rng.standard_normal((4, 5))
    assert np.allclose(transpose_multiply(a, c), a.T @ c)
    assert fro_inner(a, a) == pytest.approx(np.sum(a * a))
    assert fro_norm(a) == pytest.approx(np.linalg.norm(a))
    with pytest.raises(DimensionMismatch):
        multiply(a, c)
    with pytest.raises(DimensionMismatch):
        transpose_multiply(a, b)
    with pytest.raises(DimensionMismatch):
        fro_inner(a, b)


def test_rank1_update_in_place():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((4, 3))
    u = rng.standard_normal(4)
    v = rng.standard_normal(3)
    want = a + 2.0 * np.outer(u, v)
    rank1_update(a, u, v, alpha=2.0)
    assert np.allclose(a, want)
    with pytest.raises(DimensionMismatch):
        rank1_update(a, u, u)


def test_dense_text_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(3)
    a = rng.standard_normal((5, 3)) * np.exp(rng.uniform(-30, 30, (5, 3)))
    p = tmp_path / "a.txt"
    save_dense_text(p, a)
    b = load_dense_text(str(p))
    assert np.array_equal(a, b)


def test_dense_text_header_mismatch(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("2 2\n1 2\n")
    with pytest.raises(DimensionMismatch):
        load_dense_text(str(p))


def test_csv_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(4)
    a = np.abs(rng.standard_normal((4, 4)))
    p = tmp_path / "a.csv"
    save_csv(p, a)
    b = load_csv(str(p))
    assert np.array_equal(a, b)
