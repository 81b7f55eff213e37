"""Banded storage and the direct banded solver against dense oracles."""
import numpy as np
import pytest

from hjbfem import BandedMatrix, SingularMatrixError, solve_banded


def random_banded(rng, n, bw, dominant=True):
    A = BandedMatrix.zeros(n, bw)
    for o in range(-bw, bw + 1):
        length = n - abs(o)
        vals = rng.standard_normal(length)
        if o >= 0:
            A.data[bw + o, :length] = vals
        else:
            A.data[bw + o, -length:] = vals
    if dominant:
        A.data[bw, :] = np.abs(A.data).sum(axis=0) + 1.0
    return A


class TestStorage:
    def test_round_trip_dense(self, rng):
        for bw in (1, 2):
            A = random_banded(rng, 9, bw)
            assert np.allclose(BandedMatrix.from_dense(A.to_dense(), bw).to_dense(),
                               A.to_dense())

    def test_from_dense_rejects_out_of_band(self):
        A = np.eye(5)
        A[0, 4] = 1.0
        with pytest.raises(ValueError):
            BandedMatrix.from_dense(A, 1)

    def test_matvec_matches_dense(self, rng):
        for bw in (0, 1, 2):
            A = random_banded(rng, 12, max(bw, 0))
            v = rng.standard_normal(12)
            assert np.allclose(A @ v, A.to_dense() @ v, atol=1e-13)

    def test_algebra_matches_dense(self, rng):
        A = random_banded(rng, 8, 2)
        B = random_banded(rng, 8, 1)
        v = rng.standard_normal(8)
        assert np.allclose((A + B).to_dense(), A.to_dense() + B.to_dense())
        assert np.allclose((A - B).to_dense(), A.to_dense() - B.to_dense())
        assert np.allclose((2.5 * A).to_dense(), 2.5 * A.to_dense())
        assert np.allclose((-A) @ v, -(A @ v))

    def test_out_of_band_padding_stays_zero(self, rng):
        A = random_banded(rng, 6, 2)
        B = 3.0 * (A + A)
        # padded corners of the diagonal storage must remain exactly zero
        assert B.data[4, -2:].tolist() == [0.0, 0.0]
        assert B.data[0, :2].tolist() == [0.0, 0.0]

    def test_row_splice(self, rng):
        A = random_banded(rng, 7, 1)
        B = random_banded(rng, 7, 1)
        C = A.copy()
        rows = np.array([2, 5])
        C.splice_rows(rows, B)
        dense = C.to_dense()
        assert np.allclose(dense[rows], B.to_dense()[rows])
        keep = [i for i in range(7) if i not in rows]
        assert np.allclose(dense[keep], A.to_dense()[keep])


class TestSolveBanded:
    def test_identity(self, rng):
        rhs = rng.standard_normal(10)
        assert np.allclose(solve_banded(BandedMatrix.identity(10, 1), rhs), rhs)

    def test_two_by_two_hand_solve(self):
        A = BandedMatrix.from_dense(np.array([[2.0, 1.0], [1.0, 2.0]]), 1)
        assert np.allclose(solve_banded(A, np.array([3.0, 3.0])), [1.0, 1.0])

    def test_pentadiagonal_matches_dense_oracle(self, rng):
        A = random_banded(rng, 10, 2, dominant=True)
        rhs = rng.standard_normal(10)
        x_dense = np.linalg.solve(A.to_dense(), rhs)
        assert np.max(np.abs(solve_banded(A, rhs) - x_dense)) < 1e-12

    def test_tridiagonal_matches_dense_oracle(self, rng):
        A = random_banded(rng, 50, 1, dominant=True)
        rhs = rng.standard_normal(50)
        assert np.allclose(solve_banded(A, rhs), np.linalg.solve(A.to_dense(), rhs),
                           atol=1e-11)

    def test_residual_contract(self, rng):
        for bw in (1, 2):
            A = random_banded(rng, 30, bw, dominant=True)
            rhs = rng.standard_normal(30)
            x = solve_banded(A, rhs)
            res = np.max(np.abs(A @ x - rhs))
            assert res <= 1e-10 * (1.0 + np.max(np.abs(rhs)))

    def test_singular_matrix_raises(self):
        A = BandedMatrix.zeros(4, 1)
        with pytest.raises(SingularMatrixError):
            solve_banded(A, np.ones(4))

    def test_dimension_mismatch(self, rng):
        A = random_banded(rng, 5, 1)
        with pytest.raises(ValueError):
            solve_banded(A, np.ones(4))
