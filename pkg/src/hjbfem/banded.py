"""Symmetric-bandwidth banded matrices and a direct banded solver.

All global operators in this package are tridiagonal (P1 elements, FDM) or
pentadiagonal (P2 elements).  Storage is row aligned: ``data[bw + o, i]``
holds entry ``A[i, i + o]`` for offsets ``-bw <= o <= bw``, so the whole of
row i lives in column i of ``data``.  That makes the row splicing used by
the policy matrix a single fancy-indexed copy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = ["BandedMatrix", "SingularMatrixError", "solve_banded"]


class SingularMatrixError(RuntimeError):
    """Raised when banded elimination meets a zero or unusable pivot."""


@dataclass
class BandedMatrix:
    """Banded matrix with symmetric bandwidth.

    ``data`` has shape (2*bandwidth + 1, n); out-of-band positions are kept
    at exactly zero so that addition and scaling never leak spurious
    entries.
    """

    n: int
    bandwidth: int
    data: np.ndarray

    # ---- constructors -------------------------------------------------
    @classmethod
    def zeros(cls, n: int, bandwidth: int) -> "BandedMatrix":
        if bandwidth not in (0, 1, 2):
            raise ValueError(f"unsupported bandwidth {bandwidth}")
        return cls(n=n, bandwidth=bandwidth, data=np.zeros((2 * bandwidth + 1, n)))

    @classmethod
    def identity(cls, n: int, bandwidth: int = 0) -> "BandedMatrix":
        out = cls.zeros(n, bandwidth)
        out.data[bandwidth, :] = 1.0
        return out

    @classmethod
    def from_dense(cls, A: np.ndarray, bandwidth: int) -> "BandedMatrix":
        A = np.asarray(A, dtype=float)
        n = A.shape[0]
        out = cls.zeros(n, bandwidth)
        for o in range(-bandwidth, bandwidth + 1):
            d = np.diagonal(A, offset=o)
            if o >= 0:
                out.data[bandwidth + o, : n - o] = d
            else:
                out.data[bandwidth + o, -o:] = d
        # anything outside the band must be zero for the representation
        if not np.allclose(out.to_dense(), A):
            raise ValueError("matrix has entries outside the requested bandwidth")
        return out

    # ---- element access / conversion ----------------------------------
    def get(self, i: int, j: int) -> float:
        o = j - i
        if abs(o) > self.bandwidth or not (0 <= i < self.n and 0 <= j < self.n):
            return 0.0
        return float(self.data[self.bandwidth + o, i])

    def set(self, i: int, j: int, value: float) -> None:
        o = j - i
        if abs(o) > self.bandwidth:
            raise IndexError(f"entry ({i},{j}) outside bandwidth {self.bandwidth}")
        self.data[self.bandwidth + o, i] = value

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        bw = self.bandwidth
        for o in range(-bw, bw + 1):
            if o >= 0:
                idx = np.arange(self.n - o)
                A[idx, idx + o] = self.data[bw + o, : self.n - o]
            else:
                idx = np.arange(-o, self.n)
                A[idx, idx + o] = self.data[bw + o, -o:]
        return A

    def to_lapack_ab(self) -> np.ndarray:
        """Column-aligned band storage as expected by scipy.linalg.solve_banded."""
        bw = self.bandwidth
        ab = np.zeros((2 * bw + 1, self.n))
        for o in range(-bw, bw + 1):
            if o >= 0:
                ab[bw - o, o:] = self.data[bw + o, : self.n - o]
            else:
                ab[bw - o, : self.n + o] = self.data[bw + o, -o:]
        return ab

    # ---- algebra -------------------------------------------------------
    def copy(self) -> "BandedMatrix":
        return BandedMatrix(self.n, self.bandwidth, self.data.copy())

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.n:
            raise ValueError(f"vector length {v.shape[0]} != matrix dimension {self.n}")
        bw = self.bandwidth
        out = self.data[bw, :] * v
        for o in range(1, bw + 1):
            out[: self.n - o] += self.data[bw + o, : self.n - o] * v[o:]
            out[o:] += self.data[bw - o, o:] * v[: self.n - o]
        return out

    def __matmul__(self, v: np.ndarray) -> np.ndarray:
        return self.matvec(v)

    def _align(self, other: "BandedMatrix") -> tuple["BandedMatrix", "BandedMatrix"]:
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        bw = max(self.bandwidth, other.bandwidth)
        return self.widen(bw), other.widen(bw)

    def widen(self, bandwidth: int) -> "BandedMatrix":
        if bandwidth < self.bandwidth:
            raise ValueError("cannot shrink bandwidth")
        if bandwidth == self.bandwidth:
            return self
        out = BandedMatrix.zeros(self.n, bandwidth)
        lo = bandwidth - self.bandwidth
        out.data[lo : lo + self.data.shape[0], :] = self.data
        return out

    def __add__(self, other: "BandedMatrix") -> "BandedMatrix":
        a, b = self._align(other)
        return BandedMatrix(a.n, a.bandwidth, a.data + b.data)

    def __sub__(self, other: "BandedMatrix") -> "BandedMatrix":
        a, b = self._align(other)
        return BandedMatrix(a.n, a.bandwidth, a.data - b.data)

    def __mul__(self, c: float) -> "BandedMatrix":
        return BandedMatrix(self.n, self.bandwidth, self.data * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "BandedMatrix":
        return self * -1.0

    def splice_rows(self, rows: np.ndarray, source: "BandedMatrix") -> None:
        """Overwrite the given rows with the corresponding rows of ``source``."""
        if source.bandwidth != self.bandwidth or source.n != self.n:
            raise ValueError("row splice requires matching shape and bandwidth")
        self.data[:, rows] = source.data[:, rows]


def solve_banded(A: BandedMatrix, rhs: np.ndarray) -> np.ndarray:
    """Direct solve of A x = rhs exploiting the band structure.

    Backed by LAPACK's banded LU (partial pivoting), O(n * bandwidth^2)
    work.  Raises SingularMatrixError on a singular factorization.
    """
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != A.n:
        raise ValueError(f"rhs length {rhs.shape[0]} != matrix dimension {A.n}")
    if A.bandwidth == 0:
        d = A.data[0]
        if np.any(d == 0.0):
            raise SingularMatrixError("zero pivot in diagonal solve")
        return rhs / d
    try:
        x = scipy.linalg.solve_banded(
            (A.bandwidth, A.bandwidth), A.to_lapack_ab(), rhs,
            overwrite_ab=True, check_finite=False,
        )
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularMatrixError("non-finite solution: matrix numerically singular")
    return x
