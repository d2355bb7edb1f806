"""Exact algebra of canonical vectors and logical matrices.

A canonical vector delta(i, k) is the i-th column of the k x k identity
matrix and encodes the i-th value of a k-valued variable.  A logical
matrix is a 0/1 matrix whose every column is canonical; composing two of
them is function composition on finite sets.  Everything here is stored
by column index only, so all operations are exact integer chasing and a
dense 0/1 representation is never needed outside of test oracles.

The (left) semi-tensor product extends the ordinary matrix product to
mismatched dimensions and is the tool that packs several finite-valued
variables into a single canonical vector.  It is implemented here for
logical matrices only, on which it is closed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "CanonicalVector",
    "LogicalMatrix",
    "delta",
    "stp",
    "stp_vec",
    "encode",
    "decode",
    "pack",
    "mat_pow",
    "block",
]


@dataclass(frozen=True)
class CanonicalVector:
    """delta(index, dim): column `index` of the dim x dim identity (1-based)."""

    index: int
    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        if not 1 <= self.index <= self.dim:
            raise ValueError(
                f"canonical index {self.index} out of range [1, {self.dim}]"
            )

    def as_matrix(self) -> "LogicalMatrix":
        """This vector viewed as a dim x 1 logical matrix."""
        return LogicalMatrix(self.dim, (self.index,))


def delta(index: int, dim: int) -> CanonicalVector:
    """Shorthand constructor for a canonical vector."""
    return CanonicalVector(index, dim)


@dataclass(frozen=True)
class LogicalMatrix:
    """A rows x cols 0/1 matrix whose every column is a canonical vector.

    Column j is delta(col_index[j-1], rows).  A square logical matrix whose
    column indices form a permutation of 1..rows is a permutation matrix.
    """

    rows: int
    col_index: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 1:
            raise ValueError(f"row count must be positive, got {self.rows}")
        if len(self.col_index) < 1:
            raise ValueError("a logical matrix needs at least one column")
        for j, i in enumerate(self.col_index, start=1):
            if not 1 <= i <= self.rows:
                raise ValueError(
                    f"column {j}: index {i} out of range [1, {self.rows}]"
                )

    @property
    def cols(self) -> int:
        return len(self.col_index)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_permutation(self) -> bool:
        return self.is_square and sorted(self.col_index) == list(
            range(1, self.rows + 1)
        )

    @classmethod
    def identity(cls, n: int) -> "LogicalMatrix":
        return cls(n, tuple(range(1, n + 1)))

    @classmethod
    def from_columns(cls, columns: Iterable[CanonicalVector]) -> "LogicalMatrix":
        """Assemble a matrix from canonical columns of a common dimension."""
        cols = tuple(columns)
        if not cols:
            raise ValueError("at least one column required")
        dims = {c.dim for c in cols}
        if len(dims) != 1:
            raise ValueError(f"mixed column dimensions {sorted(dims)}")
        return cls(cols[0].dim, tuple(c.index for c in cols))

    def column(self, j: int) -> CanonicalVector:
        """The j-th column (1-based) as a canonical vector."""
        if not 1 <= j <= self.cols:
            raise ValueError(f"column {j} out of range [1, {self.cols}]")
        return CanonicalVector(self.col_index[j - 1], self.rows)

    def apply(self, x: CanonicalVector) -> CanonicalVector:
        """Matrix-vector product; requires cols == x.dim."""
        if x.dim != self.cols:
            raise ValueError(
                f"cannot apply {self.rows}x{self.cols} matrix to a "
                f"{x.dim}-dimensional vector"
            )
        return CanonicalVector(self.col_index[x.index - 1], self.rows)

    def as_vector(self) -> CanonicalVector:
        """A rows x 1 matrix viewed as a canonical vector."""
        if self.cols != 1:
            raise ValueError(f"matrix has {self.cols} columns, expected 1")
        return CanonicalVector(self.col_index[0], self.rows)


def _compose(a: LogicalMatrix, b: LogicalMatrix) -> LogicalMatrix:
    """Ordinary product a @ b for matching inner dimensions."""
    if a.cols != b.rows:
        raise ValueError(
            f"inner dimensions differ: {a.rows}x{a.cols} times {b.rows}x{b.cols}"
        )
    return LogicalMatrix(a.rows, tuple(a.col_index[j - 1] for j in b.col_index))


def _kron_identity(a: LogicalMatrix, k: int) -> LogicalMatrix:
    """Kronecker product a (x) I_k, still a logical matrix."""
    if k == 1:
        return a
    cols: list[int] = []
    for i in a.col_index:
        base = (i - 1) * k
        cols.extend(range(base + 1, base + k + 1))
    return LogicalMatrix(a.rows * k, tuple(cols))


def stp(a: LogicalMatrix, b: LogicalMatrix) -> LogicalMatrix:
    """Left semi-tensor product of two logical matrices.

    With T = lcm(a.cols, b.rows) this is
    (a (x) I_{T/a.cols}) @ (b (x) I_{T/b.rows}), which reduces to the
    ordinary product whenever a.cols == b.rows.  The result is again
    logical, of size (a.rows*T/a.cols) x (b.cols*T/b.rows).
    """
    t = math.lcm(a.cols, b.rows)
    return _compose(_kron_identity(a, t // a.cols), _kron_identity(b, t // b.rows))


def stp_vec(x: CanonicalVector, y: CanonicalVector) -> CanonicalVector:
    """Semi-tensor product of canonical vectors.

    stp_vec(delta(i, a), delta(j, b)) == delta((i-1)*b + j, a*b); the left
    factor is the most significant digit of the packed value.
    """
    return CanonicalVector((x.index - 1) * y.dim + y.index, x.dim * y.dim)


def pack(indices: Sequence[int], dims: Sequence[int]) -> CanonicalVector:
    """Pack per-factor values into one canonical vector.

    Mixed-radix with the leftmost factor most significant; equivalent to
    folding the factors with stp_vec.
    """
    if len(indices) != len(dims):
        raise ValueError(f"{len(indices)} values for {len(dims)} factors")
    if not dims:
        raise ValueError("at least one factor required")
    acc = 0
    total = 1
    for pos, (i, d) in enumerate(zip(indices, dims), start=1):
        if d < 1:
            raise ValueError(f"factor {pos}: dimension {d} must be positive")
        if not 1 <= i <= d:
            raise ValueError(f"factor {pos}: value {i} out of range [1, {d}]")
        acc = acc * d + (i - 1)
        total *= d
    return CanonicalVector(acc + 1, total)


def encode(bits: Sequence[int]) -> CanonicalVector:
    """Encode a Boolean tuple as a canonical vector of dimension 2**n.

    Bit value 1 maps to delta(1, 2) and 0 to delta(2, 2); bits are packed
    left to right, leftmost most significant.
    """
    if not bits:
        raise ValueError("at least one bit required")
    for pos, b in enumerate(bits, start=1):
        if b not in (0, 1):
            raise ValueError(f"bit {pos}: expected 0 or 1, got {b!r}")
    return pack(tuple(2 - b for b in bits), (2,) * len(bits))


def decode(x: CanonicalVector, dims: Sequence[int]) -> tuple[int, ...]:
    """Inverse of pack: split a canonical vector into per-factor values."""
    total = math.prod(dims)
    if total != x.dim:
        raise ValueError(
            f"shape {tuple(dims)} packs dimension {total}, vector has {x.dim}"
        )
    z = x.index - 1
    out: list[int] = []
    for d in reversed(tuple(dims)):
        out.append(z % d + 1)
        z //= d
    return tuple(reversed(out))


def mat_pow(a: LogicalMatrix, n: int) -> LogicalMatrix:
    """n-th power of a square logical matrix (a**0 is the identity)."""
    if not a.is_square:
        raise ValueError(f"matrix is {a.rows}x{a.cols}, power needs square")
    if n < 0:
        raise ValueError("negative powers are not defined for logical matrices")
    result = LogicalMatrix.identity(a.rows)
    base = a
    while n:
        if n & 1:
            result = _compose(base, result)
        base = _compose(base, base)
        n >>= 1
    return result


def block(a: LogicalMatrix, k: int, block_cols: int) -> LogicalMatrix:
    """The k-th consecutive column block of width block_cols.

    Equals stp(a, delta(k, a.cols // block_cols)); this is how a combined
    transition matrix is split into its per-input-value blocks.
    """
    if block_cols < 1 or a.cols % block_cols != 0:
        raise ValueError(
            f"column count {a.cols} is not divisible into blocks of {block_cols}"
        )
    nblocks = a.cols // block_cols
    if not 1 <= k <= nblocks:
        raise ValueError(f"block {k} out of range [1, {nblocks}]")
    lo = (k - 1) * block_cols
    return LogicalMatrix(a.rows, a.col_index[lo : lo + block_cols])
