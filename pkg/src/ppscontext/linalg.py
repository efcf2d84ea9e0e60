"""Dense complex linear algebra for projectors and subspaces.

Everything here operates on small dense matrices (dimension up to a few
hundred).  All types are immutable after construction and every operation
is a pure function, so values can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DimensionMismatch, NotAProjector, ZeroVector

#: Tolerance for projector validation (hermiticity, idempotence, spectrum).
EPS_PROJ = 1e-9
#: Entrywise tolerance for orthogonality and commutation of projectors.
EPS_ORTH = 1e-9
#: Threshold below 2 for the eigenvalue cluster that defines a subspace
#: meet; looser than EPS_PROJ because the cluster degrades quadratically
#: with the principal angle between the subspaces.
EPS_MEET = 1e-7
#: Relative singular-value cutoff for range/span computations.
EPS_RANK = 1e-10


def max_abs(a: np.ndarray) -> float:
    """Largest entrywise absolute value of an array (max norm)."""
    return float(np.max(np.abs(a)))


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix on a d-dimensional Hilbert space.

    The entries are copied, validated to be finite, and frozen.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatch(
                f"operator must be a square matrix, got shape {m.shape}"
            )
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


@dataclass(frozen=True, eq=False)
class Vector:
    """State vector with nonzero norm; normalization is not required."""

    components: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.components, dtype=complex).reshape(-1)
        if v.size < 1:
            raise DimensionMismatch("vector must have at least one component")
        if not np.all(np.isfinite(v)):
            raise ValueError("vector components must be finite")
        if np.linalg.norm(v) <= EPS_PROJ:
            raise ZeroVector("vector norm is numerically zero")
        object.__setattr__(self, "components", _freeze(v))

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


@dataclass(frozen=True, eq=False)
class Projector:
    """Validated orthogonal projector carrying its rank.

    Construction checks that the matrix is hermitian and idempotent within
    EPS_PROJ and that its spectrum sits on {0, 1}; the rank is the number
    of eigenvalues near 1.
    """

    op: Operator
    rank: int = field(init=False)

    def __post_init__(self) -> None:
        m = self.op.matrix
        if max_abs(m - m.conj().T) > EPS_PROJ:
            raise NotAProjector(f"matrix is not hermitian within {EPS_PROJ:g}")
        if max_abs(m @ m - m) > EPS_PROJ:
            raise NotAProjector(f"matrix is not idempotent within {EPS_PROJ:g}")
        eigs = np.linalg.eigvalsh(m)
        near_one = np.abs(eigs - 1.0) <= EPS_PROJ
        near_zero = np.abs(eigs) <= EPS_PROJ
        if not bool(np.all(near_one | near_zero)):
            raise NotAProjector("spectrum is not contained in {0, 1}")
        object.__setattr__(self, "rank", int(np.count_nonzero(near_one)))

    @classmethod
    def from_matrix(cls, matrix) -> "Projector":
        return cls(Operator(matrix))

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def dim(self) -> int:
        return self.op.dim

    def complement(self) -> "Projector":
        return Projector.from_matrix(np.eye(self.dim) - self.matrix)


def identity_projector(dim: int) -> Projector:
    return Projector.from_matrix(np.eye(dim))


def zero_projector(dim: int) -> Projector:
    return Projector.from_matrix(np.zeros((dim, dim)))


def _as_vector(v) -> Vector:
    return v if isinstance(v, Vector) else Vector(v)


def _require_same_dim(p: Projector, q: Projector) -> None:
    if p.dim != q.dim:
        raise DimensionMismatch(f"projector dims differ: {p.dim} vs {q.dim}")


def projector_from_vectors(vs: Iterable) -> Projector:
    """Orthogonal projector onto the span of the given vectors.

    Vectors may be unnormalized and linearly dependent; the span is
    orthonormalized via SVD, so any two spanning sets of the same subspace
    produce the same projector.

    Raises ZeroVector for an input of numerically zero norm and
    DimensionMismatch for inconsistent dimensions.
    """
    vectors = [_as_vector(v) for v in vs]
    if not vectors:
        raise ValueError("at least one spanning vector is required")
    dim = vectors[0].dim
    for v in vectors[1:]:
        if v.dim != dim:
            raise DimensionMismatch(f"vector dims differ: {dim} vs {v.dim}")
    a = np.column_stack([v.components for v in vectors])
    u, s, _ = np.linalg.svd(a)
    keep = s > EPS_RANK * s[0]
    basis = u[:, : int(np.count_nonzero(keep))]
    return Projector.from_matrix(basis @ basis.conj().T)


def is_orthogonal(p: Projector, q: Projector) -> bool:
    """True iff the ranges of p and q are orthogonal (pq = 0 within EPS_ORTH)."""
    _require_same_dim(p, q)
    return max_abs(p.matrix @ q.matrix) <= EPS_ORTH


def commutes(p: Projector, q: Projector) -> bool:
    """True iff pq = qp within EPS_ORTH."""
    _require_same_dim(p, q)
    pq = p.matrix @ q.matrix
    return max_abs(pq - q.matrix @ p.matrix) <= EPS_ORTH


def meet(p: Projector, q: Projector) -> Projector:
    """Projector onto the intersection of the ranges of p and q.

    Computed as the spectral projector of p + q for the eigenvalue-2
    cluster: a vector is fixed by both projectors exactly when it is an
    eigenvector of the sum with eigenvalue 2.  The threshold is EPS_MEET.
    """
    _require_same_dim(p, q)
    w, v = np.linalg.eigh(p.matrix + q.matrix)
    cols = v[:, w >= 2.0 - EPS_MEET]
    return Projector.from_matrix(cols @ cols.conj().T)


def range_projector(a) -> Projector:
    """Orthogonal projector onto the column space of an operator.

    Singular values below EPS_RANK relative to the largest one are treated
    as zero, so the zero operator maps to the zero projector.
    """
    m = a.matrix if isinstance(a, Operator) else Operator(a).matrix
    u, s, _ = np.linalg.svd(m)
    keep = s > EPS_RANK * s[0] if s.size else np.zeros(0, dtype=bool)
    basis = u[:, : int(np.count_nonzero(keep))]
    return Projector.from_matrix(basis @ basis.conj().T)


def projectors_close(p: Projector, q: Projector, tol: float = EPS_PROJ) -> bool:
    """Entrywise comparison of two projectors within ``tol``."""
    return p.dim == q.dim and max_abs(p.matrix - q.matrix) <= tol


def vectors_from_projector(p: Projector) -> list[Vector]:
    """An orthonormal basis of the range of ``p`` (empty for rank 0)."""
    w, v = np.linalg.eigh(p.matrix)
    return [Vector(v[:, i]) for i in range(p.dim) if w[i] > 0.5]


__all__ = [
    "EPS_PROJ",
    "EPS_ORTH",
    "EPS_MEET",
    "EPS_RANK",
    "Operator",
    "Vector",
    "Projector",
    "identity_projector",
    "zero_projector",
    "projector_from_vectors",
    "is_orthogonal",
    "commutes",
    "meet",
    "range_projector",
    "projectors_close",
    "vectors_from_projector",
    "max_abs",
]
