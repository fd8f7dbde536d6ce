"""Riemannian geometry of symmetric positive-definite matrices.

Matrices are represented by two thin wrappers around read-only float64
arrays: :class:`SymMatrix` (exactly symmetric by construction) and
:class:`SpdMatrix` (symmetric with all eigenvalues above a positivity
floor, checked at construction).  On top of these the module provides the
eigendecomposition-based matrix log/exp, the log-Euclidean distance, the
Frobenius baseline distance, the closed-form log-Euclidean mean, and the
sum-of-squared-distances objective the mean minimizes.

All operations are pure functions of their inputs; values are immutable
and safe to share between threads.
"""

from __future__ import annotations

import numpy as np

from .eigsolver import EigenPair, eigh_descending
from .errors import (
    DimensionMismatchError,
    EmptyInputError,
    NotPositiveDefiniteError,
)

# An SPD constructor accepts a matrix iff lambda_min > floor, with
# floor = POSITIVITY_FLOOR * max(1, lambda_max).  Below that, callers must
# regularize explicitly.
POSITIVITY_FLOOR = 1e-12

# Largest exponent exp() can take without overflowing a float64.
_EXP_MAX = float(np.log(np.finfo(np.float64).max))


def _check_square(a: np.ndarray) -> np.ndarray:
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    return a


class SymMatrix:
    """Square symmetric matrix with exactly mirrored triangles.

    The constructor verifies near-symmetry of the input, then stores
    ``0.5 * (a + a.T)``, which is bitwise symmetric.  The wrapped array is
    read-only.
    """

    __slots__ = ("_values",)

    def __init__(self, values, *, rtol: float = 1e-8):
        a = _check_square(np.asarray(values, dtype=np.float64))
        if not np.isfinite(a).all():
            raise ValueError("matrix entries must be finite")
        scale = max(1.0, float(np.abs(a).max()))
        if float(np.abs(a - a.T).max()) > rtol * scale:
            raise ValueError("matrix is not symmetric within tolerance")
        m = np.ascontiguousarray(0.5 * (a + a.T))
        m.setflags(write=False)
        self._values = m

    @classmethod
    def _wrap(cls, exact: np.ndarray) -> "SymMatrix":
        """Adopt an already exactly-symmetric array without re-validation."""
        obj = object.__new__(cls)
        m = np.ascontiguousarray(exact)
        if m.flags.writeable:
            m = m.copy()
            m.setflags(write=False)
        obj._values = m
        return obj

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return self._values.shape[0]

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class SpdMatrix(SymMatrix):
    """Symmetric positive-definite matrix.

    Construction eigendecomposes the (symmetrized) input and rejects it
    when the smallest eigenvalue is not above the positivity floor.  The
    decomposition is kept, and the matrix logarithm is cached on first
    use, so distance and mean computations never repeat an eigensolve.
    """

    __slots__ = ("_eig", "_log")

    def __init__(self, values, *, rtol: float = 1e-8):
        super().__init__(values, rtol=rtol)
        pair = eigh_descending(self._values)
        _check_floor(pair.eigenvalues)
        self._eig = pair
        self._log = None

    @classmethod
    def _from_eig(
        cls,
        pair: EigenPair,
        *,
        values: np.ndarray | None = None,
        log_values: np.ndarray | None = None,
    ) -> "SpdMatrix":
        """Build from a known decomposition, skipping re-validation.

        ``values`` overrides the recomposed matrix when the caller knows the
        exact entries (e.g. an additive shift); ``log_values`` pre-seeds the
        log cache when it is known in closed form (e.g. the result of exp).
        """
        _check_floor(pair.eigenvalues)
        if values is None:
            values = pair.reconstruct()
        obj = super()._wrap(values)
        obj._eig = pair
        obj._log = None
        if log_values is not None:
            log = np.ascontiguousarray(log_values)
            if log.flags.writeable:
                log = log.copy()
                log.setflags(write=False)
            obj._log = log
        return obj

    @property
    def eig(self) -> EigenPair:
        return self._eig

    def log_values(self) -> np.ndarray:
        """Matrix logarithm as a read-only array, computed once."""
        if self._log is None:
            log = _recompose(self._eig, np.log(self._eig.eigenvalues))
            log.setflags(write=False)
            self._log = log
        return self._log


def _check_floor(eigenvalues: np.ndarray) -> None:
    lam_min = float(eigenvalues[-1])
    lam_max = float(eigenvalues[0])
    floor = POSITIVITY_FLOOR * max(1.0, lam_max)
    if not lam_min > floor:
        raise NotPositiveDefiniteError(
            f"smallest eigenvalue {lam_min:.3e} is not above the positivity "
            f"floor {floor:.3e}; regularize explicitly if this is expected"
        )


def _recompose(pair: EigenPair, new_eigenvalues: np.ndarray) -> np.ndarray:
    v = pair.eigenvectors
    m = (v * new_eigenvalues) @ v.T
    return 0.5 * (m + m.T)


def as_sym(s) -> SymMatrix:
    if isinstance(s, SymMatrix):
        return s
    return SymMatrix(s)


def as_spd(c) -> SpdMatrix:
    if isinstance(c, SpdMatrix):
        return c
    return SpdMatrix(c)


def _check_same_dim(a: SymMatrix, b: SymMatrix) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")


def sym_eig(s) -> EigenPair:
    """Eigendecomposition of a symmetric matrix.

    Eigenvalues come in descending order with orthonormal eigenvector
    columns, deterministically sign-fixed (first nonzero component of each
    eigenvector positive).

    Raises
    ------
    IterationFailure
        If the eigensolver does not converge within its iteration cap.
    """
    return eigh_descending(as_sym(s).values)


def spd_log(c) -> SymMatrix:
    """Matrix logarithm of an SPD matrix.

    Returns ``V @ diag(log(w)) @ V.T``; the result is symmetric but in
    general not positive-definite.

    Raises
    ------
    NotPositiveDefiniteError
        If any eigenvalue is at or below the positivity floor.
    """
    return SymMatrix._wrap(as_spd(c).log_values())


def spd_exp(s) -> SpdMatrix:
    """Matrix exponential of a symmetric matrix; the result is SPD.

    Raises
    ------
    OverflowError
        If ``exp`` of some eigenvalue exceeds the float64 range.
    NotPositiveDefiniteError
        If ``exp`` of some eigenvalue underflows below the positivity
        floor, so the result would not be numerically SPD.
    """
    s = as_sym(s)
    pair = eigh_descending(s.values)
    lam_max = float(pair.eigenvalues[0])
    if lam_max > _EXP_MAX:
        raise OverflowError(
            f"exp of eigenvalue {lam_max:.6g} exceeds the float64 range"
        )
    exp_pair = EigenPair(
        eigenvalues=np.exp(pair.eigenvalues), eigenvectors=pair.eigenvectors
    )
    # log(exp(S)) == S exactly, so seed the log cache with the input.
    return SpdMatrix._from_eig(exp_pair, log_values=s.values)


def lerm_distance(c1, c2) -> float:
    """Log-Euclidean distance: Frobenius norm of the log difference."""
    c1 = as_spd(c1)
    c2 = as_spd(c2)
    _check_same_dim(c1, c2)
    return float(np.linalg.norm(c1.log_values() - c2.log_values()))


def frobenius_distance(c1, c2) -> float:
    """Frobenius norm of the entrywise difference (Euclidean baseline)."""
    c1 = as_spd(c1)
    c2 = as_spd(c2)
    _check_same_dim(c1, c2)
    return float(np.linalg.norm(c1.values - c2.values))


def log_euclidean_mean(cs) -> SpdMatrix:
    """Closed-form log-Euclidean mean: ``exp(mean(log(C_i)))``.

    This is the point minimizing the sum of squared log-Euclidean
    distances to the inputs (see :func:`karcher_objective`).  Summands are
    accumulated in a canonical order, so the result is bitwise independent
    of the input ordering.

    Raises
    ------
    EmptyInputError
        If ``cs`` is empty.
    DimensionMismatchError
        If the matrices do not share one dimension.
    """
    mats = [as_spd(c) for c in cs]
    if not mats:
        raise EmptyInputError("cannot average an empty set of matrices")
    for m in mats[1:]:
        _check_same_dim(mats[0], m)
    if len(mats) == 1:
        return mats[0]
    logs = sorted((m.log_values() for m in mats), key=lambda a: a.tobytes())
    mean_log = np.sum(np.stack(logs), axis=0) / len(logs)
    return spd_exp(SymMatrix._wrap(0.5 * (mean_log + mean_log.T)))


def karcher_objective(c, cs) -> float:
    """Sum of squared log-Euclidean distances from ``c`` to each of ``cs``.

    Used as the optimality oracle for :func:`log_euclidean_mean`: the
    closed-form mean scores no higher than any perturbed candidate.
    """
    c = as_spd(c)
    return sum(lerm_distance(c, other) ** 2 for other in cs)


def regularize(s, epsilon: float) -> SpdMatrix:
    """Additive diagonal loading to guarantee positive-definiteness.

    Returns ``s + epsilon * I`` when the smallest eigenvalue of ``s`` is at
    or below ``epsilon``, otherwise ``s`` unchanged.  Either way the result
    passes SPD construction validation (a strongly indefinite input still
    fails: the shift is additive, never clamping).
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    s = as_sym(s)
    if isinstance(s, SpdMatrix):
        pair = s.eig
    else:
        pair = eigh_descending(s.values)
    if float(pair.eigenvalues[-1]) > epsilon:
        if isinstance(s, SpdMatrix):
            return s
        return SpdMatrix._from_eig(pair, values=s.values)
    shifted = EigenPair(
        eigenvalues=pair.eigenvalues + epsilon, eigenvectors=pair.eigenvectors
    )
    values = s.values + epsilon * np.eye(s.dim)
    return SpdMatrix._from_eig(shifted, values=values)
