"""Eigendecomposition of shifts, the graph Fourier transform and frequency order."""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from graphsp import errors
from graphsp.graph import DENSE_THRESHOLD, ShiftKind, ShiftOperator

#: cond(V) above this means the shift is treated as non-diagonalizable.
DEFECTIVE_COND = 1e10
#: Entries smaller than this are skipped when fixing eigenvector signs.
SIGN_TOL = 1e-9
#: Relative tolerance under which two frequencies compare equal.
TIE_TOL = 1e-9
#: Norm used by :func:`total_variation`.
TV_NORM = "l1"


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Eigenpairs of a shift, kept in solver order.

    ``vectors[:, k]`` pairs with ``eigenvalues[k]``; ``forward`` is the
    inverse of ``vectors`` (its transpose for symmetric shifts).
    ``ordering[j]`` is the solver index of the ``j``-th lowest frequency.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    forward: np.ndarray
    ordering: np.ndarray
    condition: float
    kind: ShiftKind
    symmetric: bool

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def frequencies(self) -> np.ndarray:
        """Eigenvalues from low to high frequency."""
        return self.eigenvalues[self.ordering]

    @property
    def ordered_vectors(self) -> np.ndarray:
        return self.vectors[:, self.ordering]


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    """Make the first entry with modulus above ``SIGN_TOL`` real positive."""
    v = v.copy()
    first = np.argmax(np.abs(v) > SIGN_TOL, axis=0)
    pivot = v[first, np.arange(v.shape[1])]
    if np.iscomplexobj(v):
        pivot = np.where(np.abs(pivot) > SIGN_TOL, pivot, 1.0)
        v *= (np.abs(pivot) / pivot)[None, :]
        # the pivot is now real positive up to rounding; pin it
        v[first, np.arange(v.shape[1])] = np.abs(v[first, np.arange(v.shape[1])])
    else:
        v *= np.where(pivot < 0, -1.0, 1.0)[None, :]
    return v


def eigendecompose(op: ShiftOperator) -> SpectralBasis:
    """Dense eigendecomposition ``S = V diag(lam) V^-1``.

    Symmetric shifts go through ``eigh`` and get an orthonormal, real
    basis.  Anything else goes through the general solver; the basis is
    rejected as :class:`~graphsp.errors.Defective` when ``cond(V)``
    exceeds ``DEFECTIVE_COND``.  Within a repeated eigenvalue the
    solver's choice of vectors is kept, so those columns are only
    determined up to a rotation of the eigenspace.
    """
    n = op.n
    if n > DENSE_THRESHOLD:
        raise errors.TooLarge(
            f"dense eigensolver is capped at {DENSE_THRESHOLD} nodes, got {n}; "
            "use Chebyshev filtering instead"
        )
    m = op.dense()
    if op.is_symmetric:
        lam, v = np.linalg.eigh(m)
        v = _canonical_sign(v)
        f = v.T.copy()
        cond = 1.0
    else:
        lam, v = np.linalg.eig(m)
        # deterministic solver order: by real part, then imaginary part
        idx = np.lexsort((np.round(lam.imag, 12), np.round(lam.real, 12)))
        lam, v = lam[idx], v[:, idx]
        v = _canonical_sign(v)
        cond = float(np.linalg.cond(v))
        if not np.isfinite(cond) or cond > DEFECTIVE_COND:
            raise errors.Defective(
                f"eigenvector matrix has condition number {cond:.3g}; the shift is "
                "not diagonalizable to working precision"
            )
        f = np.linalg.inv(v)
    for a in (lam, v, f):
        a.flags.writeable = False
    basis = SpectralBasis(
        eigenvalues=lam,
        vectors=v,
        forward=f,
        ordering=np.arange(n),
        condition=cond,
        kind=op.kind,
        symmetric=op.is_symmetric,
    )
    ordering = order_frequencies(basis, op)
    ordering.flags.writeable = False
    return SpectralBasis(
        eigenvalues=lam,
        vectors=v,
        forward=f,
        ordering=ordering,
        condition=cond,
        kind=op.kind,
        symmetric=op.is_symmetric,
    )


def _check_signal(n: int, s) -> np.ndarray:
    s = np.asarray(s)
    if s.shape[0] != n:
        raise errors.DimensionMismatch(f"signal has {s.shape[0]} entries, graph has {n} nodes")
    if not np.all(np.isfinite(s)):
        raise errors.InputError("signal entries must be finite")
    return s


def gft(basis: SpectralBasis, s) -> np.ndarray:
    """Spectral coefficients ``F @ s``, in solver order."""
    return basis.forward @ _check_signal(basis.n, s)


def igft(basis: SpectralBasis, shat) -> np.ndarray:
    """Synthesis ``V @ shat``."""
    return basis.vectors @ _check_signal(basis.n, shat)


def spectral_radius(op: ShiftOperator) -> float:
    if op.n > DENSE_THRESHOLD:
        from scipy.sparse.linalg import eigs

        vals = eigs(op.sparse.astype(np.float64), k=1, which="LM", return_eigenvectors=False)
        return float(np.abs(vals).max())
    return float(np.abs(np.linalg.eigvals(op.dense())).max())


def total_variation(op: ShiftOperator, v, lambda_max: float | None = None) -> float:
    """``||v - A v / lambda_max||_1`` for an adjacency shift ``A``.

    ``lambda_max`` is the spectral radius of ``A``; it is computed when
    not supplied.
    """
    if op.kind is not ShiftKind.ADJACENCY:
        raise errors.ShiftKindError("total variation is defined on the adjacency shift")
    v = _check_signal(op.n, v)
    if not np.any(v):
        raise errors.ZeroVector("total variation of the zero vector is undefined")
    if lambda_max is None:
        lambda_max = spectral_radius(op)
    if abs(lambda_max) < 1e-300 or not np.isfinite(lambda_max):
        raise errors.ZeroSpectralRadius("adjacency has zero spectral radius (no cycles)")
    return float(np.abs(v - (op @ v) / lambda_max).sum())


def _tolerant_cmp(a: float, b: float) -> int:
    if abs(a - b) <= TIE_TOL * max(1.0, abs(a), abs(b)):
        return 0
    return -1 if a < b else 1


def _order(primary: np.ndarray, lam: np.ndarray) -> np.ndarray:
    def cmp(i: int, j: int) -> int:
        for key in (primary, lam.real, lam.imag):
            c = _tolerant_cmp(float(key[i]), float(key[j]))
            if c:
                return c
        return (i > j) - (i < j)

    return np.array(sorted(range(lam.size), key=functools.cmp_to_key(cmp)), dtype=np.int64)


def eigenvector_variations(basis: SpectralBasis, op: ShiftOperator) -> np.ndarray:
    """Total variation of every column of ``basis.vectors``."""
    lam_max = float(np.abs(basis.eigenvalues).max()) if basis.n else 0.0
    if lam_max < 1e-300:
        raise errors.ZeroSpectralRadius("adjacency has zero spectral radius")
    v = basis.vectors
    return np.abs(v - (op @ v) / lam_max).sum(axis=0)


def order_frequencies(basis: SpectralBasis, op: ShiftOperator) -> np.ndarray:
    """Permutation of eigen-indices from lowest to highest frequency.

    Laplacian shifts order by eigenvalue.  Adjacency shifts order by the
    total variation of the eigenvector.  Ties (relative 1e-9) fall back
    to the eigenvalue's real part, then imaginary part, then index.
    """
    lam = np.asarray(basis.eigenvalues).astype(np.complex128)
    if op.kind.is_laplacian:
        return _order(lam.real, lam)
    if np.abs(lam).max() == 0.0:
        # nilpotent or edgeless: every component has the same (undefined) variation
        return _order(np.zeros(lam.size), lam)
    return _order(eigenvector_variations(basis, op), lam)


def rayleigh_quotient(op: ShiftOperator, x) -> float:
    """``x^H S x / x^H x`` for a symmetric shift ``S``."""
    if not op.is_symmetric:
        raise errors.NotSymmetric("Rayleigh quotient needs a symmetric shift")
    x = _check_signal(op.n, x)
    nrm2 = float(np.vdot(x, x).real)
    if nrm2 == 0.0:
        raise errors.ZeroVector("Rayleigh quotient of the zero vector")
    return float(np.vdot(x, op @ x).real) / nrm2
