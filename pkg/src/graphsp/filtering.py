"""Graph filters: frequency responses and three ways to apply them.

* :func:`apply_exact` goes through the eigenbasis (GFT, pointwise gain,
  inverse GFT).
* :func:`apply_polynomial` evaluates ``sum_m h_m S^m s`` with Horner's
  rule, one mat-vec per degree.
* :func:`chebyshev_apply` evaluates a truncated Chebyshev series of the
  response on the shifted operator; it needs mat-vecs only and scales to
  graphs far beyond the dense eigensolver.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial import polynomial as poly

from graphsp import errors
from graphsp.graph import ShiftKind, ShiftOperator
from graphsp.spectral import SpectralBasis, _check_signal, eigendecompose

#: Eigenvalues within this distance of an ideal cutoff count as pass band.
CUTOFF_TOL = 1e-9
#: Slack when testing eigenvalues against a kernel's interval.
DOMAIN_TOL = 1e-9
#: Chebyshev coefficients are always computed with at least this many nodes.
MIN_QUADRATURE_POINTS = 64

_INF = math.inf


@dataclass(frozen=True)
class FilterKernel:
    """Scalar frequency response ``h(lambda)`` valid on ``interval``.

    ``analytic`` kernels (polynomial, heat) may be evaluated at complex
    eigenvalues; the others are only meaningful on a real spectrum.
    """

    interval: tuple[float, float] = field(default=(-_INF, _INF), kw_only=True)

    analytic = False
    real_coefficients = True

    def __post_init__(self):
        lo, hi = self.interval
        if not lo <= hi:
            raise errors.InvalidKernel(f"empty interval {self.interval}")

    def response(self, lam: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, lam):
        lam = np.asarray(lam)
        if np.iscomplexobj(lam):
            if np.all(np.abs(lam.imag) <= DOMAIN_TOL * np.maximum(1.0, np.abs(lam))):
                lam = lam.real
            elif not self.analytic:
                raise errors.KernelDomain(
                    f"{type(self).__name__} is only defined on real spectra; "
                    "use a symmetric shift"
                )
        self.check_domain(lam)
        return self.response(lam)

    def check_domain(self, lam: np.ndarray) -> None:
        lo, hi = self.interval
        re = np.real(lam)
        slack = DOMAIN_TOL * np.maximum(1.0, np.abs(re))
        outside = (re < lo - slack) | (re > hi + slack)
        if np.any(outside):
            bad = re[outside][0]
            raise errors.KernelDomain(
                f"eigenvalue {bad:.6g} lies outside the kernel interval [{lo}, {hi}]"
            )

    def to_dict(self) -> dict:
        raise NotImplementedError


def _check_cutoff(cutoff: float, interval: tuple[float, float]) -> None:
    if not (np.isfinite(cutoff) and interval[0] <= cutoff <= interval[1]):
        raise errors.InvalidKernel(f"cutoff {cutoff} outside interval {interval}")


@dataclass(frozen=True)
class IdealLowPass(FilterKernel):
    """Unit gain for ``lambda <= cutoff``, zero above.

    Boundary eigenvalues (within ``CUTOFF_TOL``) belong to the low band,
    so a low-pass and a high-pass at the same cutoff add up to identity.
    """

    cutoff: float

    def __post_init__(self):
        super().__post_init__()
        _check_cutoff(self.cutoff, self.interval)

    def response(self, lam):
        return (np.real(lam) <= self.cutoff + CUTOFF_TOL).astype(np.float64)

    def to_dict(self):
        return {"kind": "lowpass", "cutoff": self.cutoff}


@dataclass(frozen=True)
class IdealHighPass(FilterKernel):
    """Complement of :class:`IdealLowPass` at the same cutoff."""

    cutoff: float

    def __post_init__(self):
        super().__post_init__()
        _check_cutoff(self.cutoff, self.interval)

    def response(self, lam):
        return (np.real(lam) > self.cutoff + CUTOFF_TOL).astype(np.float64)

    def to_dict(self):
        return {"kind": "highpass", "cutoff": self.cutoff}


@dataclass(frozen=True)
class Heat(FilterKernel):
    """``exp(-t * lambda)``."""

    t: float
    analytic = True

    def __post_init__(self):
        super().__post_init__()
        if not (np.isfinite(self.t) and self.t >= 0):
            raise errors.InvalidKernel(f"heat scale must be >= 0, got {self.t}")

    def response(self, lam):
        return np.exp(-self.t * lam)

    def to_dict(self):
        return {"kind": "heat", "t": self.t}


@dataclass(frozen=True)
class Tikhonov(FilterKernel):
    """Smoothness-prior denoiser ``1 / (1 + gamma * lambda)``.

    This is the closed-form minimizer of ``||x - s||^2 + gamma x^T L x``;
    it is meant for Laplacian shifts, hence the default interval
    ``[0, inf)``.
    """

    gamma: float
    interval: tuple[float, float] = field(default=(0.0, _INF), kw_only=True)

    def __post_init__(self):
        super().__post_init__()
        if not (np.isfinite(self.gamma) and self.gamma >= 0):
            raise errors.InvalidKernel(f"gamma must be >= 0, got {self.gamma}")
        if self.gamma > 0 and self.interval[0] <= -1.0 / self.gamma:
            raise errors.InvalidKernel("interval contains the pole at -1/gamma")

    def response(self, lam):
        return 1.0 / (1.0 + self.gamma * lam)

    def to_dict(self):
        return {"kind": "tikhonov", "gamma": self.gamma}


@dataclass(frozen=True)
class Polynomial(FilterKernel):
    """``sum_m coefficients[m] * lambda**m``."""

    coefficients: tuple[float, ...]
    analytic = True

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        super().__post_init__()
        if len(self.coefficients) == 0:
            raise errors.InvalidKernel("polynomial needs at least one coefficient")
        if not all(np.isfinite(c) for c in self.coefficients):
            raise errors.InvalidKernel("polynomial coefficients must be finite")

    @property
    def real_coefficients(self):
        return not any(np.iscomplexobj(c) for c in self.coefficients)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def response(self, lam):
        return poly.polyval(lam, np.asarray(self.coefficients))

    def to_dict(self):
        return {"kind": "polynomial", "coefficients": [float(c) for c in self.coefficients]}


@dataclass(frozen=True)
class Custom(FilterKernel):
    """Tabulated ``(lambda, gain)`` pairs, linearly interpolated.

    The interval defaults to the tabulated range.
    """

    points: tuple[tuple[float, float], ...]
    interval: tuple[float, float] | None = field(default=None, kw_only=True)

    def __post_init__(self):
        pts = tuple((float(a), float(b)) for a, b in self.points)
        if len(pts) < 2:
            raise errors.InvalidKernel("custom kernel needs at least two points")
        xs = [p[0] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise errors.InvalidKernel("custom kernel abscissae must be strictly increasing")
        object.__setattr__(self, "points", pts)
        if self.interval is None:
            object.__setattr__(self, "interval", (xs[0], xs[-1]))
        super().__post_init__()

    def response(self, lam):
        xs, ys = zip(*self.points)
        return np.interp(lam, xs, ys)

    def to_dict(self):
        return {"kind": "custom", "points": [list(p) for p in self.points]}


def identity_kernel() -> Polynomial:
    return Polynomial((1.0,))


_KINDS: dict[str, Callable[[dict], FilterKernel]] = {
    "identity": lambda d: identity_kernel(),
    "lowpass": lambda d: IdealLowPass(float(d["cutoff"])),
    "highpass": lambda d: IdealHighPass(float(d["cutoff"])),
    "heat": lambda d: Heat(float(d["t"])),
    "tikhonov": lambda d: Tikhonov(float(d["gamma"])),
    "polynomial": lambda d: Polynomial(tuple(float(c) for c in d["coefficients"])),
    "custom": lambda d: Custom(tuple(tuple(p) for p in d["points"])),
}


def kernel_from_dict(d: dict) -> FilterKernel:
    """Parse a filter specification such as ``{"kind": "heat", "t": 1.0}``."""
    if not isinstance(d, dict) or "kind" not in d:
        raise errors.InvalidKernel("filter spec must be an object with a 'kind' field")
    kind = str(d["kind"]).lower()
    if kind not in _KINDS:
        raise errors.InvalidKernel(f"unknown filter kind {d['kind']!r}; expected one of {sorted(_KINDS)}")
    try:
        kernel = _KINDS[kind](d)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, errors.GSPError):
            raise
        raise errors.InvalidKernel(f"bad parameters for {kind} filter: {exc}") from exc
    if "interval" in d:
        lo, hi = (float(x) for x in d["interval"])
        kernel = type(kernel)(**{**kernel.__dict__, "interval": (lo, hi)})
    return kernel


def kernel_from_json(text: str) -> FilterKernel:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise errors.InvalidKernel(f"filter spec is not valid JSON: {exc}") from exc
    return kernel_from_dict(d)


def _maybe_real(out: np.ndarray, s: np.ndarray, real_map: bool) -> np.ndarray:
    # a real-coefficient filter of a real shift maps real signals to real signals
    if np.iscomplexobj(out) and real_map and not np.iscomplexobj(s):
        scale = max(1.0, float(np.abs(out).max(initial=0.0)))
        if np.abs(out.imag).max(initial=0.0) <= 1e-8 * scale:
            return out.real.copy()
    return out


def frequency_response(basis: SpectralBasis, kernel: FilterKernel) -> np.ndarray:
    """``h(lambda_k)`` for every eigenvalue, in solver order."""
    if isinstance(kernel, Polynomial) and len(kernel.coefficients) > basis.n:
        raise errors.DegreeTooHigh(
            f"{len(kernel.coefficients)} coefficients exceed the {basis.n} allowed for N={basis.n}"
        )
    return kernel(basis.eigenvalues)


def apply_exact(basis: SpectralBasis, kernel: FilterKernel, s) -> np.ndarray:
    """``V diag(h(lambda)) F s``: transform, scale each coefficient, invert."""
    s = _check_signal(basis.n, s)
    h = frequency_response(basis, kernel)
    shat = basis.forward @ s
    shat = h * shat if shat.ndim == 1 else h[:, None] * shat
    out = basis.vectors @ shat
    return _maybe_real(out, s, kernel.real_coefficients)


def filter_matrix(basis: SpectralBasis, kernel: FilterKernel) -> np.ndarray:
    """Dense ``H = V diag(h(lambda)) F``."""
    h = frequency_response(basis, kernel)
    return (basis.vectors * h[None, :]) @ basis.forward


def apply_polynomial(op: ShiftOperator, coeffs: Sequence[float], s) -> np.ndarray:
    """``sum_m coeffs[m] S^m s`` by Horner's rule: M mat-vecs, no matrix powers."""
    coeffs = np.asarray(coeffs)
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise errors.InvalidKernel("need a non-empty 1-D coefficient sequence")
    if coeffs.size > op.n:
        raise errors.DegreeTooHigh(
            f"degree {coeffs.size - 1} exceeds N-1={op.n - 1}; reduce it via Cayley-Hamilton"
        )
    s = _check_signal(op.n, s)
    out = coeffs[-1] * s
    for c in coeffs[-2::-1]:
        out = op @ out + c * s
    return np.asarray(out)


def polynomial_matrix(op: ShiftOperator, coeffs: Sequence[float]) -> np.ndarray:
    """Dense matrix ``h(S)``; for tests and small graphs only."""
    m = op.dense()
    out = np.zeros_like(m, dtype=np.result_type(m, np.asarray(coeffs)))
    for c in np.asarray(coeffs)[::-1]:
        out = m @ out + c * np.eye(op.n)
    return out


@dataclass(frozen=True)
class ChebyshevFilter:
    """Truncated Chebyshev series of a response on ``[0, lambda_ub]``.

    ``coefficients[k]`` multiplies ``T_k(2 lambda / lambda_ub - 1)``; the
    zeroth coefficient is already halved.
    """

    coefficients: np.ndarray
    lambda_ub: float

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.float64)
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise errors.InvalidKernel("Chebyshev coefficients must be a finite, non-empty vector")
        if not (np.isfinite(self.lambda_ub) and self.lambda_ub > 0):
            raise errors.InvalidInterval(f"lambda_ub must be positive, got {self.lambda_ub}")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, lam):
        """The polynomial response this series actually realizes."""
        x = 2.0 * np.asarray(lam, dtype=np.float64) / self.lambda_ub - 1.0
        return cheb.chebval(x, self.coefficients)

    def to_csv(self) -> str:
        lines = ["k,c_k"] + [f"{k},{float(c)!r}" for k, c in enumerate(self.coefficients)]
        return "\n".join(lines) + "\n"


def chebyshev_fit(kernel: FilterKernel | Callable, degree: int, lambda_ub: float) -> ChebyshevFilter:
    """Chebyshev coefficients of ``kernel`` on ``[0, lambda_ub]``.

    Uses Chebyshev-Gauss quadrature on ``max(degree + 1, 64)`` nodes, which
    is exact for polynomials of degree up to ``degree``.
    """
    if not (np.isfinite(lambda_ub) and lambda_ub > 0):
        raise errors.InvalidInterval(f"lambda_ub must be positive, got {lambda_ub}")
    if degree < 0:
        raise errors.InvalidInterval(f"degree must be >= 0, got {degree}")
    if isinstance(kernel, FilterKernel):
        lo, hi = kernel.interval
        if lo > 0 + DOMAIN_TOL or hi < lambda_ub - DOMAIN_TOL * max(1.0, lambda_ub):
            raise errors.InvalidInterval(
                f"kernel interval [{lo}, {hi}] does not cover [0, {lambda_ub}]"
            )
    q = max(degree + 1, MIN_QUADRATURE_POINTS)
    theta = np.pi * (np.arange(q) + 0.5) / q
    lam = (np.cos(theta) + 1.0) * (lambda_ub / 2.0)
    h = np.asarray(kernel(lam), dtype=np.float64)
    k = np.arange(degree + 1)
    c = (2.0 / q) * (np.cos(np.outer(k, theta)) @ h)
    c[0] /= 2.0
    return ChebyshevFilter(c, float(lambda_ub))


def power_iteration(
    op: ShiftOperator, seed: int = 0, max_iter: int = 1000, tol: float = 1e-9
) -> float:
    """Largest eigenvalue of a symmetric positive semidefinite shift.

    Returns the Rayleigh quotient of the last iterate, which never
    exceeds the true value.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.n)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = op @ x
        lam_new = float(x @ y)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        if abs(lam_new - lam) <= tol * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
    return lam


def spectral_upper_bound(op: ShiftOperator, seed: int = 0) -> float:
    """Interval end used to shift the operator for Chebyshev filtering.

    Exactly 2 for the normalized Laplacian, otherwise the power-iteration
    estimate inflated by 1%.
    """
    if op.kind is ShiftKind.NORMALIZED:
        return 2.0
    est = power_iteration(op, seed=seed)
    return 1.01 * est if est > 0 else 1.0


def _gershgorin(op: ShiftOperator) -> tuple[float, float]:
    m = op.sparse
    diag = m.diagonal()
    radius = np.asarray(abs(m).sum(axis=1)).ravel() - np.abs(diag)
    return float((diag - radius).min()), float((diag + radius).max())


def _check_spectrum(op: ShiftOperator, lambda_ub: float, seed: int) -> None:
    if not op.is_symmetric:
        raise errors.NotSymmetric("Chebyshev filtering needs a symmetric shift")
    lo, hi = _gershgorin(op)
    slack = 1e-9 * max(1.0, lambda_ub)
    if lo < -slack:
        raise errors.SpectrumExceedsBound(
            "cannot certify a nonnegative spectrum (Gershgorin lower bound "
            f"{lo:.3g}); use a Laplacian shift"
        )
    if hi <= lambda_ub + slack:
        return
    est = power_iteration(op, seed=seed)
    if est > lambda_ub + slack:
        raise errors.SpectrumExceedsBound(
            f"largest eigenvalue ~{est:.6g} exceeds the Chebyshev bound {lambda_ub:.6g}"
        )


def _chebyshev_recurrence(matvec: Callable, coeffs: np.ndarray, lambda_ub: float, s: np.ndarray):
    # T_0 = s, T_1 = X s, T_k = 2 X T_{k-1} - T_{k-2} with X = (2/ub) S - I
    a = 2.0 / lambda_ub
    t_prev = s
    out = coeffs[0] * s
    if coeffs.size == 1:
        return out
    t_cur = a * matvec(s) - s
    out = out + coeffs[1] * t_cur
    for c in coeffs[2:]:
        t_next = 2.0 * (a * matvec(t_cur) - t_cur) - t_prev
        out = out + c * t_next
        t_prev, t_cur = t_cur, t_next
    return out


def chebyshev_apply(op: ShiftOperator, f: ChebyshevFilter, s, seed: int = 0) -> np.ndarray:
    """Apply a fitted Chebyshev filter with exactly ``f.degree`` mat-vecs.

    The shift must be symmetric with spectrum inside ``[0, f.lambda_ub]``;
    ``seed`` only feeds the power iteration used to check that bound when
    Gershgorin's disc bound is not tight enough.
    """
    s = _check_signal(op.n, s)
    _check_spectrum(op, f.lambda_ub, seed)
    m = op.sparse
    return np.asarray(_chebyshev_recurrence(m.dot, f.coefficients, f.lambda_ub, s))


KernelLike = Union[FilterKernel, ChebyshevFilter]


def impulse_response(
    op: ShiftOperator, kernel: KernelLike, i: int, basis: SpectralBasis | None = None
) -> np.ndarray:
    """Filter output for the unit impulse at node ``i``.

    Chebyshev filters and polynomial kernels are evaluated in the vertex
    domain, so a degree-K filter is supported on the K-hop ball around
    ``i``.  Other kernels go through the eigenbasis.
    """
    if not (0 <= int(i) < op.n) or int(i) != i:
        raise errors.IndexOutOfRange(f"node {i} outside [0, {op.n})")
    e = np.zeros(op.n)
    e[int(i)] = 1.0
    if isinstance(kernel, ChebyshevFilter):
        return chebyshev_apply(op, kernel, e)
    if isinstance(kernel, Polynomial):
        return apply_polynomial(op, kernel.coefficients, e)
    if basis is None:
        basis = eigendecompose(op)
    return apply_exact(basis, kernel, e)


def check_shift_invariance(op: ShiftOperator, h, tol: float = 1e-10) -> bool:
    """True when ``||S H - H S||_F <= tol ||S||_F ||H||_F``."""
    m = op.dense()
    h = np.asarray(h.toarray() if hasattr(h, "toarray") else h)
    if h.shape != m.shape:
        raise errors.DimensionMismatch(f"filter matrix {h.shape} vs shift {m.shape}")
    comm = np.linalg.norm(m @ h - h @ m)
    return bool(comm <= tol * np.linalg.norm(m) * np.linalg.norm(h))
