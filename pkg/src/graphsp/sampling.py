"""Bandlimited signals: sampling-set selection, recovery and outlier detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from graphsp import errors
from graphsp.filtering import IdealHighPass, apply_exact
from graphsp.graph import ShiftOperator
from graphsp.spectral import SpectralBasis, _check_signal, eigendecompose

#: Ridge added to the sampled Gram matrix so early greedy steps are defined.
LOGDET_EPS = 1e-12
#: Smallest singular value below which a sampling set is not a uniqueness set.
UNIQUENESS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BandlimitedModel:
    """Signals spanned by the ``bandwidth`` lowest-frequency eigenvectors."""

    basis: SpectralBasis
    bandwidth: int

    def __post_init__(self):
        if not 1 <= self.bandwidth <= self.basis.n:
            raise errors.InputError(
                f"bandwidth must lie in [1, {self.basis.n}], got {self.bandwidth}"
            )

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def vk(self) -> np.ndarray:
        """The N x K matrix of the first K ordered eigenvectors."""
        return self.basis.vectors[:, self.basis.ordering[: self.bandwidth]]

    @property
    def band_indices(self) -> np.ndarray:
        return self.basis.ordering[: self.bandwidth]


@dataclass(frozen=True)
class SamplingSet:
    """Sorted sampled nodes plus the greedy trace that produced them.

    ``picks`` lists the nodes in the order the greedy search added them
    and ``scores`` the log-determinant reached after each pick.
    """

    nodes: tuple[int, ...]
    picks: tuple[int, ...] = ()
    scores: tuple[float, ...] = ()

    def __post_init__(self):
        nodes = tuple(sorted(int(i) for i in self.nodes))
        if not nodes:
            raise errors.InputError("sampling set must not be empty")
        if len(set(nodes)) != len(nodes):
            raise errors.InputError("sampling set has duplicate nodes")
        object.__setattr__(self, "nodes", nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)


def _check_nodes(model: BandlimitedModel, nodes) -> np.ndarray:
    idx = np.asarray(tuple(nodes), dtype=np.int64)
    if np.any((idx < 0) | (idx >= model.n)):
        raise errors.IndexOutOfRange(f"sampled node outside [0, {model.n})")
    return idx


def _candidate_logdets(vk: np.ndarray, picks: list[int]) -> np.ndarray:
    """``log det(eps I_K + W^H W)`` for ``W`` = picked rows plus each candidate row.

    With r <= K rows the K x K determinant equals ``eps^(K-r)`` times the
    r x r row Gram determinant; the small form avoids the 1/eps
    conditioning of the ridge during the rank-deficient steps.
    """
    n, k = vk.shape
    r = len(picks) + 1
    if r > k:
        base = LOGDET_EPS * np.eye(k, dtype=vk.dtype) + vk[picks].conj().T @ vk[picks]
        _, out = np.linalg.slogdet(base[None] + np.einsum("ni,nj->nij", vk.conj(), vk))
        return out
    w = np.broadcast_to(vk[picks], (n, r - 1, k))
    w = np.concatenate([w, vk[:, None, :]], axis=1)
    gram = w @ w.conj().transpose(0, 2, 1) + LOGDET_EPS * np.eye(r)
    _, out = np.linalg.slogdet(gram)
    return out + (k - r) * np.log(LOGDET_EPS)


def greedy_select(model: BandlimitedModel, m: int) -> SamplingSet:
    """Greedy D-optimal sampling set of size ``m``.

    Each step adds the node maximizing
    ``log det(V_K[S]^H V_K[S] + eps I)``; near-ties (relative 1e-9) go to
    the lowest node index.
    """
    k, n = model.bandwidth, model.n
    if m < k:
        raise errors.TooFewSamples(f"need at least K={k} samples, got m={m}")
    if m > n:
        raise errors.TooManySamples(f"cannot pick {m} of {n} nodes")
    vk = model.vk
    chosen = np.zeros(n, dtype=bool)
    picks: list[int] = []
    scores: list[float] = []
    for _ in range(m):
        logdet = _candidate_logdets(vk, picks)
        logdet[chosen] = -np.inf
        best = logdet.max()
        tie = logdet >= best - 1e-9 * max(1.0, abs(best))
        pick = int(np.flatnonzero(tie)[0])
        chosen[pick] = True
        picks.append(pick)
        scores.append(float(logdet[pick]))
    return SamplingSet(tuple(picks), tuple(picks), tuple(scores))


def sampled_singular_min(model: BandlimitedModel, nodes) -> float:
    """Smallest singular value of ``V_K`` restricted to ``nodes`` (0 if rank-deficient by shape)."""
    idx = _check_nodes(model, nodes)
    if idx.size < model.bandwidth:
        return 0.0
    return float(np.linalg.svd(model.vk[idx], compute_uv=False)[-1])


def uniqueness_check(model: BandlimitedModel, sset: SamplingSet) -> bool:
    """Whether samples on ``sset`` determine every bandlimited signal."""
    return sampled_singular_min(model, sset.nodes) > UNIQUENESS_TOL


def reconstruct(model: BandlimitedModel, sset: SamplingSet, samples) -> np.ndarray:
    """Least-squares bandlimited signal matching ``samples`` on ``sset``.

    ``samples[j]`` is the value observed at ``sset.nodes[j]``.  Exact for
    noiseless in-band signals; otherwise the sample-domain residual is
    minimized over the model span.
    """
    y = np.asarray(samples)
    if y.ndim != 1 or y.size != len(sset):
        raise errors.DimensionMismatch(f"{y.size} samples for {len(sset)} sampled nodes")
    if not uniqueness_check(model, sset):
        raise errors.NotUnique(
            "sampled eigenvector block is rank deficient; the set does not determine the signal"
        )
    idx = _check_nodes(model, sset.nodes)
    coef, *_ = np.linalg.lstsq(model.vk[idx], y, rcond=None)
    out = model.vk @ coef
    if np.iscomplexobj(out) and not np.iscomplexobj(y):
        if np.abs(out.imag).max(initial=0.0) <= 1e-8 * max(1.0, np.abs(out).max(initial=0.0)):
            out = out.real.copy()
    return out


def random_bandlimited(model: BandlimitedModel, seed: int) -> np.ndarray:
    """``V_K c`` with ``c`` i.i.d. standard normal from ``default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    return model.vk @ rng.standard_normal(model.bandwidth)


def detect_outliers(
    op: ShiftOperator,
    s,
    cutoff: float,
    threshold: float,
    basis: SpectralBasis | None = None,
) -> tuple[int, ...]:
    """Nodes whose ideal high-pass residual exceeds ``threshold`` standard deviations.

    The residual keeps the frequencies above ``cutoff``.  A residual that
    vanishes to rounding (relative 1e-10) flags nothing.
    """
    if not op.is_symmetric:
        raise errors.NotSymmetric("outlier detection needs a symmetric shift")
    if not threshold > 0:
        raise errors.InputError(f"threshold must be positive, got {threshold}")
    s = _check_signal(op.n, s)
    if basis is None:
        basis = eigendecompose(op)
    r = np.real(apply_exact(basis, IdealHighPass(cutoff), s))
    if not np.isfinite(threshold):
        return ()
    scale = max(float(np.linalg.norm(s)), 1e-300)
    if np.linalg.norm(r) <= 1e-10 * scale:
        return ()
    sigma = float(np.std(r))
    return tuple(int(i) for i in np.flatnonzero(np.abs(r) > threshold * sigma))
