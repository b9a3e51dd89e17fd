"""A posteriori articulation: sparse solution selection and archive statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidStateError
from .moo import ParetoArchive


@dataclass(frozen=True)
class PosteriorConfig:
    """Settings for the joint l0 + l1 sparse filter.

    ``zero_threshold`` is the magnitude below which a damage index counts as
    zero for the l0 term; 1e-3 treats a 0.1% stiffness loss as numerically
    healthy, well below any benchmark damage.
    """

    zero_threshold: float = 1e-3

    def __post_init__(self):
        if not 0.0 < self.zero_threshold:
            raise InvalidInputError(
                f"zero_threshold must be positive, got {self.zero_threshold}")


def sparsity_score(alpha: np.ndarray, config: PosteriorConfig) -> float:
    """l0 count above the zero threshold plus the l1 norm."""
    alpha = np.abs(np.asarray(alpha, dtype=float))
    return float(np.count_nonzero(alpha >= config.zero_threshold) + alpha.sum())


def sparse_select(archive: ParetoArchive,
                  config: PosteriorConfig = PosteriorConfig()) -> tuple[int, np.ndarray]:
    """Archive entry minimizing the joint l0 + l1 score.

    Ties break toward the smaller l1 norm, then toward insertion order.
    """
    if len(archive) == 0:
        raise InvalidStateError("cannot select from an empty archive")
    best = None
    for i, (alpha, _) in enumerate(archive):
        a = np.abs(alpha)
        key = (float(np.count_nonzero(a >= config.zero_threshold) + a.sum()),
               float(a.sum()), i)
        if best is None or key < best:
            best = key
    index = best[2]
    return index, archive.alphas[index].copy()


def archive_stats(archive: ParetoArchive) -> tuple[np.ndarray, np.ndarray]:
    """Per-element sample mean and variance of the archived damage vectors.

    Variance uses the N-1 divisor; a single entry reports zero variance.
    """
    if len(archive) == 0:
        raise InvalidStateError("cannot compute statistics of an empty archive")
    alphas = archive.alphas
    mean = alphas.mean(axis=0)
    if alphas.shape[0] == 1:
        return mean, np.zeros_like(mean)
    return mean, alphas.var(axis=0, ddof=1)
