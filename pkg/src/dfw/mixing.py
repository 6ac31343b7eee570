"""Metropolis-weight mixing matrices and consensus multiplication."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from ._power import top_eigenvalue_psd
from .topology import Graph


@dataclass(frozen=True, eq=False)
class MixingMatrix:
    """Doubly stochastic communication matrix for one round.

    ``contraction`` is the operator norm of ``w - ones/n`` (strictly below
    one for connected graphs); it is computed lazily and cached.
    """

    n: int
    w: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=float)
        if w.shape != (self.n, self.n):
            raise ValueError(f"weight matrix must be {self.n}x{self.n}, got {w.shape}")
        object.__setattr__(self, "w", w)

    @cached_property
    def contraction(self) -> float:
        return contraction_factor(self)


def metropolis_weights(g: Graph) -> MixingMatrix:
    """Metropolis weights: 1/(max(deg i, deg j) + 1) on edges, zero off
    edges, diagonal completing each row to one (hence strictly positive)."""
    n = g.n_nodes
    deg = g.degrees.astype(float)
    pair_max = np.maximum.outer(deg, deg)
    w = np.where(g.adjacency, 1.0 / (pair_max + 1.0), 0.0)
    np.fill_diagonal(w, 0.0)
    np.fill_diagonal(w, 1.0 - w.sum(axis=1))
    return MixingMatrix(n, w)


def contraction_factor(m: MixingMatrix) -> float:
    """Spectral norm of ``w - ones/n``, by power iteration on the Gram
    matrix of the deflated operator (relative tolerance 1e-10)."""
    b = m.w - 1.0 / m.n
    top = top_eigenvalue_psd(b.T @ b, rtol=1e-10, max_iters=10_000)
    return math.sqrt(max(top, 0.0))


def consensus_round(m: MixingMatrix, z: np.ndarray) -> np.ndarray:
    """One communication round: row i of the result is sum_j w[i, j] z[j].

    Preserves the column mean exactly (double stochasticity), so repeated
    rounds drive all rows toward the average.
    """
    z = np.asarray(z, dtype=float)
    if z.shape[0] != m.n:
        raise ValueError(f"state has {z.shape[0]} rows but the mixing matrix expects {m.n}")
    return m.w @ z


def multi_consensus(
    ms: Union[Iterable[MixingMatrix], Sequence[MixingMatrix]],
    z: np.ndarray,
    tau: int,
) -> np.ndarray:
    """Apply ``tau`` consensus rounds with successive matrices from ``ms``."""
    if tau < 1:
        raise ValueError("tau must be a positive integer")
    out = np.asarray(z, dtype=float)
    applied = 0
    for m in ms:
        if applied == tau:
            break
        out = consensus_round(m, out)
        applied += 1
    if applied < tau:
        raise ValueError(f"needed {tau} mixing matrices, got {applied}")
    return out
