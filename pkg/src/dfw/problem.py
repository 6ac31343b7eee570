"""Feasible sets with exact linear minimization, and least-squares node objectives.

The network objective is F(x) = (1/N) sum_i f_i(x) with
f_i(x) = 0.5 * ||y_i - A_i x||^2; its smoothness constant is the largest
eigenvalue of any A_i^T A_i.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from ._power import top_eigenvalue_psd

_SMOOTHNESS_RTOL = 1e-8


def _check_gradient(g: np.ndarray, dim: int) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.shape != (dim,):
        raise ValueError(f"gradient must have shape ({dim},), got {g.shape}")
    if not np.isfinite(g).all():
        raise ValueError("gradient has non-finite entries")
    return g


@dataclass(frozen=True)
class L1Ball:
    """{x : ||x||_1 <= radius}. Vertices are +-radius * e_k."""

    radius: float
    dim: int

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    def lmo(self, g: np.ndarray) -> np.ndarray:
        """Vertex minimizing <g, v>: step against the largest-magnitude
        gradient coordinate (smallest index on ties, sign(0) taken as +1)."""
        g = _check_gradient(g, self.dim)
        k = int(np.argmax(np.abs(g)))
        v = np.zeros(self.dim)
        v[k] = -self.radius if g[k] >= 0 else self.radius
        return v

    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and float(np.abs(x).sum()) <= self.radius + tol

    def initial_point(self) -> np.ndarray:
        return np.zeros(self.dim)


@dataclass(frozen=True)
class Simplex:
    """{x >= 0 : sum x = scale}. Vertices are scale * e_k."""

    scale: float
    dim: int

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    def lmo(self, g: np.ndarray) -> np.ndarray:
        g = _check_gradient(g, self.dim)
        k = int(np.argmin(g))
        v = np.zeros(self.dim)
        v[k] = self.scale
        return v

    def diameter(self) -> float:
        return self.scale * np.sqrt(2.0)

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return (
            x.shape == (self.dim,)
            and bool((x >= -tol).all())
            and abs(float(x.sum()) - self.scale) <= tol
        )

    def initial_point(self) -> np.ndarray:
        return np.full(self.dim, self.scale / self.dim)


@dataclass(frozen=True, eq=False)
class Box:
    """{x : lower <= x <= upper} coordinate-wise."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("bounds must be 1-D arrays of equal length")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ValueError("bounds must be finite")
        if (lower > upper).any():
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def lmo(self, g: np.ndarray) -> np.ndarray:
        g = _check_gradient(g, self.dim)
        return np.where(g >= 0, self.lower, self.upper)

    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return (
            x.shape == (self.dim,)
            and bool((x >= self.lower - tol).all())
            and bool((x <= self.upper + tol).all())
        )

    def initial_point(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)


FeasibleSet = Union[L1Ball, Simplex, Box]


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Per-node least-squares blocks over a shared feasible set.

    ``a_blocks`` has shape (n_nodes, rows, dim) and ``y_blocks`` shape
    (n_nodes, rows); all nodes carry the same number of rows.
    ``smoothness`` upper-bounds every block's largest A_i^T A_i eigenvalue.
    """

    a_blocks: np.ndarray
    y_blocks: np.ndarray
    feasible_set: FeasibleSet
    smoothness: float
    x_true: Optional[np.ndarray] = None

    @staticmethod
    def from_blocks(
        a_blocks: Sequence[np.ndarray],
        y_blocks: Sequence[np.ndarray],
        feasible_set: FeasibleSet,
        x_true: Optional[np.ndarray] = None,
    ) -> "ProblemInstance":
        a = np.asarray(a_blocks, dtype=float)
        y = np.asarray(y_blocks, dtype=float)
        if a.ndim != 3:
            raise ValueError("a_blocks must stack to (n_nodes, rows, dim); rows must match across nodes")
        if y.shape != a.shape[:2]:
            raise ValueError(f"y_blocks shape {y.shape} does not match a_blocks {a.shape[:2]}")
        if a.shape[2] != feasible_set.dim:
            raise ValueError("feasible set dimension does not match the data")
        return ProblemInstance(
            a_blocks=a,
            y_blocks=y,
            feasible_set=feasible_set,
            smoothness=smoothness_constant(a),
            x_true=None if x_true is None else np.asarray(x_true, dtype=float),
        )

    @property
    def n_nodes(self) -> int:
        return self.a_blocks.shape[0]

    @property
    def rows_per_node(self) -> int:
        return self.a_blocks.shape[1]

    @property
    def dim(self) -> int:
        return self.a_blocks.shape[2]

    @cached_property
    def _a_stack(self) -> np.ndarray:
        return self.a_blocks.reshape(-1, self.dim)

    @cached_property
    def _y_stack(self) -> np.ndarray:
        return self.y_blocks.reshape(-1)

    def _check_point(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"point must have shape ({self.dim},), got {x.shape}")
        return x

    def local_objective(self, i: int, x: np.ndarray) -> float:
        x = self._check_point(x)
        r = self.a_blocks[i] @ x - self.y_blocks[i]
        return 0.5 * float(r @ r)

    def local_grad(self, i: int, x: np.ndarray) -> np.ndarray:
        """Gradient of node i's objective: A_i^T (A_i x - y_i)."""
        if not 0 <= i < self.n_nodes:
            raise ValueError(f"node index {i} out of range for {self.n_nodes} nodes")
        x = self._check_point(x)
        a = self.a_blocks[i]
        return a.T @ (a @ x - self.y_blocks[i])

    def grads_at(self, points: np.ndarray) -> np.ndarray:
        """Per-node gradients, node i evaluated at points[i]. Shape (N, d)."""
        points = np.asarray(points, dtype=float)
        if points.shape != (self.n_nodes, self.dim):
            raise ValueError(f"expected ({self.n_nodes}, {self.dim}) points, got {points.shape}")
        residuals = np.einsum("nmd,nd->nm", self.a_blocks, points) - self.y_blocks
        return np.einsum("nmd,nm->nd", self.a_blocks, residuals)

    def global_objective(self, x: np.ndarray) -> float:
        x = self._check_point(x)
        r = self._a_stack @ x - self._y_stack
        return 0.5 / self.n_nodes * float(r @ r)

    def global_grad(self, x: np.ndarray) -> np.ndarray:
        x = self._check_point(x)
        r = self._a_stack @ x - self._y_stack
        return self._a_stack.T @ r / self.n_nodes

    def curvature_along(self, d: np.ndarray) -> float:
        """(1/N) sum_i ||A_i d||^2, the exact quadratic term along d."""
        r = self._a_stack @ np.asarray(d, dtype=float)
        return float(r @ r) / self.n_nodes


def smoothness_constant(blocks: Union[ProblemInstance, np.ndarray]) -> float:
    """max_i lambda_max(A_i^T A_i), each block by power iteration."""
    a = blocks.a_blocks if isinstance(blocks, ProblemInstance) else np.asarray(blocks, dtype=float)
    return max(
        top_eigenvalue_psd(block.T @ block, rtol=_SMOOTHNESS_RTOL, max_iters=10_000)
        for block in a
    )


def lasso_instance(
    n_nodes: int,
    dim: int,
    rows_per_node: int,
    radius: float,
    noise_std: float,
    rng: np.random.Generator,
) -> ProblemInstance:
    """Constrained LASSO with a planted sparse signal.

    The ground truth has ||x||_1 = radius / 2 (strictly feasible), design
    blocks are standard normal, and observations carry Gaussian noise of
    the given standard deviation. With zero noise the global minimum of
    the network objective is 0 at the planted signal.
    """
    if min(n_nodes, dim, rows_per_node) < 1:
        raise ValueError("sizes must be positive")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if noise_std < 0:
        raise ValueError("noise level must be nonnegative")
    sparsity = max(1, dim // 10)
    support = rng.choice(dim, size=sparsity, replace=False)
    values = rng.standard_normal(sparsity)
    values *= (radius / 2.0) / np.abs(values).sum()
    x_true = np.zeros(dim)
    x_true[support] = values
    a = rng.standard_normal((n_nodes, rows_per_node, dim))
    noise = rng.standard_normal((n_nodes, rows_per_node))
    y = np.einsum("nmd,d->nm", a, x_true) + noise_std * noise
    return ProblemInstance.from_blocks(a, y, L1Ball(radius, dim), x_true=x_true)


def save_instance(inst: ProblemInstance, directory: Union[str, Path]) -> None:
    """Write a replayable text dump: JSON header plus per-node CSV blocks."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    header = {
        "n_nodes": inst.n_nodes,
        "rows_per_node": inst.rows_per_node,
        "dim": inst.dim,
        "feasible_set": _set_to_json(inst.feasible_set),
        "smoothness": inst.smoothness,
        "has_x_true": inst.x_true is not None,
    }
    (directory / "header.json").write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
    for i in range(inst.n_nodes):
        np.savetxt(directory / f"node_{i:03d}_A.csv", inst.a_blocks[i], fmt="%.17g", delimiter=",")
        np.savetxt(directory / f"node_{i:03d}_y.csv", inst.y_blocks[i], fmt="%.17g", delimiter=",")
    if inst.x_true is not None:
        np.savetxt(directory / "x_true.csv", inst.x_true, fmt="%.17g", delimiter=",")


def load_instance(directory: Union[str, Path]) -> ProblemInstance:
    directory = Path(directory)
    header = json.loads((directory / "header.json").read_text())
    n, rows, dim = header["n_nodes"], header["rows_per_node"], header["dim"]
    a = np.empty((n, rows, dim))
    y = np.empty((n, rows))
    for i in range(n):
        a[i] = np.loadtxt(directory / f"node_{i:03d}_A.csv", delimiter=",").reshape(rows, dim)
        y[i] = np.loadtxt(directory / f"node_{i:03d}_y.csv", delimiter=",").reshape(rows)
    x_true = None
    if header.get("has_x_true"):
        x_true = np.loadtxt(directory / "x_true.csv", delimiter=",").reshape(dim)
    return ProblemInstance.from_blocks(a, y, _set_from_json(header["feasible_set"]), x_true=x_true)


def _set_to_json(s: FeasibleSet) -> dict:
    if isinstance(s, L1Ball):
        return {"kind": "l1_ball", "radius": s.radius, "dim": s.dim}
    if isinstance(s, Simplex):
        return {"kind": "simplex", "scale": s.scale, "dim": s.dim}
    return {"kind": "box", "lower": s.lower.tolist(), "upper": s.upper.tolist()}


def _set_from_json(d: dict) -> FeasibleSet:
    kind = d["kind"]
    if kind == "l1_ball":
        return L1Ball(d["radius"], d["dim"])
    if kind == "simplex":
        return Simplex(d["scale"], d["dim"])
    if kind == "box":
        return Box(np.asarray(d["lower"]), np.asarray(d["upper"]))
    raise ValueError(f"unknown feasible set kind {kind!r}")
