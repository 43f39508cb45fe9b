"""Greedy set designs, junta embeddings and orthogonal resilient families.

An (n, k, d)-design is a family of k-subsets of [n] with pairwise
intersections of size at most d.  Embedding a d-resilient function on k
variables along the sets of such a design yields pairwise exactly
orthogonal functions: a monomial contributing to both embedded spectra
would have to live inside an intersection of size <= d, where all
coefficients vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .hypercube import (
    BooleanFunction,
    BoundedFunction,
    CubeFunction,
)
from .amplify import resilience_order

MAX_CANDIDATES = 2_000_000
MAX_AMBIENT_DIM = 22


class OrthogonalityError(RuntimeError):
    pass


@dataclass(frozen=True)
class Design:
    n: int
    k: int
    d: int
    sets: tuple[int, ...]  # subset masks, each of popcount k

    def __post_init__(self):
        for mask in self.sets:
            if int(mask).bit_count() != self.k:
                raise ValueError(f"design set {mask:#x} is not a {self.k}-subset")
        for a, b in combinations(self.sets, 2):
            if (a & b).bit_count() > self.d:
                raise ValueError(
                    f"design sets {a:#x} and {b:#x} intersect in more than {self.d}"
                )

    @property
    def size(self) -> int:
        return len(self.sets)

    def index_lists(self) -> list[list[int]]:
        """Sets as sorted 1-based coordinate lists (serialization form)."""
        return [
            [j + 1 for j in range(self.n) if mask >> j & 1] for mask in self.sets
        ]


def design_size_bound(n: int, k: int, d: int) -> float:
    """Greedy/probabilistic lower bound (n d / (e^2 k^2))^d on the max design."""
    if d < 1:
        raise ValueError("the size bound applies for d >= 1")
    return (n * d / (math.e**2 * k**2)) ** d


def greedy_design(n: int, k: int, d: int, order: str = "lex", seed: int | None = None) -> Design:
    """Greedy design construction over all k-subsets of [n].

    `order` is "lex" (deterministic) or "random" (seeded shuffle for size
    experiments).  The result is re-verified pairwise-exhaustively and, for
    d >= 1, checked against the greedy size bound when that bound is >= 1.
    """
    if not 0 <= d < k <= n:
        raise ValueError("need 0 <= d < k <= n")
    if math.comb(n, k) > MAX_CANDIDATES:
        raise ValueError(f"candidate space C({n},{k}) exceeds {MAX_CANDIDATES}")
    candidates = [sum(1 << (j - 1) for j in combo) for combo in combinations(range(1, n + 1), k)]
    if order == "random":
        if seed is None:
            raise ValueError("random order requires a seed")
        rng = np.random.default_rng(seed)
        candidates = [candidates[i] for i in rng.permutation(len(candidates))]
    elif order != "lex":
        raise ValueError(f"unknown order {order!r}")

    chosen: list[int] = []
    for cand in candidates:
        if all((cand & prev).bit_count() <= d for prev in chosen):
            chosen.append(cand)
    design = Design(n, k, d, tuple(chosen))  # constructor re-verifies pairwise
    if d >= 1:
        bound = design_size_bound(n, k, d)
        if bound >= 1.0 and design.size < max(1, math.floor(bound)):
            raise AssertionError(
                f"greedy design of size {design.size} fell below the bound {bound:.3f}"
            )
    return design


@dataclass(frozen=True)
class JuntaEmbedding:
    """A k-variable function read off an ordered coordinate subset of [n]."""

    base: CubeFunction
    coords: tuple[int, ...]  # 1-based ambient coordinates, ascending
    ambient: int

    def __post_init__(self):
        if len(self.coords) != self.base.n:
            raise ValueError("coordinate count must match the base arity")
        if list(self.coords) != sorted(self.coords):
            raise ValueError("coordinates must be ascending (restriction order)")
        if self.coords and not (1 <= self.coords[0] and self.coords[-1] <= self.ambient):
            raise ValueError("coordinates outside the ambient range")
        if self.ambient > MAX_AMBIENT_DIM:
            raise ValueError(f"ambient dimension limited to {MAX_AMBIENT_DIM}")

    def table(self) -> np.ndarray:
        idx = np.arange(1 << self.ambient, dtype=np.int64)
        base_idx = np.zeros(1 << self.ambient, dtype=np.int64)
        for j, coord in enumerate(self.coords):
            base_idx |= ((idx >> (coord - 1)) & 1) << j
        return self.base.table[base_idx]

    def function(self) -> CubeFunction:
        table = self.table()
        if isinstance(self.base, BooleanFunction):
            return BooleanFunction(self.ambient, table)
        return BoundedFunction(self.ambient, table)


def embed_on_mask(base: CubeFunction, mask: int, ambient: int) -> JuntaEmbedding:
    coords = tuple(j + 1 for j in range(ambient) if mask >> j & 1)
    return JuntaEmbedding(base, coords, ambient)


@dataclass(frozen=True)
class OrthogonalFamilyReport:
    functions: tuple[CubeFunction, ...]
    gram: np.ndarray           # m x m matrix of E[g_i g_j]
    max_offdiagonal: float
    diagonal_value: float      # E[g^2], shared by construction
    exact: bool                # integer arithmetic (Boolean base)


def orthogonal_family(g: CubeFunction, design: Design) -> OrthogonalFamilyReport:
    """Embed g along every design set and certify pairwise orthogonality.

    Requires g to be at least design.d-resilient (otherwise the
    orthogonality argument has no footing and the call is rejected).
    """
    if g.n != design.k:
        raise ValueError("base arity must equal the design's set size")
    order = resilience_order(g)
    if order < design.d:
        raise ValueError(
            f"resilience mismatch: base is only {order}-resilient, design needs {design.d}"
        )
    size = 1 << design.n
    members = [embed_on_mask(g, mask, design.n).function() for mask in design.sets]
    exact = isinstance(g, BooleanFunction)
    if exact:
        stack = np.stack([fn.table.astype(np.int64) for fn in members])
        gram_scaled = stack @ stack.T  # exact integers
        gram = gram_scaled.astype(np.float64) / size
        off = gram_scaled - np.diag(np.diag(gram_scaled))
        max_off = float(np.max(np.abs(off)) / size) if design.size > 1 else 0.0
        if np.any(off != 0):
            raise OrthogonalityError("integer Gram has a nonzero off-diagonal entry")
    else:
        stack = np.stack([fn.table for fn in members])
        gram = (stack @ stack.T) / size
        off = gram - np.diag(np.diag(gram))
        max_off = float(np.max(np.abs(off))) if design.size > 1 else 0.0
        if max_off > 1e-10:
            raise OrthogonalityError(
                f"off-diagonal Gram entry {max_off:.3e} exceeds tolerance"
            )
    return OrthogonalFamilyReport(
        functions=tuple(members),
        gram=gram,
        max_offdiagonal=max_off,
        diagonal_value=float(gram[0, 0]) if design.size else 0.0,
        exact=exact,
    )
