"""Exact discrete optimal transport and Word Rotator's Distance.

The solver is a transportation simplex (MODI / u-v method) over a spanning
tree basis.  Entering cells use Dantzig's rule with lowest-(i, j) ties; after
a run of degenerate pivots the solver falls back to Bland's rule, which
cannot cycle.  Leaving cells are the lowest-(i, j) among the blocking ones.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddedSentence
from .errors import EmptyMass, InfeasibleInstance, ZeroNormVector

MASS_TOL = 1e-6


@dataclass(frozen=True)
class TransportInstance:
    p: np.ndarray
    q: np.ndarray
    cost: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64).ravel()
        q = np.asarray(self.q, dtype=np.float64).ravel()
        cost = np.asarray(self.cost, dtype=np.float64)
        if cost.shape != (p.size, q.size):
            raise ValueError(f"cost shape {cost.shape} does not match masses ({p.size}, {q.size})")
        if p.size == 0 or q.size == 0:
            raise ValueError("both mass vectors must be non-empty")
        if np.any(p < 0) or np.any(q < 0):
            raise ValueError("masses must be non-negative")
        if not np.all(np.isfinite(cost)):
            raise ValueError("cost entries must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "cost", cost)

    @property
    def shape(self) -> tuple[int, int]:
        return self.cost.shape


@dataclass(frozen=True)
class TransportPlan:
    flows: np.ndarray
    objective: float
    iterations: int = 0


def cosine_distance(w, w2) -> float:
    """1 - cos(w, w2), in [0, 2]."""
    a = np.asarray(w, dtype=np.float64)
    b = np.asarray(w2, dtype=np.float64)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroNormVector("cosine distance is undefined for a zero vector")
    cos = float(np.dot(a, b)) / (na * nb)
    return 1.0 - min(1.0, max(-1.0, cos))


def cosine_cost_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise cosine distances between the rows of ``a`` and ``b``."""
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    if np.any(na == 0) or np.any(nb == 0):
        raise ZeroNormVector("cosine distance is undefined for a zero vector")
    cos = (a @ b.T) / np.outer(na, nb)
    return 1.0 - np.clip(cos, -1.0, 1.0)


def _northwest_corner(p: np.ndarray, q: np.ndarray):
    n, m = p.size, q.size
    supply = p.copy()
    demand = q.copy()
    flows = np.zeros((n, m))
    basis = []
    i = j = 0
    while True:
        x = min(supply[i], demand[j])
        flows[i, j] = x
        basis.append((i, j))
        supply[i] -= x
        demand[j] -= x
        if i == n - 1 and j == m - 1:
            break
        if j == m - 1 or (i < n - 1 and supply[i] <= demand[j]):
            i += 1
        else:
            j += 1
    return flows, basis


class _Tree:
    """Basis spanning tree over n row nodes and m column nodes."""

    def __init__(self, n: int, m: int, cells):
        self.n, self.m = n, m
        self.adj: list[set[int]] = [set() for _ in range(n + m)]
        for i, j in cells:
            self.add(i, j)

    def add(self, i: int, j: int) -> None:
        self.adj[i].add(self.n + j)
        self.adj[self.n + j].add(i)

    def remove(self, i: int, j: int) -> None:
        self.adj[i].discard(self.n + j)
        self.adj[self.n + j].discard(i)

    def potentials(self, cost: np.ndarray):
        n = self.n
        pot = np.zeros(n + self.m)
        seen = np.zeros(n + self.m, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            node = queue.popleft()
            for nb in sorted(self.adj[node]):
                if seen[nb]:
                    continue
                seen[nb] = True
                c = cost[node, nb - n] if node < n else cost[nb, node - n]
                pot[nb] = c - pot[node]
                queue.append(nb)
        return pot[:n], pot[n:]

    def path(self, src: int, dst: int) -> list[int]:
        """Node sequence from src to dst along the tree."""
        parent = {src: -1}
        queue = deque([src])
        while queue:
            node = queue.popleft()
            if node == dst:
                break
            for nb in self.adj[node]:
                if nb not in parent:
                    parent[nb] = node
                    queue.append(nb)
        out = [dst]
        while out[-1] != src:
            out.append(parent[out[-1]])
        return out[::-1]


def solve_transport(inst: TransportInstance, max_iter: int | None = None) -> TransportPlan:
    """Minimum-cost coupling of ``inst.p`` and ``inst.q`` (exact, deterministic)."""
    p, q, cost = inst.p, inst.q, inst.cost
    sp, sq = float(p.sum()), float(q.sum())
    if abs(sp - sq) > MASS_TOL:
        raise InfeasibleInstance(f"mass totals differ: {sp!r} vs {sq!r}")
    if sq > 0:
        q = q * (sp / sq)
    n, m = cost.shape

    flows, cells = _northwest_corner(p, q)
    basic = np.zeros((n, m), dtype=bool)
    for cell in cells:
        basic[cell] = True
    tree = _Tree(n, m, cells)

    scale = max(1.0, float(np.max(np.abs(cost))))
    tol = 1e-12 * scale
    if max_iter is None:
        max_iter = 50 * (n + m) * max(n, m) + 1000
    degenerate_run = 0
    bland = False
    it = 0
    while n > 1 and m > 1:
        u, v = tree.potentials(cost)
        reduced = cost - u[:, None] - v[None, :]
        reduced[basic] = np.inf
        if bland:
            candidates = np.flatnonzero(reduced < -tol)
            if candidates.size == 0:
                break
            flat = int(candidates[0])
        else:
            flat = int(np.argmin(reduced))
            if reduced.flat[flat] >= -tol:
                break
        ei, ej = divmod(flat, m)

        nodes = tree.path(n + ej, ei)
        # cycle: entering cell gains flow, then signs alternate along the path
        minus_cells, plus_cells = [], []
        for k in range(len(nodes) - 1):
            a, b = nodes[k], nodes[k + 1]
            cell = (b, a - n) if a >= n else (a, b - n)
            (minus_cells if k % 2 == 0 else plus_cells).append(cell)
        theta = min(flows[c] for c in minus_cells)
        leave = min(c for c in minus_cells if flows[c] == theta)

        for c in minus_cells:
            flows[c] -= theta
        for c in plus_cells:
            flows[c] += theta
        flows[ei, ej] = theta
        flows[leave] = 0.0
        basic[leave] = False
        basic[ei, ej] = True
        tree.remove(*leave)
        tree.add(ei, ej)

        it += 1
        if theta == 0.0:
            degenerate_run += 1
            if degenerate_run > n + m:
                bland = True
        else:
            degenerate_run = 0
        if it > max_iter:
            raise RuntimeError(f"transport simplex did not converge in {max_iter} pivots")

    flows[flows < 0] = 0.0
    objective = float(np.sum(flows * cost))
    return TransportPlan(flows, objective, it)


def _nonzero(s: EmbeddedSentence) -> tuple[np.ndarray, np.ndarray]:
    keep = s.norms > 0
    return s.vectors[keep], s.norms[keep]


def wrd(s: EmbeddedSentence, s2: EmbeddedSentence) -> float:
    """Word Rotator's Distance: norms give mass, cosine distance gives cost."""
    if s.total_mass <= 0 or s2.total_mass <= 0:
        raise EmptyMass("WRD needs both sentences to carry mass")
    a, na = _nonzero(s)
    b, nb = _nonzero(s2)
    cost = cosine_cost_matrix(a, b)
    inst = TransportInstance(na / s.total_mass, nb / s2.total_mass, cost)
    return solve_transport(inst).objective


def wrs(s: EmbeddedSentence, s2: EmbeddedSentence) -> float:
    """1 - WRD.  Both empty -> 1; exactly one empty -> 0.  Not clamped."""
    empty_a = s.total_mass <= 0
    empty_b = s2.total_mass <= 0
    if empty_a and empty_b:
        return 1.0
    if empty_a or empty_b:
        return 0.0
    return 1.0 - wrd(s, s2)
