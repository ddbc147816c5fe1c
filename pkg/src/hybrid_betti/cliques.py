"""Fixed-size clique enumeration.

Two enumerators with different cost profiles are provided, plus a brute-force
subset checker used as a test oracle:

* ``enumerate_arboricity_style`` roots the search at oriented edges, with
  vertices ordered by non-increasing degree, and descends by intersecting
  forward neighbourhoods.  Cost is ``O(|E| * a^(k-2))`` on graphs of
  arboricity ``a``.
* ``enumerate_degeneracy_style`` roots the search at each vertex over its
  later neighbours in a degeneracy ordering (at most ``d`` of them), with
  depth pruning at the requested clique size.

All enumerators return ascending vertex tuples in lexicographic order.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Iterable, Literal, Sequence

import numpy as np

from .graph import Graph, degeneracy_ordering
from .simplex import SimplexSet

Strategy = Literal["arboricity", "degeneracy", "auto"]

BRUTE_FORCE_MAX_N = 25
AUTO_DEGENERACY_THRESHOLD = 20


class CliqueError(ValueError):
    pass


@dataclass(frozen=True)
class CliqueList:
    k: int
    cliques: tuple[tuple[int, ...], ...]
    source: str

    def __len__(self):
        return len(self.cliques)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(self.cliques)
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps([list(c) for c in self.cliques])

    @classmethod
    def from_csv(cls, text: str, source: str = "csv") -> "CliqueList":
        rows = [tuple(int(x) for x in row) for row in csv.reader(io.StringIO(text)) if row]
        k = len(rows[0]) if rows else 0
        return cls(k=k, cliques=tuple(rows), source=source)


def _check_k(k: int) -> None:
    if k < 1:
        raise CliqueError(f"clique size must be >= 1, got {k}")


def _canonical(found: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted({tuple(sorted(c)) for c in found}))


# -- search kernels -------------------------------------------------------
# Both kernels work on "forward" neighbourhoods: fwd[v] holds the neighbours
# of v that come later in a fixed vertex ordering, so each clique is reached
# exactly once, from its earliest vertex.


def _extend(prefix, cand, fwd, pos, kmax, out, prune):
    depth = len(prefix) + 1
    # with prune set, only size-kmax cliques are wanted, so branches that
    # cannot reach kmax vertices are cut
    need = kmax - depth if prune else 1
    for w in sorted(cand, key=pos.__getitem__):
        clique = prefix + (w,)
        out[depth].append(clique)
        if depth < kmax:
            nxt = cand & fwd[w]
            if nxt and len(nxt) >= need:
                _extend(clique, nxt, fwd, pos, kmax, out, prune)


def _edge_rooted(roots, fwd, pos, kmax, prune):
    out = {k: [] for k in range(1, kmax + 1)}
    for u in roots:
        out[1].append((u,))
        if kmax < 2:
            continue
        for v in sorted(fwd[u], key=pos.__getitem__):
            out[2].append((u, v))
            if kmax >= 3:
                cand = fwd[u] & fwd[v]
                if cand and (not prune or len(cand) >= kmax - 2):
                    _extend((u, v), cand, fwd, pos, kmax, out, prune)
    return out


def _vertex_rooted(roots, fwd, pos, kmax, prune):
    out = {k: [] for k in range(1, kmax + 1)}
    for v in roots:
        out[1].append((v,))
        if kmax >= 2 and fwd[v] and (not prune or len(fwd[v]) >= kmax - 1):
            _extend((v,), fwd[v], fwd, pos, kmax, out, prune)
    return out


def _kernel_job(args):
    kind, roots, fwd, pos, kmax, prune = args
    fn = _edge_rooted if kind == "edge" else _vertex_rooted
    return fn(roots, fwd, pos, kmax, prune)


def _run(kind, order, g: Graph, kmax: int, workers: int | None, prune: bool = False):
    pos = {v: i for i, v in enumerate(order)}
    fwd = [frozenset(u for u in g.adjacency[v] if pos[u] > pos[v]) for v in range(g.n)]
    if not workers or workers <= 1 or g.n < 2 * workers:
        parts = [_kernel_job((kind, order, fwd, pos, kmax, prune))]
    else:
        chunks = [order[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_kernel_job, [(kind, c, fwd, pos, kmax, prune) for c in chunks]))
    merged = {k: [] for k in range(1, kmax + 1)}
    for part in parts:
        for k, lst in part.items():
            merged[k].extend(lst)
    return {k: _canonical(v) for k, v in merged.items()}


def _arboricity_all(g: Graph, kmax: int, workers=None, prune=False):
    # smallest-degree-last: high-degree vertices are processed (and removed) first
    order = tuple(sorted(range(g.n), key=lambda v: (-g.degree(v), v)))
    return _run("edge", order, g, kmax, workers, prune)


def _degeneracy_all(g: Graph, kmax: int, workers=None, prune=False):
    _, order = degeneracy_ordering(g)
    return _run("vertex", order, g, kmax, workers, prune)


def enumerate_arboricity_style(g: Graph, k: int, workers: int | None = None) -> CliqueList:
    _check_k(k)
    if k > g.n:
        return CliqueList(k, (), "arboricity")
    return CliqueList(k, _arboricity_all(g, k, workers, prune=True)[k], "arboricity")


def enumerate_degeneracy_style(g: Graph, k: int, workers: int | None = None) -> CliqueList:
    _check_k(k)
    if k > g.n:
        return CliqueList(k, (), "degeneracy")
    return CliqueList(k, _degeneracy_all(g, k, workers, prune=True)[k], "degeneracy")


def enumerate_bruteforce(g: Graph, k: int, chunk: int = 200_000) -> CliqueList:
    """Test every k-subset of the vertices for mutual adjacency."""
    _check_k(k)
    if g.n > BRUTE_FORCE_MAX_N:
        raise CliqueError(f"brute-force enumeration refused: n={g.n} exceeds limit {BRUTE_FORCE_MAX_N}")
    if k > g.n:
        return CliqueList(k, (), "bruteforce")
    if k == 1:
        return CliqueList(1, tuple((v,) for v in range(g.n)), "bruteforce")
    adj = np.zeros((g.n, g.n), dtype=bool)
    for u, v in g.edges:
        adj[u, v] = adj[v, u] = True
    pairs = list(itertools.combinations(range(k), 2))
    found = []
    subsets = itertools.combinations(range(g.n), k)
    while True:
        block = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(subsets, chunk)), dtype=np.int64
        ).reshape(-1, k)
        if block.size == 0:
            break
        ok = np.ones(len(block), dtype=bool)
        for i, j in pairs:
            ok &= adj[block[:, i], block[:, j]]
        found.extend(map(tuple, block[ok].tolist()))
    # combinations() already yields lexicographic ascending tuples
    return CliqueList(k, tuple(found), "bruteforce")


def choose_strategy(g: Graph, strategy: Strategy, threshold: int = AUTO_DEGENERACY_THRESHOLD) -> str:
    if strategy == "auto":
        d, _ = degeneracy_ordering(g)
        return "degeneracy" if d <= threshold else "arboricity"
    if strategy not in ("arboricity", "degeneracy"):
        raise CliqueError(f"unknown strategy {strategy!r}")
    return strategy


def build_simplex_sets(
    g: Graph,
    r_max: int,
    strategy: Strategy = "auto",
    *,
    auto_threshold: int = AUTO_DEGENERACY_THRESHOLD,
    workers: int | None = None,
) -> list[SimplexSet]:
    """All simplex sets S_0..S_{r_max} of the clique complex of ``g``."""
    if r_max < 0:
        raise CliqueError(f"r_max must be >= 0, got {r_max}")
    chosen = choose_strategy(g, strategy, auto_threshold)
    kmax = min(r_max + 1, g.n)
    if kmax == 0:
        found = {}
    elif chosen == "degeneracy":
        found = _degeneracy_all(g, kmax, workers)
    else:
        found = _arboricity_all(g, kmax, workers)
    return [SimplexSet(r, g.n, found.get(r + 1, ()), source=chosen) for r in range(r_max + 1)]


def proposition_bound(n: int, max_degree: int, r: int) -> int:
    """n * C(max_degree + 1, r + 1): the bounded-degree ceiling on |S_r|."""
    return n * comb(max_degree + 1, r + 1)
