"""Graphs, induced-subgraph search, hereditary properties and exact optima.

Vertices are numbered 1..n everywhere in the public API.  Internally a graph
is a tuple of adjacency bitmasks: bit ``j - 1`` of ``masks[i - 1]`` is set
iff vertices ``i`` and ``j`` are adjacent.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import InputError, MisconfiguredProperty, ParseError, ResourceError

BRUTE_FORCE_BOUND = 25
RAMSEY_VERIFY_BOUND = 20


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask_of(vertices: Iterable[int], n: int) -> int:
    mask = 0
    for v in vertices:
        if not 1 <= v <= n:
            raise InputError(f"vertex {v} out of range 1..{n}")
        mask |= 1 << (v - 1)
    return mask


def _vertices_of(mask: int) -> frozenset[int]:
    return frozenset(b + 1 for b in _bits(mask))


@dataclass(frozen=True)
class Graph:
    n: int
    masks: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if self.n < 0 or len(self.masks) != self.n:
            raise InputError("mask table does not match vertex count")
        full = (1 << self.n) - 1
        for i, m in enumerate(self.masks):
            if m & ~full:
                raise InputError(f"vertex {i + 1} has a neighbour out of range")
            if m >> i & 1:
                raise InputError(f"self-loop at vertex {i + 1}")
            for j in _bits(m):
                if not self.masks[j] >> i & 1:
                    raise InputError(f"asymmetric adjacency {i + 1}-{j + 1}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        masks = [0] * n
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise InputError(f"edge {u}-{v} out of range 1..{n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            masks[u - 1] |= 1 << (v - 1)
            masks[v - 1] |= 1 << (u - 1)
        return cls(n, tuple(masks))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << i) for i in range(n)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        if n < 3:
            raise InputError("a cycle needs at least 3 vertices")
        return cls.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls.from_edges(n, [(i, i + 1) for i in range(1, n)])

    @classmethod
    def random(cls, n: int, p: float, seed=None, rng: random.Random | None = None) -> Graph:
        rng = rng or random.Random(seed)
        edges = [(u, v) for v in range(2, n + 1) for u in range(1, v) if rng.random() < p]
        return cls.from_edges(n, edges)

    # -- queries ------------------------------------------------------------

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.masks[u - 1] >> (v - 1) & 1)

    def neighbors(self, v: int) -> frozenset[int]:
        return _vertices_of(self.masks[v - 1])

    def back_neighbors(self, v: int) -> frozenset[int]:
        """Neighbours with a smaller index, i.e. the edges revealed with ``v``."""
        return _vertices_of(self.masks[v - 1] & ((1 << (v - 1)) - 1))

    def degree(self, v: int) -> int:
        return self.masks[v - 1].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u + 1, v + 1) for v in range(self.n) for u in _bits(self.masks[v] & ((1 << v) - 1))]

    @property
    def num_edges(self) -> int:
        return sum(m.bit_count() for m in self.masks) // 2

    def add_vertex(self, back: Iterable[int]) -> Graph:
        """Return the graph extended by vertex n+1 adjacent to ``back``."""
        bmask = _mask_of(back, self.n)
        new = self.n
        masks = [m | (1 << new) if bmask >> i & 1 else m for i, m in enumerate(self.masks)]
        masks.append(bmask)
        return Graph(self.n + 1, tuple(masks))


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    """Subgraph induced by ``s``, relabelled 1..|s| in increasing order."""
    verts = sorted(set(s))
    for v in verts:
        if not 1 <= v <= g.n:
            raise InputError(f"vertex {v} out of range 1..{g.n}")
    return _induced_by_index(g.masks, [v - 1 for v in verts])


def _induced_by_index(masks: Sequence[int], idx: Sequence[int]) -> Graph:
    pos = {v: i for i, v in enumerate(idx)}
    out = []
    for v in idx:
        m = 0
        for u in _bits(masks[v]):
            if u in pos:
                m |= 1 << pos[u]
        out.append(m)
    return Graph(len(idx), tuple(out))


def complement(g: Graph) -> Graph:
    full = (1 << g.n) - 1
    return Graph(g.n, tuple(full ^ m ^ (1 << i) for i, m in enumerate(g.masks)))


# -- induced subgraph search ------------------------------------------------


def _pattern_order(h: Graph) -> list[int]:
    return sorted(range(h.n), key=lambda p: (-h.masks[p].bit_count(), p))


def _find_induced(gm: Sequence[int], h: Graph, within: int, anchor: int | None = None):
    """Backtracking search for an induced copy of ``h`` inside ``within``.

    Returns a list mapping pattern index -> target index, or None.  With
    ``anchor`` set, only copies using that target vertex are considered.
    """
    k = h.n
    size = within.bit_count()
    if k == 0:
        return []
    if k > size:
        return None
    if anchor is not None and not within >> anchor & 1:
        return None
    hm = h.masks
    hdeg = [m.bit_count() for m in hm]
    tdeg = {t: (gm[t] & within).bit_count() for t in _bits(within)}

    def fits(p, t):
        return tdeg[t] >= hdeg[p] and (size - 1 - tdeg[t]) >= (k - 1 - hdeg[p])

    base_order = _pattern_order(h)
    if anchor is None:
        starts = [(None, base_order)]
    else:
        starts = [(p0, [p0] + [p for p in base_order if p != p0]) for p0 in base_order]

    for p0, order in starts:
        if p0 is not None and not fits(p0, anchor):
            continue
        assign = [-1] * k

        def rec(depth, used):
            if depth == k:
                return True
            p = order[depth]
            if depth == 0 and p0 is not None:
                cand = 1 << anchor
            else:
                cand = within & ~used
                for q in order[:depth]:
                    t = assign[q]
                    if hm[p] >> q & 1:
                        cand &= gm[t]
                    else:
                        cand &= ~gm[t]
            for t in _bits(cand):
                if fits(p, t):
                    assign[p] = t
                    if rec(depth + 1, used | (1 << t)):
                        return True
            assign[p] = -1
            return False

        if rec(0, 0):
            return list(assign)
    return None


def find_induced(g: Graph, h: Graph) -> dict[int, int] | None:
    """An induced embedding of ``h`` into ``g`` as {h vertex: g vertex}, or None."""
    found = _find_induced(g.masks, h, (1 << g.n) - 1)
    if found is None:
        return None
    return {p + 1: t + 1 for p, t in enumerate(found)}


def contains_induced(g: Graph, h: Graph) -> bool:
    return _find_induced(g.masks, h, (1 << g.n) - 1) is not None


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return g.n == h.n and g.num_edges == h.num_edges and contains_induced(g, h)


# -- properties -------------------------------------------------------------

FORBIDDEN = "hereditary-forbidden"
OBLIGATORY = "cohereditary-obligatory"
HEREDITARY_PREDICATE = "hereditary-predicate"
COHEREDITARY_PREDICATE = "cohereditary-predicate"
MODES = (FORBIDDEN, OBLIGATORY, HEREDITARY_PREDICATE, COHEREDITARY_PREDICATE)


@dataclass(frozen=True)
class PropertySpec:
    """A hereditary or cohereditary graph property.

    Witness modes list forbidden (resp. obligatory) induced subgraphs;
    predicate modes carry a decision procedure instead.  ``k`` is the size
    of a smallest forbidden (resp. obligatory) graph.
    """

    name: str
    mode: str
    witnesses: tuple[Graph, ...] = ()
    predicate: Callable[[Graph], bool] | None = field(default=None, compare=False)
    k: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown property mode {self.mode!r}")
        if self.mode in (FORBIDDEN, OBLIGATORY):
            if not self.witnesses:
                raise InputError(f"{self.name}: witness mode needs witness graphs")
            kmin = min(w.n for w in self.witnesses)
            if self.k == 0:
                object.__setattr__(self, "k", kmin)
            elif self.k != kmin:
                raise InputError(f"{self.name}: k={self.k} but smallest witness has {kmin} vertices")
        elif self.predicate is None:
            raise InputError(f"{self.name}: predicate mode needs a predicate")
        if self.k < 1:
            raise InputError(f"{self.name}: k must be positive")

    @property
    def hereditary(self) -> bool:
        return self.mode in (FORBIDDEN, HEREDITARY_PREDICATE)

    @property
    def smallest_witness(self) -> Graph:
        return min(self.witnesses, key=lambda w: w.n)


def _satisfies_mask(masks: Sequence[int], mask: int, p: PropertySpec) -> bool:
    if p.mode == FORBIDDEN:
        return all(_find_induced(masks, w, mask) is None for w in p.witnesses)
    if p.mode == OBLIGATORY:
        return any(_find_induced(masks, w, mask) is not None for w in p.witnesses)
    return bool(p.predicate(_induced_by_index(masks, list(_bits(mask)))))


def _adding_keeps(masks: Sequence[int], mask: int, v: int, p: PropertySpec) -> bool:
    """For a hereditary ``p`` already satisfied on ``mask``: does mask + v satisfy it?"""
    if p.mode == FORBIDDEN:
        new = mask | (1 << v)
        return all(_find_induced(masks, w, new, anchor=v) is None for w in p.witnesses)
    return _satisfies_mask(masks, mask | (1 << v), p)


def satisfies(g: Graph, p: PropertySpec) -> bool:
    return _satisfies_mask(g.masks, (1 << g.n) - 1, p)


def satisfies_set(g: Graph, s: Iterable[int], p: PropertySpec) -> bool:
    return _satisfies_mask(g.masks, _mask_of(s, g.n), p)


@dataclass(frozen=True)
class IncrementalChecker:
    """Property state of a growing accepted set.

    ``graph`` is the subgraph induced by the accepted vertices, whose
    external labels are kept in ``labels``.  Every update returns a new
    checker; old checkers stay valid.
    """

    prop: PropertySpec
    graph: Graph = Graph(0, ())
    labels: tuple = ()
    ok: bool = True

    def __post_init__(self):
        if self.graph.n == 0 and not self.labels:
            # the empty graph satisfies every hereditary property and no cohereditary one
            object.__setattr__(self, "ok", self.prop.hereditary)

    def add(self, label, back: Iterable) -> tuple[bool, IncrementalChecker]:
        index = {lab: i + 1 for i, lab in enumerate(self.labels)}
        try:
            back_idx = [index[b] for b in back]
        except KeyError as exc:
            raise InputError(f"neighbour {exc.args[0]!r} is not in the accepted set") from None
        g2 = self.graph.add_vertex(back_idx)
        if self.ok and self.prop.hereditary:
            ok = _adding_keeps(g2.masks, (1 << self.graph.n) - 1, self.graph.n, self.prop)
        else:
            ok = satisfies(g2, self.prop)
        return ok, IncrementalChecker(self.prop, g2, self.labels + (label,), ok)

    def remove(self, drop: Iterable) -> IncrementalChecker:
        drop = set(drop)
        keep = [i for i, lab in enumerate(self.labels) if lab not in drop]
        if len(keep) == len(self.labels):
            return self
        g2 = _induced_by_index(self.graph.masks, keep)
        if self.ok and self.prop.hereditary:
            ok = True
        else:
            ok = satisfies(g2, self.prop)
        return IncrementalChecker(self.prop, g2, tuple(self.labels[i] for i in keep), ok)

    def __len__(self):
        return len(self.labels)


def satisfies_incremental(state: IncrementalChecker, v, back: Iterable) -> tuple[bool, IncrementalChecker]:
    return state.add(v, back)


# -- predicates and shipped properties --------------------------------------


def is_forest(g: Graph) -> bool:
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges():
        ru, rv = find(u - 1), find(v - 1)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def has_cycle(g: Graph) -> bool:
    return not is_forest(g)


def is_edgeless(g: Graph) -> bool:
    return not any(g.masks)


def is_clique(g: Graph) -> bool:
    full = (1 << g.n) - 1
    return all(m | (1 << i) == full for i, m in enumerate(g.masks))


def is_triangle_free(g: Graph) -> bool:
    for a, b, c in itertools.combinations(range(g.n), 3):
        if g.masks[a] >> b & 1 and g.masks[a] >> c & 1 and g.masks[b] >> c & 1:
            return False
    return True


K2 = Graph.complete(2)
K3 = Graph.complete(3)
CO_K2 = Graph.empty(2)

INDEPENDENT_SET = PropertySpec("independent-set", FORBIDDEN, (K2,))
TRIANGLE_FREE = PropertySpec("triangle-free", FORBIDDEN, (K3,))
CLIQUE = PropertySpec("clique", FORBIDDEN, (CO_K2,))
FOREST = PropertySpec("forest", HEREDITARY_PREDICATE, predicate=is_forest, k=3)
CONTAINS_CYCLE = PropertySpec("contains-cycle", COHEREDITARY_PREDICATE, predicate=has_cycle, k=3)
CONTAINS_TRIANGLE = PropertySpec("contains-triangle", OBLIGATORY, (K3,))

# predicate encodings of the witness-mode properties, used for cross-checks
INDEPENDENT_SET_PRED = PropertySpec("independent-set/pred", HEREDITARY_PREDICATE, predicate=is_edgeless, k=2)
TRIANGLE_FREE_PRED = PropertySpec("triangle-free/pred", HEREDITARY_PREDICATE, predicate=is_triangle_free, k=3)
CLIQUE_PRED = PropertySpec("clique/pred", HEREDITARY_PREDICATE, predicate=is_clique, k=2)

PROPERTIES = {
    p.name: p
    for p in (INDEPENDENT_SET, TRIANGLE_FREE, CLIQUE, FOREST, CONTAINS_CYCLE, CONTAINS_TRIANGLE)
}


def get_property(name: str) -> PropertySpec:
    try:
        return PROPERTIES[name]
    except KeyError:
        raise InputError(f"unknown property {name!r}; known: {', '.join(sorted(PROPERTIES))}") from None


def complement_property(p: PropertySpec) -> PropertySpec:
    """The property satisfied by G iff the complement of G satisfies ``p``."""
    if p.mode in (FORBIDDEN, OBLIGATORY):
        return PropertySpec(p.name + "^c", p.mode, tuple(complement(w) for w in p.witnesses))
    pred = p.predicate
    return PropertySpec(p.name + "^c", p.mode, predicate=lambda g: pred(complement(g)), k=p.k)


# -- exact optima -----------------------------------------------------------


def _max_hereditary(masks: Sequence[int], n: int, p: PropertySpec, stop_at: int | None = None) -> int:
    """Branch and bound for a largest vertex mask satisfying hereditary ``p``.

    Only feasible partial sets are extended, so supersets of violating sets
    are never visited.  Stops early once a set of size ``stop_at`` is found.
    """
    best = [0, 0]  # size, mask

    def rec(i, mask, size):
        if size + (n - i) <= best[0]:
            return False
        if i == n:
            best[0], best[1] = size, mask
            return stop_at is not None and size >= stop_at
        if _adding_keeps(masks, mask, i, p):
            if rec(i + 1, mask | (1 << i), size + 1):
                return True
        return rec(i + 1, mask, size)

    rec(0, 0, 0)
    return best[1]


def opt_max_pi(g: Graph, p: PropertySpec, bound: int = BRUTE_FORCE_BOUND) -> frozenset[int]:
    if not p.hereditary:
        raise InputError(f"{p.name} is not hereditary")
    if g.n > bound:
        raise ResourceError(f"graph has {g.n} vertices, brute-force bound is {bound}")
    return _vertices_of(_max_hereditary(g.masks, g.n, p))


def opt_min_pi(g: Graph, p: PropertySpec, bound: int = BRUTE_FORCE_BOUND) -> frozenset[int] | None:
    if p.hereditary:
        raise InputError(f"{p.name} is not cohereditary")
    if g.n > bound:
        raise ResourceError(f"graph has {g.n} vertices, brute-force bound is {bound}")
    if not satisfies(g, p):
        return None
    if p.mode == OBLIGATORY:
        best = None
        for w in sorted(p.witnesses, key=lambda w: w.n):
            if best is not None and w.n >= len(best):
                break
            emb = find_induced(g, w)
            if emb is not None:
                best = frozenset(emb.values())
        return best
    for size in range(p.k, g.n + 1):
        for combo in itertools.combinations(range(g.n), size):
            if p.predicate(_induced_by_index(g.masks, combo)):
                return frozenset(v + 1 for v in combo)
    return frozenset(g.vertices)  # unreachable: g itself satisfies p


def clique_or_independent(p: PropertySpec, bound: int = 8) -> str:
    """Which of the families K_i / co-K_i (i <= bound) satisfy hereditary ``p``."""
    if not p.hereditary:
        raise InputError(f"{p.name} is not hereditary")
    cliques = all(satisfies(Graph.complete(i), p) for i in range(1, bound + 1))
    indep = all(satisfies(Graph.empty(i), p) for i in range(1, bound + 1))
    if cliques and indep:
        return "both"
    if cliques:
        return "cliques"
    if indep:
        return "independent-sets"
    raise MisconfiguredProperty(f"{p.name}: neither cliques nor independent sets up to {bound} satisfy it")


# -- Ramsey-type base graphs -------------------------------------------------


def ramsey_threshold(n: int, alpha, h: Graph) -> int:
    """ceil(alpha * log2 n), never below |h| (smaller sets cannot contain h)."""
    raw = float(alpha) * math.log2(n) if n > 1 else 0.0
    return max(math.ceil(raw - 1e-9), h.n)


def largest_free_subset(g: Graph, h: Graph, stop_at: int | None = None) -> frozenset[int]:
    """A largest vertex set inducing no copy of ``h`` (early exit at ``stop_at``)."""
    prop = PropertySpec("free-of-target", FORBIDDEN, (h,))
    return _vertices_of(_max_hereditary(g.masks, g.n, prop, stop_at))


@dataclass(frozen=True)
class RamseyCertificate:
    graph: Graph
    target: Graph
    alpha: float
    threshold: int
    verified: bool
    seed: int
    attempts: int

    def to_dict(self) -> dict:
        return {
            "n": self.graph.n,
            "target_edges": self.target.edges(),
            "target_n": self.target.n,
            "alpha": float(self.alpha),
            "threshold": self.threshold,
            "verified": self.verified,
            "seed": self.seed,
            "attempts": self.attempts,
        }


def check_subset_condition(g: Graph, h: Graph, threshold: int, bound: int = RAMSEY_VERIFY_BOUND) -> bool:
    """True iff every vertex set of size >= threshold induces a copy of ``h``."""
    if g.n > bound:
        raise ResourceError(f"verification of {g.n} vertices exceeds bound {bound}")
    if threshold > g.n:
        return True
    return len(largest_free_subset(g, h, stop_at=threshold)) < threshold


def verify_certificate(cert: RamseyCertificate, bound: int = RAMSEY_VERIFY_BOUND) -> bool:
    if cert.threshold != ramsey_threshold(cert.graph.n, cert.alpha, cert.target):
        return False
    return check_subset_condition(cert.graph, cert.target, cert.threshold, bound)


def ramsey_like_graph(
    n: int,
    h: Graph,
    alpha=None,
    seed: int = 0,
    budget: int = 100,
    p: float = 0.5,
    bound: int = RAMSEY_VERIFY_BOUND,
) -> RamseyCertificate:
    """Sample seeded G(n, p) graphs until one passes the subset condition."""
    if h.n == 0:
        raise InputError("target graph must be nonempty")
    if n > bound:
        raise ResourceError(f"n={n} exceeds the verification bound {bound}")
    if alpha is None:
        alpha = 2 if is_isomorphic(h, K2) else 3
    if alpha <= 0:
        raise InputError("alpha must be positive")
    threshold = ramsey_threshold(n, alpha, h)
    rng = random.Random(seed)
    g = Graph.empty(n)
    for attempt in range(1, budget + 1):
        g = Graph.random(n, p, rng=rng)
        if check_subset_condition(g, h, threshold, bound):
            return RamseyCertificate(g, h, alpha, threshold, True, seed, attempt)
    return RamseyCertificate(g, h, alpha, threshold, False, seed, budget)


# -- text format --------------------------------------------------------------


def dumps_graph(g: Graph, flags: Iterable[str] = (), comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend("# " + c for c in comment.splitlines())
    lines.extend(flags)
    lines.append(str(g.n))
    for v in g.vertices:
        lines.append(" ".join(str(u) for u in sorted(g.back_neighbors(v))))
    return "\n".join(lines) + "\n"


def parse_graph_text(text: str) -> tuple[Graph, set[str]]:
    """Parse the line-per-vertex format; words before the count are flags."""
    flags: set[str] = set()
    n = None
    rows: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if raw.lstrip().startswith("#"):
            continue
        line = raw.split("#", 1)[0].strip()
        if n is None:
            if not line:
                continue
            if line.isidentifier():
                flags.add(line)
                continue
            try:
                n = int(line)
            except ValueError:
                raise ParseError(f"expected vertex count, got {line!r}", lineno) from None
            if n < 0:
                raise ParseError("negative vertex count", lineno)
            continue
        rows.append((lineno, line))
    if n is None:
        raise ParseError("missing vertex count")
    while len(rows) > n and not rows[-1][1]:
        rows.pop()
    if len(rows) > n:
        raise ParseError("unexpected content after the last vertex", rows[n][0])
    edges = []
    for i, (lineno, line) in enumerate(rows, 1):
        for tok in line.split():
            try:
                j = int(tok)
            except ValueError:
                raise ParseError(f"bad neighbour {tok!r}", lineno) from None
            if not 1 <= j < i:
                raise ParseError(f"neighbour {j} of vertex {i} must lie in 1..{i - 1}", lineno)
            edges.append((j, i))
    if len(rows) < n:
        raise ParseError(f"expected {n} vertex lines, found {len(rows)}", rows[-1][0] if rows else None)
    return Graph.from_edges(n, edges), flags


def loads_graph(text: str) -> Graph:
    g, flags = parse_graph_text(text)
    if flags:
        raise ParseError(f"unexpected flags {sorted(flags)}")
    return g
