"""Instance constructions and algorithm transformers behind the advice lower bounds.

Every construction here is prefix-online: the edges of a vertex to earlier
vertices depend only on the part of the source string that a string
guessing algorithm has already seen when that vertex is presented.  Each
construction therefore has one ``*_back`` helper that computes the back
edges of a single vertex, and both the offline builders and the online
simulators use it.

Vertex numbering follows the revelation order (layers are consecutive), so
positions reported by :class:`~hereditary_advice.online_engine.OnlineSession`
coincide with vertex names.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import InputError, ProtocolError, SoundnessError
from .graph_core import (
    INDEPENDENT_SET,
    Graph,
    PropertySpec,
    RamseyCertificate,
    _find_induced,
    clique_or_independent,
    contains_induced,
    opt_min_pi,
    ramsey_like_graph,
    ramsey_threshold,
)
from .online_engine import (
    MAX,
    MIN,
    PLAIN,
    PREEMPTIVE,
    AdviceTape,
    Decision,
    OnlineInstance,
    OnlineSession,
    Transcript,
    encode_self_delimited,
    encode_uint,
    index_width,
    read_self_delimited,
    run_game,
)

INDEPENDENT = "independent"
CLIQUE = "clique"

PiOracle = Callable[[OnlineInstance], str]


def orientation_for(prop: PropertySpec) -> str:
    """Independent orientation unless only cliques satisfy ``prop``."""
    return CLIQUE if clique_or_independent(prop) == "cliques" else INDEPENDENT


def _survivors_at(t: Transcript, step: int) -> frozenset[int]:
    return frozenset(t.steps[step - 1].survivors) if step else frozenset()


@dataclass
class ReductionOutcome:
    """Bookkeeping of one reduction run; fields unused by a reduction stay empty."""

    answers: tuple = ()
    candidates: tuple = ()
    good: int = 0
    correct: int = 0
    surviving_special: int = 0
    s_error: tuple = ()
    j: int | None = None
    extra_bits: int = 0
    transcript: Transcript | None = None


# ---------------------------------------------------------------------------
# blind asymmetric string guessing -> Max-pi
# ---------------------------------------------------------------------------


class BlindGuesserAsMaxPi:
    """Max-pi algorithm that accepts a vertex iff the wrapped blind
    asymmetric-string guesser answers 0 for it.  Reads only the guesser's bits."""

    def __init__(self, asg_alg):
        self.asg_alg = asg_alg

    def start(self, tape):
        self.asg_alg.start(None, tape)

    def decide(self, view, tape):
        return Decision(self.asg_alg.answer(view.step, None, tape) == 0)


def maxasgu_to_maxpi(asg_alg) -> BlindGuesserAsMaxPi:
    return BlindGuesserAsMaxPi(asg_alg)


class BitmapGuesser:
    """Asymmetric-string guesser that reads one bit per position and answers it."""

    def start(self, n, tape):
        pass

    def answer(self, i, history, tape):
        return tape.read()


def opt_string(inst: OnlineInstance, opt: frozenset[int]) -> str:
    """The binary string with zeros exactly on the optimal vertices."""
    return "".join("0" if v in opt else "1" for v in inst.sequence)


# ---------------------------------------------------------------------------
# Max-pi -> known-history asymmetric string guessing
# ---------------------------------------------------------------------------


def gnu_back(base: Graph, nu_prefix: Sequence[int], i: int, orientation: str = INDEPENDENT) -> frozenset[int]:
    """Back edges of vertex ``i`` in the string-dependent graph built on ``base``.

    A zero at position j removes (independent orientation) or adds (clique
    orientation) every edge from j to a later vertex.
    """
    out = set()
    for j in range(1, i):
        edge = base.has_edge(j, i)
        if nu_prefix[j - 1] == 0:
            edge = orientation == CLIQUE
        if edge:
            out.add(j)
    return frozenset(out)


def build_zero_deletion(nu: Sequence[int], base: RamseyCertificate, orientation: str = INDEPENDENT):
    """Returns (instance, I_nu) where I_nu is the set of zero positions."""
    if not base.verified:
        raise SoundnessError("refusing an unverified base graph")
    if orientation not in (INDEPENDENT, CLIQUE):
        raise InputError(f"unknown orientation {orientation!r}")
    nu = tuple(nu)
    n = base.graph.n
    if len(nu) != n or set(nu) - {0, 1}:
        raise InputError(f"nu must be a bit string of length {n}")
    g = Graph(0, ())
    for i in range(1, n + 1):
        g = g.add_vertex(gnu_back(base.graph, nu, i, orientation))
    i_nu = frozenset(i for i in range(1, n + 1) if nu[i - 1] == 0)
    return OnlineInstance(g), i_nu


@dataclass(frozen=True)
class CorrectionString:
    s_out: tuple[int, ...]
    s_in: tuple[int, ...]
    encoded: str
    threshold: int
    n: int

    @property
    def length_bound(self) -> int:
        """Explicit ceiling on |encoded|: two counts plus 2*threshold indices."""
        return 2 * len(encode_self_delimited(self.threshold)) + 2 * self.threshold * index_width(self.n)


def _encode_index_list(indices: Sequence[int], n: int) -> str:
    w = index_width(n)
    return encode_self_delimited(len(indices)) + "".join(encode_uint(i - 1, w) for i in indices)


def _read_index_list(tape: AdviceTape, n: int) -> tuple[int, ...]:
    count = read_self_delimited(tape)
    w = index_width(n)
    return tuple(tape.read_uint(w) + 1 for _ in range(count))


def make_correction(s, i_nu, threshold: int, n: int | None = None) -> CorrectionString:
    s, i_nu = frozenset(s), frozenset(i_nu)
    if n is None:
        n = max(s | i_nu, default=0)
    s_out = tuple(sorted(s - i_nu))
    if len(s_out) > threshold:
        raise SoundnessError(
            f"{len(s_out)} solution vertices outside I_nu exceed the threshold {threshold}; base graph is broken"
        )
    need = min(len(s), len(i_nu)) - len(s & i_nu)
    s_in = tuple(sorted(i_nu - s)[:need])
    encoded = _encode_index_list(s_out, n) + _encode_index_list(s_in, n)
    return CorrectionString(s_out, s_in, encoded, threshold, n)


class MaxPiAsMaxASGk:
    """Known-history asymmetric-string guesser driven by a non-preemptive
    Max-pi algorithm on the string-dependent graph.

    Advice layout: self-delimited n, the correction string, then the Max-pi
    algorithm's own advice.
    """

    def __init__(self, pi_alg, base: RamseyCertificate, prop: PropertySpec, orientation: str | None = None):
        if not base.verified:
            raise SoundnessError("refusing an unverified base graph")
        self.pi_alg = pi_alg
        self.base = base
        self.prop = prop
        self.orientation = orientation or orientation_for(prop)
        self.session: OnlineSession | None = None

    def start(self, n, tape):
        n = read_self_delimited(tape)
        if n != self.base.graph.n:
            raise ProtocolError(f"no base graph on {n} vertices available")
        self.s_out = frozenset(_read_index_list(tape, n))
        self.s_in = frozenset(_read_index_list(tape, n))
        self.session = OnlineSession(self.pi_alg, self.prop, PLAIN, tape, MAX)

    def answer(self, i, history, tape):
        d = self.session.reveal(gnu_back(self.base.graph, history, i, self.orientation))
        if i in self.s_in:
            return 0
        if i in self.s_out:
            return 1
        return 0 if d.accept else 1

    @property
    def transcript(self) -> Transcript:
        return self.session.transcript()


def maxpi_to_maxasgk(pi_alg, base: RamseyCertificate, prop: PropertySpec = INDEPENDENT_SET,
                     orientation: str | None = None) -> MaxPiAsMaxASGk:
    return MaxPiAsMaxASGk(pi_alg, base, prop, orientation)


@dataclass
class CorrectionAdvice:
    tape: str
    solution: frozenset[int]
    i_nu: frozenset[int]
    correction: CorrectionString
    pi_bits: int
    header_bits: int


def maxpi_to_maxasgk_advice(nu, base: RamseyCertificate, prop: PropertySpec, pi_alg, pi_oracle: PiOracle,
                            orientation: str | None = None) -> CorrectionAdvice:
    """Advice oracle for :class:`MaxPiAsMaxASGk` on string ``nu``."""
    orientation = orientation or orientation_for(prop)
    inst, i_nu = build_zero_deletion(nu, base, orientation)
    pi_tape = pi_oracle(inst)
    t = run_game(inst, pi_alg, prop, PLAIN, pi_tape, MAX)
    s = frozenset(t.final)
    corr = make_correction(s, i_nu, base.threshold, base.graph.n)
    header = encode_self_delimited(base.graph.n)
    return CorrectionAdvice(header + corr.encoded + pi_tape, s, i_nu, corr, t.bits_read, len(header))


# ---------------------------------------------------------------------------
# layered graphs for preemptive Max-pi with large ratios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransversalCertificate:
    """Cross-layer graph in which every transversal of ``threshold`` vertices
    (one per distinct layer) induces ``target``."""

    graph: Graph
    layers: tuple[tuple[int, ...], ...]
    target: Graph
    threshold: int
    verified: bool
    seed: int
    attempts: int
    density: float

    def to_dict(self) -> dict:
        return {"threshold": self.threshold, "verified": self.verified, "seed": self.seed,
                "attempts": self.attempts, "density": self.density, "edges": self.graph.edges()}


def transversal_condition(g: Graph, layers: Sequence[Sequence[int]], h: Graph, threshold: int) -> bool:
    """True iff every set of ``threshold`` vertices from distinct layers induces ``h``.

    Depth-first over layers in increasing order; a partial transversal that
    already contains ``h`` is not extended, since all its extensions do too.
    """
    if threshold > len(layers):
        return True
    if threshold < h.n:
        return False
    masks = g.masks

    def rec(start, chosen, mask):
        if len(chosen) >= h.n and _find_induced(masks, h, mask) is not None:
            return True
        if len(chosen) == threshold:
            return False
        for li in range(start, len(layers) - (threshold - len(chosen)) + 1):
            for v in layers[li]:
                if not rec(li + 1, chosen + [v], mask | (1 << (v - 1))):
                    return False
        return True

    return rec(0, [], 0)


@dataclass(frozen=True)
class LayeredInstance:
    instance: OnlineInstance
    layers: tuple[tuple[int, ...], ...]
    special: tuple[int | None, ...]
    construction: str
    params: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)

    @property
    def graph(self) -> Graph:
        return self.instance.graph

    def layer_of(self, v: int) -> int:
        """0-based layer index of vertex ``v``."""
        size = len(self.layers[0])
        return (v - 1) // size

    @property
    def verified(self) -> bool:
        return all(c.verified for c in self.certificates.values())


def _layers(n_layers: int, size: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(range(i * size + 1, (i + 1) * size + 1)) for i in range(n_layers))


def build_g_n_sigma(n: int, sigma: int, h: Graph, kappa1: float = 1.0, kappa2: float = 1.0, seed: int = 0,
                    budget: int = 1000, density: float = 0.5) -> LayeredInstance:
    """Layered base graph: n/sigma copies of a Ramsey-like sigma-vertex graph,
    joined by a sampled subgraph of the complete multipartite graph whose
    transversals of size ceil(kappa2 log2 n) all induce ``h``."""
    if sigma < 1 or n % sigma:
        raise InputError(f"n={n} must be a positive multiple of sigma={sigma}")
    n_layers = n // sigma
    layers = _layers(n_layers, sigma)
    g1 = ramsey_like_graph(sigma, h, kappa1, seed=seed, budget=budget)
    threshold2 = ramsey_threshold(n, kappa2, h)
    rng = random.Random(seed * 7919 + 17)
    cross = [(u, v) for a, b in itertools.combinations(range(n_layers), 2) for u in layers[a] for v in layers[b]]
    g2 = Graph.empty(n)
    verified2, attempts = False, budget
    for attempt in range(1, budget + 1):
        g2 = Graph.from_edges(n, [e for e in cross if rng.random() < density])
        if transversal_condition(g2, layers, h, threshold2):
            verified2, attempts = True, attempt
            break
    cert2 = TransversalCertificate(g2, layers, h, threshold2, verified2, seed, attempts, density)
    edges = list(g2.edges())
    for layer in layers:
        off = layer[0] - 1
        edges.extend((u + off, v + off) for u, v in g1.graph.edges())
    g = Graph.from_edges(n, edges)
    params = {"n": n, "sigma": sigma, "kappa1": kappa1, "kappa2": kappa2, "seed": seed, "density": density,
              "threshold1": g1.threshold, "threshold2": threshold2}
    return LayeredInstance(OnlineInstance(g), layers, (None,) * n_layers, "g_n_sigma", params,
                           {"G1": g1, "G2": cert2})


def layered_back(base: LayeredInstance, q_prefix: Sequence[int], v: int) -> frozenset[int]:
    """Back edges of ``v`` once distinguished vertices lose all forward edges.

    Only distinguished vertices of layers before v's layer matter, so the
    answer depends on q_1..q_{L-1} for v in layer L.
    """
    lv = base.layer_of(v)
    back = set(base.graph.back_neighbors(v))
    for i in range(lv):
        back.discard(base.layers[i][q_prefix[i] - 1])
    return frozenset(back)


def embed_sgkh(layered: LayeredInstance, q: Sequence[int]) -> LayeredInstance:
    if not layered.verified:
        raise SoundnessError("refusing an unverified layered graph")
    q = tuple(q)
    sigma = len(layered.layers[0])
    if len(q) != len(layered.layers) - 1:
        raise InputError(f"q must have length {len(layered.layers) - 1}")
    if any(not 1 <= s <= sigma for s in q):
        raise InputError(f"symbols must lie in 1..{sigma}")
    g = Graph(0, ())
    for v in layered.graph.vertices:
        g = g.add_vertex(layered_back(layered, q, v))
    special = tuple(layered.layers[i][s - 1] for i, s in enumerate(q)) + (None,)
    return LayeredInstance(OnlineInstance(g), layered.layers, special, "layered",
                           {**layered.params, "q": list(q)}, layered.certificates)


def _padded(cand: Sequence[int], sigma: int) -> list[int]:
    return list(cand) + [t for t in range(1, sigma + 1) if t not in cand]


class PreemptiveMaxPiAsSGKH:
    """sigma-SGKH algorithm that feeds one layer per request to a preemptive
    Max-pi algorithm and answers the j-th surviving candidate of the layer.

    Advice layout: self-delimited j, then the Max-pi algorithm's advice.
    """

    def __init__(self, pi_alg, layered: LayeredInstance, prop: PropertySpec):
        if not layered.verified:
            raise SoundnessError("refusing an unverified layered graph")
        self.pi_alg = pi_alg
        self.base = layered
        self.prop = prop
        self.sigma = len(layered.layers[0])
        self.max_cand = max(1, layered.params["threshold1"] - 1)

    def start(self, n, tape):
        if n != len(self.base.layers) - 1:
            raise InputError(f"this layered graph serves strings of length {len(self.base.layers) - 1}")
        self.j = read_self_delimited(tape)
        if not 1 <= self.j <= self.max_cand:
            raise ProtocolError(f"candidate index {self.j} outside 1..{self.max_cand}")
        self.session = OnlineSession(self.pi_alg, self.prop, PREEMPTIVE, tape, MAX)
        self.candidates: list[tuple[int, ...]] = []
        self.answers: list[int] = []

    def _present(self, li: int, q_prefix) -> tuple[int, ...]:
        layer = self.base.layers[li]
        for v in layer:
            self.session.reveal(layered_back(self.base, q_prefix, v))
        off = layer[0] - 1
        return tuple(sorted(v - off for v in self.session.held if v in layer))

    def answer(self, i, history, tape):
        cand = self._present(i - 1, history)
        if len(cand) > self.max_cand:
            raise SoundnessError(f"layer {i} keeps {len(cand)} candidates, certificate allows {self.max_cand}")
        self.candidates.append(cand)
        a = _padded(cand, self.sigma)[self.j - 1]
        self.answers.append(a)
        return a

    def finish(self, history, tape):
        self._present(len(self.base.layers) - 1, history)

    def outcome(self, q: Sequence[int]) -> ReductionOutcome:
        t = self.session.transcript()
        special = [self.base.layers[i][s - 1] for i, s in enumerate(q)]
        good = sum(1 for i, s in enumerate(q) if s in self.candidates[i])
        correct = sum(1 for a, s in zip(self.answers, q) if a == s)
        surv = len(set(t.final) & set(special))
        return ReductionOutcome(tuple(self.answers), tuple(self.candidates), good, correct, surv,
                                j=self.j, extra_bits=len(encode_self_delimited(self.j)), transcript=t)


def maxpi_preemptive_to_sgkh(pi_alg, layered: LayeredInstance, prop: PropertySpec) -> PreemptiveMaxPiAsSGKH:
    return PreemptiveMaxPiAsSGKH(pi_alg, layered, prop)


@dataclass
class CandidateAdvice:
    tape: str
    j: int
    candidates: tuple
    correct_by_j: tuple
    transcript: Transcript


def maxpi_preemptive_to_sgkh_advice(q, layered: LayeredInstance, prop: PropertySpec, pi_alg,
                                    pi_oracle: PiOracle) -> CandidateAdvice:
    """Runs the Max-pi algorithm offline and picks the best candidate index.

    ``pi_oracle`` receives the embedded :class:`LayeredInstance`.
    """
    emb = embed_sgkh(layered, q)
    pi_tape = pi_oracle(emb)
    t = run_game(emb.instance, pi_alg, prop, PREEMPTIVE, pi_tape, MAX)
    sigma = len(layered.layers[0])
    max_cand = max(1, layered.params["threshold1"] - 1)
    cands = []
    for i in range(len(q)):
        layer = layered.layers[i]
        held = _survivors_at(t, layer[-1])
        cands.append(tuple(sorted(v - layer[0] + 1 for v in held if v in layer)))
    correct = tuple(
        sum(1 for c, s in zip(cands, q) if _padded(c, sigma)[j - 1] == s) for j in range(1, max_cand + 1)
    )
    best = max(range(1, max_cand + 1), key=lambda j: (correct[j - 1], -j))
    return CandidateAdvice(encode_self_delimited(best) + pi_tape, best, tuple(cands), correct, t)


class PlantedLayerAlgorithm:
    """Preemptive-safe Max-pi algorithm reading ceil(log2 sigma) bits at the
    start of every layer and accepting only the vertex they name."""

    def __init__(self, sigma: int):
        self.sigma = sigma
        self.width = index_width(sigma)

    def start(self, tape):
        self.target = None

    def decide(self, view, tape):
        idx = (view.step - 1) % self.sigma + 1
        if idx == 1:
            self.target = tape.read_uint(self.width) + 1
        return Decision(idx == self.target)

    @staticmethod
    def oracle(layered: LayeredInstance) -> str:
        sigma = len(layered.layers[0])
        w = index_width(sigma)
        out = []
        for layer, sp in zip(layered.layers, layered.special):
            out.append(encode_uint(0 if sp is None else sp - layer[0], w))
        return "".join(out)


# ---------------------------------------------------------------------------
# clique layers for preemptive independent set
# ---------------------------------------------------------------------------


def clique_layers_back(sigma: int, q_prefix: Sequence[int], v: int) -> frozenset[int]:
    lv = (v - 1) // sigma
    back = set(range(lv * sigma + 1, v))
    for i in range(lv):
        designated = i * sigma + q_prefix[i]
        back.update(u for u in range(i * sigma + 1, (i + 1) * sigma + 1) if u != designated)
    return frozenset(back)


def build_clique_layers(q: Sequence[int], sigma: int) -> LayeredInstance:
    q = tuple(q)
    if sigma < 1:
        raise InputError("sigma must be positive")
    if any(not 1 <= s <= sigma for s in q):
        raise InputError(f"symbols must lie in 1..{sigma}")
    n_layers = len(q) + 1
    g = Graph(0, ())
    for v in range(1, n_layers * sigma + 1):
        g = g.add_vertex(clique_layers_back(sigma, q, v))
    layers = _layers(n_layers, sigma)
    special = tuple(layers[i][s - 1] for i, s in enumerate(q)) + (None,)
    return LayeredInstance(OnlineInstance(g), layers, special, "clique-layers",
                           {"sigma": sigma, "n_prime": n_layers, "q": list(q)})


class OneVertexPerLayer:
    """Normalises a preemptive independent-set algorithm on clique layers.

    At the first vertex of a layer every held vertex adjacent to it (a wrong
    guess) is preempted; if nothing of the current layer is held when its
    last vertex arrives, that vertex is accepted.
    """

    def __init__(self, alg, sigma: int):
        self.alg = alg
        self.sigma = sigma

    def start(self, tape):
        self.alg.start(tape)

    def decide(self, view, tape):
        d = self.alg.decide(view, tape)
        layer, idx = divmod(view.step - 1, self.sigma)
        preempt = set(d.preempt) & view.held
        if idx == 0 and layer > 0:
            preempt |= view.held & view.back
        accept = d.accept
        if idx == self.sigma - 1 and not accept:
            here = {u for u in view.held - preempt if (u - 1) // self.sigma == layer}
            accept = not here
        return Decision(accept, frozenset(preempt))


class CliqueLayerSGKH:
    """sigma-SGKH algorithm from a preemptive independent-set algorithm; the
    vertex it keeps in each layer is the guess."""

    def __init__(self, alg, sigma: int):
        self.alg = alg
        self.sigma = sigma

    def start(self, n, tape):
        self.n_layers = n + 1
        self.session = OnlineSession(OneVertexPerLayer(self.alg, self.sigma), INDEPENDENT_SET, PREEMPTIVE, tape, MAX)
        self.answers: list[int] = []
        self.max_per_layer = 0

    def _present(self, li, q_prefix):
        base = li * self.sigma
        for v in range(base + 1, base + self.sigma + 1):
            self.session.reveal(clique_layers_back(self.sigma, q_prefix, v))
            counts: dict[int, int] = {}
            for u in self.session.held:
                counts[(u - 1) // self.sigma] = counts.get((u - 1) // self.sigma, 0) + 1
            self.max_per_layer = max([self.max_per_layer, *counts.values()])
        return sorted(u - base for u in self.session.held if base < u <= base + self.sigma)

    def answer(self, i, history, tape):
        here = self._present(i - 1, history)
        a = here[0] if here else 1
        self.answers.append(a)
        return a

    def finish(self, history, tape):
        self._present(self.n_layers - 1, history)

    def outcome(self, q) -> ReductionOutcome:
        t = self.session.transcript()
        correct = sum(1 for a, s in zip(self.answers, q) if a == s)
        special = {i * self.sigma + s for i, s in enumerate(q)}
        return ReductionOutcome(tuple(self.answers), correct=correct,
                                surviving_special=len(special & set(t.final)), transcript=t)


def indset_preemptive_to_sgkh(alg, sigma: int) -> CliqueLayerSGKH:
    return CliqueLayerSGKH(alg, sigma)


class FirstVertexPerLayer:
    def __init__(self, sigma: int):
        self.sigma = sigma

    def start(self, tape):
        pass

    def decide(self, view, tape):
        return Decision((view.step - 1) % self.sigma == 0)


# ---------------------------------------------------------------------------
# anti string guessing -> preemptive Max-pi with small ratios
# ---------------------------------------------------------------------------


def anti_back(h: Graph, gtilde: Graph, nu_prefix: Sequence[int], v: int) -> frozenset[int]:
    """Back edges of vertex v = (i-1)k + j, the j-th copy of h's vertex in layer i."""
    k = h.n
    i, j = divmod(v - 1, k)
    i, j = i + 1, j + 1
    back = {(i - 1) * k + jj for jj in range(1, j) if h.has_edge(jj, j)}
    for ii in range(1, i):
        if gtilde.has_edge(ii, i):
            back.update((ii - 1) * k + jj for jj in range(1, k + 1) if jj != nu_prefix[ii - 1])
    return frozenset(back)


def build_gnu_anti(nu: Sequence[int], h: Graph, gtilde: RamseyCertificate):
    """Returns (layered instance, X) where X holds the vertex named by each symbol."""
    if not gtilde.verified:
        raise SoundnessError("refusing an unverified base graph")
    k = h.n
    nu = tuple(nu)
    n = gtilde.graph.n
    if len(nu) != n:
        raise InputError(f"nu must have length {n}")
    if any(not 1 <= s <= k for s in nu):
        raise InputError(f"symbols must lie in 1..{k}")
    g = Graph(0, ())
    for v in range(1, n * k + 1):
        g = g.add_vertex(anti_back(h, gtilde.graph, nu, v))
    layers = _layers(n, k)
    x = tuple((i * k) + s for i, s in enumerate(nu))
    layered = LayeredInstance(OnlineInstance(g), layers, x, "anti-layers",
                              {"n": n, "k": k, "nu": list(nu), "threshold": gtilde.threshold},
                              {"G~": gtilde})
    return layered, frozenset(x)


@dataclass(frozen=True)
class AntiFixture:
    h: Graph
    gtilde: RamseyCertificate
    prop: PropertySpec

    @property
    def k(self) -> int:
        return self.h.n

    @property
    def n(self) -> int:
        return self.gtilde.graph.n

    @property
    def error_cap(self) -> int:
        return self.k * self.gtilde.threshold


class PreemptiveMaxPiAsAntiSGKH:
    """Anti-k-SGKH algorithm answering, per layer, the smallest slot whose
    vertex does not survive the layer.  Uses exactly the Max-pi advice."""

    def __init__(self, pi_alg, fixture: AntiFixture):
        if not fixture.gtilde.verified:
            raise SoundnessError("refusing an unverified base graph")
        self.pi_alg = pi_alg
        self.fx = fixture

    def start(self, n, tape):
        if n != self.fx.n:
            raise InputError(f"fixture serves strings of length {self.fx.n}")
        self.session = OnlineSession(self.pi_alg, self.fx.prop, PREEMPTIVE, tape, MAX)
        self.answers: list[int] = []
        self.layer_survivors: list[tuple[int, ...]] = []

    def answer(self, i, history, tape):
        k = self.fx.k
        base = (i - 1) * k
        for v in range(base + 1, base + k + 1):
            self.session.reveal(anti_back(self.fx.h, self.fx.gtilde.graph, history, v))
        s_i = {u - base for u in self.session.held if base < u <= base + k}
        self.layer_survivors.append(tuple(sorted(s_i)))
        for w in range(1, k + 1):
            if w not in s_i:
                self.answers.append(w)
                return w
        raise SoundnessError(f"layer {i} is held completely, so the Max-pi solution contains H")

    def outcome(self, nu) -> ReductionOutcome:
        t = self.session.transcript()
        x = {(i * self.fx.k) + s for i, s in enumerate(nu)}
        return ReductionOutcome(tuple(self.answers), tuple(self.layer_survivors),
                                correct=sum(1 for a, s in zip(self.answers, nu) if a != s),
                                surviving_special=len(x & set(t.final)), transcript=t)


class AntiWithErrorList:
    """Anti-k-SGKH algorithm that repairs the listed positions of
    :class:`PreemptiveMaxPiAsAntiSGKH`.

    Advice layout: self-delimited n, the error position list, then the
    Max-pi algorithm's advice.
    """

    def __init__(self, pi_alg, fixture: AntiFixture):
        self.inner = PreemptiveMaxPiAsAntiSGKH(pi_alg, fixture)
        self.fx = fixture

    def start(self, n, tape):
        n_adv = read_self_delimited(tape)
        if n_adv != n:
            raise ProtocolError(f"advice encodes n={n_adv}, input has n={n}")
        self.errors = frozenset(_read_index_list(tape, n))
        self.header_bits = tape.bits_read
        self.inner.start(n, tape)

    def answer(self, i, history, tape):
        y = self.inner.answer(i, history, tape)
        if i in self.errors:
            return 1 if y != 1 else 2
        return y

    def outcome(self, nu) -> ReductionOutcome:
        out = self.inner.outcome(nu)
        out.s_error = tuple(sorted(self.errors))
        out.extra_bits = self.header_bits
        return out


def maxpi_preemptive_to_antisgkh(pi_alg, fixture: AntiFixture) -> AntiWithErrorList:
    return AntiWithErrorList(pi_alg, fixture)


@dataclass
class ErrorListAdvice:
    tape: str
    s_error: tuple[int, ...]
    prime_answers: tuple[int, ...]
    header_bits: int
    transcript: Transcript


def maxpi_preemptive_to_antisgkh_advice(nu, fixture: AntiFixture, pi_alg, pi_oracle: PiOracle) -> ErrorListAdvice:
    nu = tuple(nu)
    layered, _ = build_gnu_anti(nu, fixture.h, fixture.gtilde)
    pi_tape = pi_oracle(layered)
    t = run_game(layered.instance, pi_alg, fixture.prop, PREEMPTIVE, pi_tape, MAX)
    k = fixture.k
    answers = []
    for i, layer in enumerate(layered.layers):
        held = _survivors_at(t, layer[-1])
        s_i = {v - layer[0] + 1 for v in held if v in layer}
        free = [w for w in range(1, k + 1) if w not in s_i]
        answers.append(free[0] if free else 1)
    wrong = [i + 1 for i, (a, s) in enumerate(zip(answers, nu)) if a == s]
    s_error = tuple(wrong[:fixture.error_cap])
    header = encode_self_delimited(len(nu)) + _encode_index_list(s_error, len(nu))
    return ErrorListAdvice(header + pi_tape, s_error, tuple(answers), len(header), t)


class PlantedSlotAlgorithm:
    """Reads ceil(log2 k) bits per layer and accepts the slot they name."""

    def __init__(self, k: int):
        self.k = k
        self.width = index_width(k)

    def start(self, tape):
        self.target = None

    def decide(self, view, tape):
        slot = (view.step - 1) % self.k + 1
        if slot == 1:
            self.target = tape.read_uint(self.width) + 1
        return Decision(slot == self.target)

    @staticmethod
    def oracle(layered: LayeredInstance) -> str:
        k = len(layered.layers[0])
        w = index_width(k)
        return "".join(encode_uint(x - layer[0], w) for layer, x in zip(layered.layers, layered.special))


# ---------------------------------------------------------------------------
# Min-pi with finitely many obligatory subgraphs
# ---------------------------------------------------------------------------


class ObligatoryIndexAdvice:
    """Min-pi algorithm accepting exactly the vertices listed on the tape.

    Advice layout: self-delimited n (0 marks an instance without the
    property), then ``k_max`` fixed-width indices.  The list is the longest
    strictly increasing prefix, so shorter solutions are padded by repeating
    their last index.
    """

    def __init__(self, k_max: int):
        if k_max < 1:
            raise InputError("k_max must be positive")
        self.k_max = k_max

    def start(self, tape):
        n = read_self_delimited(tape)
        self.refuse = n == 0
        self.chosen: set[int] = set()
        if self.refuse:
            return
        w = index_width(n)
        last = 0
        for _ in range(self.k_max):
            idx = tape.read_uint(w) + 1
            if idx <= last:
                break
            self.chosen.add(idx)
            last = idx
        # remaining fields are still part of the fixed-length block
        rest = self.k_max - len(self.chosen) - 1
        if rest > 0:
            tape.read_uint(rest * w)

    def decide(self, view, tape):
        return Decision(self.refuse or view.step in self.chosen)


def _k_max(p: PropertySpec, k_max: int | None) -> int:
    if k_max is not None:
        return k_max
    if p.witnesses:
        return max(w.n for w in p.witnesses)
    raise InputError(f"{p.name} has no finite witness list; pass k_max")


def minpi_obligatory_algorithm(p: PropertySpec, k_max: int | None = None) -> ObligatoryIndexAdvice:
    if p.hereditary:
        raise InputError(f"{p.name} is not cohereditary")
    return ObligatoryIndexAdvice(_k_max(p, k_max))


def minpi_obligatory_advice(inst: OnlineInstance, p: PropertySpec, k_max: int | None = None) -> str:
    k_max = _k_max(p, k_max)
    opt = opt_min_pi(inst.presented_graph(), p)
    if opt is None:
        return encode_self_delimited(0)
    if len(opt) > k_max:
        raise SoundnessError(f"optimal solution has {len(opt)} vertices, more than k_max={k_max}")
    n = inst.n
    idx = sorted(opt)
    idx += [idx[-1]] * (k_max - len(idx))
    w = index_width(n)
    return encode_self_delimited(n) + "".join(encode_uint(i - 1, w) for i in idx)


def obligatory_advice_bound(n: int, k_max: int) -> int:
    return len(encode_self_delimited(n)) + k_max * index_width(n)


build_gnu_thm5 = build_zero_deletion  # name used by the documented API

