"""Online game simulation with advice.

An instance is revealed one vertex at a time together with its edges to
earlier vertices.  The algorithm answers with a :class:`Decision`; in
preemptive mode it may also discard vertices it holds.  Advice comes from an
:class:`AdviceTape` that counts every bit read.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Protocol, Sequence

from .errors import DecodeError, InputError, ParseError, ProtocolError
from .graph_core import (
    Graph,
    IncrementalChecker,
    PropertySpec,
    dumps_graph,
    opt_max_pi,
    parse_graph_text,
    satisfies_set,
)

PLAIN = "plain"
PREEMPTIVE = "preemptive"
MAX = "max"
MIN = "min"


# -- advice tape ----------------------------------------------------------------


class AdviceTape:
    """Read-once bit source.  Reads past the end yield 0 and still count."""

    def __init__(self, content: str | Iterable[int] = ""):
        bits = "".join(str(int(b)) for b in content) if not isinstance(content, str) else content
        if set(bits) - {"0", "1"}:
            raise InputError("advice content must be a bit string")
        self._content = bits
        self._cursor = 0

    @property
    def content(self) -> str:
        return self._content

    @property
    def bits_read(self) -> int:
        return self._cursor

    def read(self) -> int:
        pos = self._cursor
        self._cursor += 1
        return int(self._content[pos]) if pos < len(self._content) else 0

    def read_uint(self, width: int) -> int:
        value = 0
        for _ in range(width):
            value = value << 1 | self.read()
        return value

    def fresh(self) -> AdviceTape:
        return AdviceTape(self._content)

    def __len__(self):
        return len(self._content)

    def __repr__(self):
        return f"AdviceTape({self._content!r}, bits_read={self._cursor})"


def encode_uint(value: int, width: int) -> str:
    if value < 0 or value.bit_length() > width:
        raise InputError(f"{value} does not fit in {width} bits")
    return format(value, "b").zfill(width) if width else ""


def index_width(n: int) -> int:
    """Bits needed for a vertex index in 1..n (stored as index - 1)."""
    return max(n - 1, 0).bit_length()


def encode_self_delimited(n: int) -> str:
    """Unary length of the length, then the length, then the value.

    ``n`` has ``m`` significant bits and ``m`` has ``l`` significant bits;
    the code is ``1^l 0``, then ``m`` in ``l`` bits, then ``n`` in ``m`` bits.
    """
    if n < 0:
        raise InputError("only nonnegative integers are encodable")
    m = n.bit_length()
    ell = m.bit_length()
    return "1" * ell + "0" + encode_uint(m, ell) + encode_uint(n, m)


def decode_self_delimited(bits: str, start: int = 0) -> tuple[int, int]:
    """Decode one codeword at ``start``; returns (value, bits consumed)."""
    pos = start

    def take(width):
        nonlocal pos
        if pos + width > len(bits):
            raise DecodeError("codeword truncated", len(bits))
        chunk = bits[pos:pos + width]
        pos += width
        return int(chunk, 2) if chunk else 0

    ell = 0
    while True:
        if pos >= len(bits):
            raise DecodeError("unterminated length prefix", pos)
        b = bits[pos]
        pos += 1
        if b == "0":
            break
        if b != "1":
            raise DecodeError(f"invalid symbol {b!r}", pos - 1)
        ell += 1
    here = pos
    m = take(ell)
    if m.bit_length() != ell:
        raise DecodeError("non-canonical length field", here)
    here = pos
    n = take(m)
    if n.bit_length() != m:
        raise DecodeError("non-canonical value field", here)
    return n, pos - start


def read_self_delimited(tape: AdviceTape) -> int:
    start = tape.bits_read
    ell = 0
    while tape.read():
        ell += 1
        if ell > 64:
            raise DecodeError("length prefix too long", start)
    m = tape.read_uint(ell)
    if m.bit_length() != ell:
        raise DecodeError("non-canonical length field", start)
    n = tape.read_uint(m)
    if n.bit_length() != m:
        raise DecodeError("non-canonical value field", start)
    return n


def compose_advice(parts: Sequence[str]) -> AdviceTape:
    return AdviceTape("".join(parts))


# -- instances ------------------------------------------------------------------


@dataclass(frozen=True)
class OnlineInstance:
    graph: Graph
    order: tuple[int, ...] | None = None
    blind: bool = False

    def __post_init__(self):
        if self.order is not None and sorted(self.order) != list(self.graph.vertices):
            raise InputError("order must be a permutation of the vertices")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def sequence(self) -> tuple[int, ...]:
        return self.order if self.order is not None else tuple(self.graph.vertices)

    def back_positions(self, step: int) -> frozenset[int]:
        """Positions (< step) of earlier vertices adjacent to the vertex at ``step``."""
        seq = self.sequence
        v = seq[step - 1]
        return frozenset(i + 1 for i in range(step - 1) if self.graph.has_edge(seq[i], v))

    def presented_graph(self) -> Graph:
        """The graph relabelled by revelation position."""
        if self.order is None:
            return self.graph
        pos = {v: i + 1 for i, v in enumerate(self.order)}
        return Graph.from_edges(self.n, [(pos[u], pos[v]) for u, v in self.graph.edges()])


def dumps_instance(inst: OnlineInstance, comment: str | None = None) -> str:
    return dumps_graph(inst.presented_graph(), ["blind"] if inst.blind else [], comment)


def loads_instance(text: str) -> OnlineInstance:
    g, flags = parse_graph_text(text)
    unknown = flags - {"blind"}
    if unknown:
        raise ParseError(f"unknown header flags {sorted(unknown)}")
    return OnlineInstance(g, blind="blind" in flags)


# -- algorithms -----------------------------------------------------------------


@dataclass(frozen=True)
class Decision:
    accept: bool
    preempt: frozenset[int] = frozenset()


ACCEPT = Decision(True)
REJECT = Decision(False)


@dataclass(frozen=True)
class StepView:
    """What the algorithm sees at one step; vertices are revelation positions."""

    step: int
    revealed: Graph | None
    back: frozenset[int] | None
    held: frozenset[int]


class OnlineAlgorithm(Protocol):
    def start(self, tape: AdviceTape) -> None: ...

    def decide(self, view: StepView, tape: AdviceTape) -> Decision: ...


# -- transcripts ----------------------------------------------------------------


@dataclass(frozen=True)
class StepRecord:
    vertex: int
    accepted: bool
    preempted: tuple[int, ...]
    survivors: tuple[int, ...]


@dataclass
class Transcript:
    steps: list[StepRecord]
    final: tuple[int, ...]
    objective: float
    bits_read: int
    feasible_throughout: bool
    violation_step: int | None = None

    @property
    def profit(self):
        return self.objective

    def to_json(self) -> str:
        def num(x):
            if isinstance(x, float) and math.isinf(x):
                return "inf" if x > 0 else "-inf"
            return x

        doc = {
            "steps": [
                {"accepted": s.accepted, "preempted": list(s.preempted), "survivors": list(s.survivors)}
                for s in self.steps
            ],
            "objective": num(self.objective),
            "bits_read": self.bits_read,
            "feasible_throughout": self.feasible_throughout,
        }
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str, vertices: Sequence[int] | None = None) -> Transcript:
        doc = json.loads(text)
        steps = []
        for i, s in enumerate(doc["steps"]):
            v = vertices[i] if vertices is not None else i + 1
            steps.append(StepRecord(v, bool(s["accepted"]), tuple(s["preempted"]), tuple(s["survivors"])))
        obj = doc["objective"]
        obj = float(obj) if isinstance(obj, str) else obj
        final = steps[-1].survivors if steps else ()
        return cls(steps, final, obj, doc["bits_read"], doc["feasible_throughout"])


def competitive_ratio(objective, opt_value, kind: str = MAX):
    """OPT/ALG for maximisation, ALG/OPT for minimisation; infinities map to inf."""
    if isinstance(objective, Transcript):
        objective = objective.objective
    if opt_value < 1:
        raise InputError("optimum must be at least 1")
    if kind == MAX:
        if objective == -math.inf or objective <= 0:
            return math.inf
        return Fraction(opt_value) / Fraction(objective)
    if kind == MIN:
        if objective == math.inf:
            return math.inf
        return Fraction(objective) / Fraction(opt_value)
    raise InputError(f"objective must be {MAX!r} or {MIN!r}")


# -- the game -------------------------------------------------------------------


class OnlineSession:
    """Steps one online game; used directly by reductions that simulate an
    inner algorithm vertex by vertex, and by :func:`run_game`.

    Vertices are numbered by position; ``labels`` maps positions to the
    names recorded in the transcript.
    """

    def __init__(self, alg, prop: PropertySpec, mode: str = PLAIN, tape: AdviceTape | None = None,
                 objective: str = MAX, blind: bool = False, labels: Sequence[int] | None = None):
        if mode not in (PLAIN, PREEMPTIVE):
            raise InputError(f"unknown mode {mode!r}")
        if objective not in (MAX, MIN):
            raise InputError(f"unknown objective {objective!r}")
        if objective == MAX and not prop.hereditary:
            raise InputError(f"{prop.name} is not hereditary; use objective 'min'")
        if objective == MIN and prop.hereditary:
            raise InputError(f"{prop.name} is not cohereditary; use objective 'max'")
        self.alg = alg
        self.prop = prop
        self.mode = mode
        self.kind = objective
        self.blind = blind
        self.tape = tape if tape is not None else AdviceTape()
        self.labels = labels
        self.revealed = Graph(0, ())
        self.held: set[int] = set()
        self.gone: set[int] = set()
        self.checker = IncrementalChecker(prop)
        self.records: list[StepRecord] = []
        self.violation_step: int | None = None
        alg.start(self.tape)

    @property
    def step(self) -> int:
        return self.revealed.n

    def label(self, pos: int) -> int:
        return self.labels[pos - 1] if self.labels is not None else pos

    def reveal(self, back: Iterable[int]) -> Decision:
        back = frozenset(back)
        self.revealed = self.revealed.add_vertex(back)
        pos = self.revealed.n
        view = StepView(
            pos,
            None if self.blind else self.revealed,
            None if self.blind else back,
            frozenset(self.held),
        )
        d = self.alg.decide(view, self.tape)
        preempt = frozenset(d.preempt)
        if preempt and self.mode == PLAIN:
            raise ProtocolError(f"step {pos}: preemption is not allowed in plain mode")
        bad = preempt - self.held
        if bad:
            raise ProtocolError(f"step {pos}: cannot preempt vertices not held: {sorted(bad)}")
        if preempt:
            self.held -= preempt
            self.gone |= preempt
            self.checker = self.checker.remove(preempt)
        if d.accept:
            ok, self.checker = self.checker.add(pos, back & self.held)
            self.held.add(pos)
        else:
            self.gone.add(pos)
        if self.kind == MAX and not self.checker.ok and self.violation_step is None:
            self.violation_step = pos
        self.records.append(StepRecord(
            self.label(pos), bool(d.accept),
            tuple(sorted(self.label(p) for p in preempt)),
            tuple(sorted(self.label(p) for p in self.held)),
        ))
        return d

    def transcript(self) -> Transcript:
        final = tuple(sorted(self.label(p) for p in self.held))
        if self.kind == MAX:
            feasible = self.violation_step is None
            objective = len(final) if feasible else -math.inf
        else:
            feasible = satisfies_set(self.revealed, self.held, self.prop)
            objective = len(final) if feasible else math.inf
        return Transcript(list(self.records), final, objective, self.tape.bits_read, feasible, self.violation_step)


def run_game(inst: OnlineInstance, alg, prop: PropertySpec, mode: str = PLAIN,
             tape: AdviceTape | str | None = None, objective: str = MAX) -> Transcript:
    """Play one full game.  The tape is copied, so a tape can be reused."""
    if tape is None:
        tape = AdviceTape()
    elif isinstance(tape, str):
        tape = AdviceTape(tape)
    else:
        tape = tape.fresh()
    session = OnlineSession(alg, prop, mode, tape, objective, inst.blind, inst.sequence)
    for step in range(1, inst.n + 1):
        session.reveal(inst.back_positions(step))
    return session.transcript()


# -- stock algorithms ---------------------------------------------------------------


class RejectAll:
    def start(self, tape):
        pass

    def decide(self, view, tape):
        return REJECT


class AcceptAll:
    def start(self, tape):
        pass

    def decide(self, view, tape):
        return ACCEPT


class BitmapAdvice:
    """Reads one advice bit per vertex and accepts on 1."""

    def start(self, tape):
        pass

    def decide(self, view, tape):
        return Decision(bool(tape.read()))


@dataclass
class GreedyAccept:
    """Accepts a vertex whenever the held set stays feasible.  Needs a
    non-blind instance."""

    prop: PropertySpec

    def start(self, tape):
        pass

    def decide(self, view, tape):
        return Decision(satisfies_set(view.revealed, view.held | {view.step}, self.prop))


@dataclass
class AdviceDrivenPreemptive:
    """Reads one bit per vertex; on 1 it accepts, preempting the most
    recently held neighbours until the property holds again, and rejects if
    that is not enough."""

    prop: PropertySpec

    def start(self, tape):
        pass

    def decide(self, view, tape):
        if not tape.read():
            return REJECT
        g, v = view.revealed, view.step
        held = set(view.held)
        drop = set()
        for u in sorted(view.back & held, reverse=True):
            if satisfies_set(g, held | {v}, self.prop):
                break
            held.discard(u)
            drop.add(u)
        if satisfies_set(g, held | {v}, self.prop):
            return Decision(True, frozenset(drop))
        return REJECT


def bitmap_oracle(inst: OnlineInstance, prop: PropertySpec) -> str:
    """Advice for :class:`BitmapAdvice`: the indicator of an optimal solution
    in revelation order."""
    opt = opt_max_pi(inst.graph, prop)
    return "".join("1" if v in opt else "0" for v in inst.sequence)
