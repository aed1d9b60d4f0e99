"""Exact minimum advice for tiny instance families.

At a fixed input size a deterministic algorithm with advice is a choice of
one deterministic strategy per advice value, so the least advice needed for
ratio c is ceil(log2 m), where m is the fewest groups into which the family
splits such that one strategy serves every member of a group.  A strategy
is an output per node of the trie of observation histories.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InputError, ResourceError, VerificationError
from .graph_core import PropertySpec, get_property, opt_max_pi, satisfies_set
from .guessing_games import (
    ANTI,
    MAXASG_BLIND,
    MAXASG_KNOWN,
    SGKH,
    GuessingInstance,
    TableStrategy,
    play_guessing,
    score_answers,
)
from .online_engine import MAX, PLAIN, Decision, OnlineInstance, encode_uint, run_game

GRAPH = "graph"
GAMES = (SGKH, ANTI, MAXASG_KNOWN, MAXASG_BLIND, GRAPH)

FAMILY_BOUND = int(os.environ.get("ADVICE_LAB_FAMILY_BOUND", 256))
NODE_BUDGET = int(os.environ.get("ADVICE_LAB_NODE_BUDGET", 200_000))
SEARCH_BUDGET = int(os.environ.get("ADVICE_LAB_SEARCH_BUDGET", 200_000))

DEFAULT_GRID = (1, Fraction(4, 3), Fraction(3, 2), 2, 3, 4, math.inf)


def _ratio(c):
    if c == math.inf or (isinstance(c, float) and math.isinf(c)):
        return math.inf
    c = Fraction(c) if not isinstance(c, str) else Fraction(c)
    if c < 1:
        raise InputError(f"ratio must be at least 1, got {c}")
    return c


@dataclass
class InstanceFamily:
    """A finite family sharing one observation alphabet and one target ratio.

    String games: profit is correct guesses (sgkh), wrong guesses (anti) or
    zeros answered (maxasg), each measured against its optimum n, n or
    zeros(x).  Graph games are non-preemptive Max-pi with profit |S|.
    """

    game: str
    items: tuple
    prop: PropertySpec | None = None
    c: object = 1
    bound: int = FAMILY_BOUND
    _opt: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.game not in GAMES:
            raise InputError(f"unknown game {self.game!r}")
        self.items = tuple(self.items)
        if not self.items:
            raise InputError("empty family")
        if len(self.items) > self.bound:
            raise ResourceError(f"family of {len(self.items)} exceeds the bound {self.bound}")
        self.c = _ratio(self.c)
        if self.game == GRAPH:
            if self.prop is None or not self.prop.hereditary:
                raise InputError("graph families need a hereditary property")
        else:
            ns = {it.n for it in self.items}
            sig = {it.sigma for it in self.items}
            if len(ns) != 1 or len(sig) != 1 or any(it.variant != self.game for it in self.items):
                raise InputError("string families must share game, length and alphabet")

    # -- constructors ------------------------------------------------------

    @classmethod
    def all_strings(cls, game: str, n: int, sigma: int = 2, c=1, bound: int = FAMILY_BOUND) -> InstanceFamily:
        if n < 1:
            raise InputError("n must be positive")
        alphabet = range(2) if game in (MAXASG_KNOWN, MAXASG_BLIND) else range(1, sigma + 1)
        count = len(alphabet) ** n
        if count > bound:
            raise ResourceError(f"{count} strings exceed the family bound {bound}")
        sigma = 2 if game in (MAXASG_KNOWN, MAXASG_BLIND) else sigma
        items = [GuessingInstance(sigma, x, game) for x in itertools.product(alphabet, repeat=n)]
        return cls(game, tuple(items), c=c, bound=bound)

    @classmethod
    def from_strings(cls, game: str, strings: Sequence[Sequence[int]], sigma: int = 2, c=1) -> InstanceFamily:
        return cls(game, tuple(GuessingInstance(sigma, tuple(x), game) for x in strings), c=c)

    @classmethod
    def graphs(cls, instances: Sequence[OnlineInstance], prop: PropertySpec | str, c=1) -> InstanceFamily:
        if isinstance(prop, str):
            prop = get_property(prop)
        return cls(GRAPH, tuple(instances), prop, c)

    def with_ratio(self, c) -> InstanceFamily:
        return InstanceFamily(self.game, self.items, self.prop, c, self.bound)

    # -- observation structure --------------------------------------------

    def __len__(self):
        return len(self.items)

    def length(self, idx: int) -> int:
        return self.items[idx].n

    @property
    def outputs(self) -> tuple:
        if self.game in (MAXASG_KNOWN, MAXASG_BLIND, GRAPH):
            return (0, 1)
        return tuple(range(1, self.items[0].sigma + 1))

    def node_keys(self, idx: int) -> list:
        """History-node key before each decision of instance ``idx``."""
        it = self.items[idx]
        if self.game == MAXASG_BLIND:
            return list(range(1, it.n + 1))
        if self.game == GRAPH:
            backs = [it.back_positions(t) for t in range(1, it.n + 1)]
            return [tuple(backs[:t]) for t in range(1, it.n + 1)]
        return [tuple(it.x[:t]) for t in range(it.n)]

    def label(self, idx: int) -> str:
        it = self.items[idx]
        if self.game == GRAPH:
            return str(idx)
        return "".join(str(s) for s in it.x) if it.sigma < 10 else ",".join(map(str, it.x))

    # -- scoring -----------------------------------------------------------

    def opt(self, idx: int) -> int:
        if idx not in self._opt:
            it = self.items[idx]
            if self.game == GRAPH:
                self._opt[idx] = len(opt_max_pi(it.presented_graph(), self.prop))
            elif self.game in (MAXASG_KNOWN, MAXASG_BLIND):
                self._opt[idx] = list(it.x).count(0)
            else:
                self._opt[idx] = it.n
        return self._opt[idx]

    def _profit(self, idx: int, ys: Sequence[int]):
        """Profit of a partial output, or None if already infeasible."""
        it = self.items[idx]
        t = len(ys)
        if self.game == SGKH:
            return sum(1 for a, b in zip(ys, it.x) if a == b)
        if self.game == ANTI:
            return sum(1 for a, b in zip(ys, it.x) if a != b)
        if self.game == GRAPH:
            chosen = [v for v, a in zip(range(1, t + 1), ys) if a]
            g = it.presented_graph()
            if chosen and not satisfies_set(g, chosen, self.prop):
                return None
            return len(chosen)
        if any(a < b for a, b in zip(ys, it.x)):
            return None
        return list(ys).count(0)

    def prefix_ok(self, idx: int, ys: Sequence[int], c=None) -> bool:
        """Can some completion of ``ys`` still reach ratio ``c``?  Exact at full length."""
        c = self.c if c is None else c
        p = self._profit(idx, ys)
        if p is None:
            return False
        if c == math.inf:
            return True
        best = p + (self.length(idx) - len(ys))
        return best * c >= self.opt(idx)

    def ok(self, idx: int, ys: Sequence[int], c=None) -> bool:
        return len(ys) == self.length(idx) and self.prefix_ok(idx, ys, c)


def trie_size(family: InstanceFamily, members: Sequence[int]) -> int:
    return len({k for i in members for k in family.node_keys(i)})


def group_feasible(family: InstanceFamily, members: Sequence[int], c=None, node_budget: int = NODE_BUDGET):
    """One strategy (node key -> output) serving all ``members`` at ratio c, or None.

    Instances below a trie node are split between its children, so after an
    output is fixed at a node the child subtrees are solved independently.
    """
    c = family.c if c is None else _ratio(c)
    members = list(members)
    if trie_size(family, members) > node_budget:
        raise ResourceError(f"observation trie exceeds {node_budget} nodes")
    keys = {i: family.node_keys(i) for i in members}
    outs = family.outputs

    def solve(depth, ms, prefix):
        key = keys[ms[0]][depth]
        for o in outs:
            new = {i: prefix[i] + (o,) for i in ms}
            if not all(family.prefix_ok(i, new[i], c) for i in ms):
                continue
            table = {key: o}
            children: dict = {}
            for i in ms:
                if depth + 1 < len(keys[i]):
                    children.setdefault(keys[i][depth + 1], []).append(i)
            for sub_ms in children.values():
                sub = solve(depth + 1, sub_ms, new)
                if sub is None:
                    break
                table.update(sub)
            else:
                return table
        return None

    roots: dict = {}
    for i in members:
        roots.setdefault(keys[i][0], []).append(i)
    table: dict = {}
    for ms in roots.values():
        sub = solve(0, ms, {i: () for i in ms})
        if sub is None:
            return None
        table.update(sub)
    return table


@dataclass
class CoverResult:
    m: int
    bits: int
    assignment: dict
    witnesses: list
    optimal: bool
    c: object = 1
    lower_bound: int = 1

    def to_dict(self) -> dict:
        def key_out(k):
            if isinstance(k, tuple):
                return [sorted(x) if isinstance(x, frozenset) else x for x in k]
            return k

        c = "inf" if self.c == math.inf else str(self.c)
        return {
            "m": self.m,
            "bits": self.bits,
            "c": c,
            "optimal": self.optimal,
            "assignment": self.assignment,
            "witnesses": [[[key_out(k), v] for k, v in w.items()] for w in self.witnesses],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def bits_for(m: int) -> int:
    return 0 if m <= 1 else (m - 1).bit_length()


def _order(family: InstanceFamily, conflicts: dict, order: str) -> list[int]:
    idx = list(range(len(family)))
    if order == "given":
        return idx
    if order == "reverse":
        return idx[::-1]
    if order == "conflicts":
        return sorted(idx, key=lambda i: (-len(conflicts[i]), i))
    raise InputError(f"unknown order {order!r}")


def min_advice_bits(family: InstanceFamily, c=None, order: str = "conflicts",
                    budget: int = SEARCH_BUDGET, node_budget: int = NODE_BUDGET) -> CoverResult:
    """Fewest strategy groups covering ``family`` at ratio c, by branch and bound.

    Feasibility of groups is monotone under taking subsets, so pairs that
    cannot share a strategy give a conflict graph; a greedy clique in it is
    the lower bound that stops the search early.
    """
    c = family.c if c is None else _ratio(c)
    n = len(family)
    singles = [group_feasible(family, [i], c, node_budget) for i in range(n)]
    bad = [family.label(i) for i in range(n) if singles[i] is None]
    if bad:
        raise InputError(f"no strategy reaches ratio {c} on {bad[:3]}")
    cache: dict[frozenset, dict | None] = {frozenset([i]): singles[i] for i in range(n)}

    def feasible(group: frozenset):
        if group not in cache:
            cache[group] = group_feasible(family, sorted(group), c, node_budget)
        return cache[group]

    conflicts = {i: set() for i in range(n)}
    for i, j in itertools.combinations(range(n), 2):
        if feasible(frozenset((i, j))) is None:
            conflicts[i].add(j)
            conflicts[j].add(i)
    seq = _order(family, conflicts, order)

    clique: list[int] = []
    for i in sorted(range(n), key=lambda i: (-len(conflicts[i]), i)):
        if all(j in conflicts[i] for j in clique):
            clique.append(i)
    lower = max(1, len(clique))

    # first-fit gives the initial incumbent
    groups: list[frozenset] = []
    for i in seq:
        for gi, g in enumerate(groups):
            if feasible(g | {i}) is not None:
                groups[gi] = g | {i}
                break
        else:
            groups.append(frozenset([i]))
    best = list(groups)
    steps = 0
    exhausted = True

    rank = {i: r for r, i in enumerate(seq)}

    def options(i, cur):
        return [gi for gi, g in enumerate(cur) if not conflicts[i] & g and feasible(g | {i}) is not None]

    def rec(left, cur):
        # branch on the instance with the fewest groups it can join
        nonlocal best, steps, exhausted
        if len(cur) >= len(best) or len(best) == lower:
            return
        if not left:
            best = list(cur)
            return
        steps += 1
        if steps > budget:
            exhausted = False
            return
        pick, opts = None, None
        stuck: list[int] = []
        for i in sorted(left, key=rank.__getitem__):
            o = options(i, cur)
            if not o:
                if all(j in conflicts[i] for j in stuck):
                    stuck.append(i)
                if len(cur) + len(stuck) >= len(best):
                    return
            if pick is None or len(o) < len(opts):
                pick, opts = i, o
        rest = left - {pick}
        for gi in opts:
            g = cur[gi]
            cur[gi] = g | {pick}
            rec(rest, cur)
            cur[gi] = g
        if len(cur) + 1 < len(best):
            cur.append(frozenset([pick]))
            rec(rest, cur)
            cur.pop()

    rec(frozenset(range(n)), [])
    assignment, witnesses = {}, []
    for ci, g in enumerate(sorted(best, key=min)):
        witnesses.append(feasible(g))
        for i in g:
            assignment[family.label(i)] = ci
    assignment = dict(sorted(assignment.items()))
    m = len(best)
    return CoverResult(m, bits_for(m), assignment, witnesses, exhausted or m == lower, c, lower)


def bits_vs_ratio_curve(family: InstanceFamily, grid: Sequence = DEFAULT_GRID, **kw) -> list[tuple]:
    return [(c, min_advice_bits(family, c, **kw).bits) for c in grid]


# -- replay ------------------------------------------------------------------------


class ClassSelectingGuesser:
    """Reads the class index, then plays that class's table."""

    def __init__(self, witnesses, bits, blind):
        self.witnesses, self.bits, self.blind = witnesses, bits, blind

    def start(self, n, tape):
        cls = tape.read_uint(self.bits)
        self.inner = TableStrategy(self.witnesses[cls], self.blind)

    def answer(self, i, history, tape):
        return self.inner.answer(i, history, tape)


class ClassSelectingPi:
    def __init__(self, witnesses, bits):
        self.witnesses, self.bits = witnesses, bits

    def start(self, tape):
        self.table = self.witnesses[tape.read_uint(self.bits)]
        self.backs: list = []

    def decide(self, view, tape):
        self.backs.append(view.back)
        return Decision(bool(self.table[tuple(self.backs)]))


def verify_cover(family: InstanceFamily, result: CoverResult, c=None) -> bool:
    """Replays every instance with its class index as advice; raises on failure."""
    c = result.c if c is None else _ratio(c)
    label_to_idx = {family.label(i): i for i in range(len(family))}
    if set(label_to_idx) != set(result.assignment):
        raise VerificationError("assignment does not cover the family")
    for label, cls in result.assignment.items():
        i = label_to_idx[label]
        tape = encode_uint(cls, result.bits)
        if family.game == GRAPH:
            t = run_game(family.items[i], ClassSelectingPi(result.witnesses, result.bits), family.prop, PLAIN, tape, MAX)
            final = set(t.final)
            ys = [1 if v in final else 0 for v in family.items[i].sequence]
            bits_read = t.bits_read
        else:
            alg = ClassSelectingGuesser(result.witnesses, result.bits, family.game == MAXASG_BLIND)
            rep = play_guessing(family.items[i], alg, tape)
            ys = rep.answers
            bits_read = rep.bits_read
            score_answers(family.items[i], ys)
        if bits_read != result.bits:
            raise VerificationError(f"{label}: read {bits_read} bits, expected {result.bits}")
        if not family.ok(i, ys, c):
            raise VerificationError(f"{label}: class {cls} misses ratio {c}")
    return True
