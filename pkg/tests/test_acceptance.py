"""Acceptance criteria, one check per criterion with its runtime limit.

Run under pytest (a PASS/FAIL line per criterion appears in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from hereditary_advice.exact_advice import InstanceFamily, bits_vs_ratio_curve, min_advice_bits, verify_cover
from hereditary_advice.graph_core import (
    CONTAINS_CYCLE,
    INDEPENDENT_SET,
    TRIANGLE_FREE,
    Graph,
    induced_subgraph,
    is_isomorphic,
    opt_max_pi,
    opt_min_pi,
    ramsey_like_graph,
    satisfies_set,
)
from hereditary_advice.guessing_games import (
    ANTI,
    MAXASG_KNOWN,
    SGKH,
    GuessingInstance,
    anti_small_ratio_bound,
    b_c,
    clique_layer_alpha,
    entropy_h,
    guess_fraction_entropy,
    h_of_c,
    play_guessing,
)
from hereditary_advice.online_engine import (
    MIN,
    PREEMPTIVE,
    AdviceDrivenPreemptive,
    BitmapAdvice,
    Decision,
    GreedyAccept,
    OnlineInstance,
    RejectAll,
    bitmap_oracle,
    competitive_ratio,
    decode_self_delimited,
    encode_self_delimited,
    index_width,
    run_game,
)
from hereditary_advice.reductions import (
    AntiFixture,
    BitmapGuesser,
    FirstVertexPerLayer,
    PlantedLayerAlgorithm,
    PlantedSlotAlgorithm,
    build_clique_layers,
    build_g_n_sigma,
    build_gnu_anti,
    build_zero_deletion,
    embed_sgkh,
    indset_preemptive_to_sgkh,
    maxasgu_to_maxpi,
    maxpi_preemptive_to_antisgkh,
    maxpi_preemptive_to_antisgkh_advice,
    maxpi_preemptive_to_sgkh,
    maxpi_preemptive_to_sgkh_advice,
    maxpi_to_maxasgk,
    maxpi_to_maxasgk_advice,
    minpi_obligatory_advice,
    minpi_obligatory_algorithm,
    opt_string,
    transversal_condition,
)

TOL = 1e-9
K2 = Graph.complete(2)
RESULTS: list[tuple[int, bool, str]] = []


def log_grid(lo, hi, points):
    return [lo * (hi / lo) ** (i / (points - 1)) for i in range(points)]


# -- criteria ---------------------------------------------------------------------


def criterion_1():
    errs = []
    for sigma in range(2, 33):
        errs.append(abs(guess_fraction_entropy(sigma, 1) - 1))
        errs.append(abs(guess_fraction_entropy(sigma, 1 / sigma)))
        errs.append(abs(entropy_h(sigma, (sigma - 1) / sigma) - 1))
    errs.append(abs(entropy_h(2, 0.5) - 1))
    errs.append(abs(b_c(1) - 1))
    for k in range(2, 9):
        errs.append(abs(anti_small_ratio_bound(k, Fraction(k, k - 1), 1000).value))
        errs.append(abs(anti_small_ratio_bound(k, k / (k - 1), 1000).value))
    worst = max(errs)
    return worst <= TOL, f"{len(errs)} anchors, max error {worst:.2e}"


def criterion_2():
    worst = 0.0
    for c in log_grid(4, 1000, 400):
        bc = b_c(c)
        worst = max(worst, abs(bc - 1 / (c * math.e * math.log(2))) / bc)
    return worst <= 0.1, f"max relative gap {worst:.4f} over 400 points in [4, 1000]"


def criterion_3():
    worst = -math.inf
    for c in log_grid(8, 1e6, 1000):
        worst = max(worst, h_of_c(c) / (0.99 * math.log2(2 * c) / c))
    return worst <= 1, f"max h(c) / (0.99 log2(2c)/c) = {worst:.4f} over 1000 points in [8, 1e6]"


def criterion_4():
    parts, ok = [], True
    for n in (1, 2, 3):
        fam = InstanceFamily.all_strings(MAXASG_KNOWN, n, c=1)
        res = min_advice_bits(fam)
        verify_cover(fam, res)
        ok &= res.optimal and res.bits == n == b_c(1) * n
        curve = [b for _, b in bits_vs_ratio_curve(fam)]
        ok &= all(a >= b for a, b in zip(curve, curve[1:]))
        parts.append(f"n={n}: bits={res.bits} curve={curve}")
    return ok, "; ".join(parts)


def criterion_5():
    ok, runs = True, 0
    for prop in (INDEPENDENT_SET, TRIANGLE_FREE):
        for seed in range(200):
            inst = OnlineInstance(Graph.random(8, 0.5, seed=seed), blind=True)
            opt = opt_max_pi(inst.graph, prop)
            t = run_game(inst, maxasgu_to_maxpi(BitmapGuesser()), prop, tape=opt_string(inst, opt))
            ok &= t.feasible_throughout and competitive_ratio(t, len(opt)) == 1 and t.bits_read == 8
            runs += 1
    return ok, f"{runs} runs, ratio 1 and 8 advice bits on each"


def criterion_6():
    base = ramsey_like_graph(16, K2, 2, seed=0)
    if not base.verified:
        return False, "base graph not verified"
    rng = random.Random(6)
    ok, runs, worst_outside, worst_e = True, 0, 0, 0
    enc_n = len(encode_self_delimited(16))
    for trial in range(40):
        nu = [rng.randint(0, 1) for _ in range(16)]
        inst, i_nu = build_zero_deletion(nu, base)
        g = inst.graph
        ok &= satisfies_set(g, i_nu, INDEPENDENT_SET)
        if trial < 10:
            outside = [v for v in g.vertices if v not in i_nu]
            for r in range(len(outside), -1, -1):
                if any(satisfies_set(g, s, INDEPENDENT_SET) for s in itertools.combinations(outside, r)):
                    worst_outside = max(worst_outside, r)
                    break
        # non-preemptive pi algorithms with their oracles
        keep = rng.random()
        pis = [
            (BitmapAdvice, lambda i: bitmap_oracle(i, INDEPENDENT_SET)),
            (BitmapAdvice, lambda i, k=keep: "".join(b if rng.random() < k else "0"
                                                     for b in bitmap_oracle(i, INDEPENDENT_SET))),
            (lambda: GreedyAccept(INDEPENDENT_SET), lambda i: ""),
            (RejectAll, lambda i: ""),
        ]
        for factory, oracle in pis:
            adv = maxpi_to_maxasgk_advice(nu, base, INDEPENDENT_SET, factory(), oracle)
            rep = play_guessing(GuessingInstance(2, tuple(nu), MAXASG_KNOWN),
                                maxpi_to_maxasgk(factory(), base, INDEPENDENT_SET), adv.tape)
            e_len = len(adv.correction.encoded)
            worst_e = max(worst_e, e_len)
            ok &= rep.feasible and all(y == 1 for x, y in zip(nu, rep.answers) if x == 1)
            ok &= rep.score == min(len(adv.solution), len(adv.i_nu))
            ok &= len(adv.tape) == adv.pi_bits + enc_n + e_len == rep.bits_read
            ok &= e_len <= adv.correction.length_bound
            runs += 1
    ok &= worst_outside <= base.threshold - 1
    bound = 2 * len(encode_self_delimited(base.threshold)) + 2 * base.threshold * index_width(16)
    return ok, (f"threshold {base.threshold}, max outside {worst_outside}; {runs} runs feasible with "
                f"profit min(|S|,|I|); |e| <= {worst_e} of bound {bound} = {bound / math.log2(16) ** 2:.2f} log^2 n")


def criterion_7():
    lay = build_g_n_sigma(16, 4, K2, 1.5, 1.0, seed=0)
    if not lay.verified:
        return False, "certificates not verified"
    t1 = lay.params["threshold1"]
    per_layer = max(len(opt_max_pi(induced_subgraph(lay.graph, layer), INDEPENDENT_SET)) for layer in lay.layers)
    g2 = lay.certificates["G2"]
    ok = per_layer < t1 and transversal_condition(g2.graph, lay.layers, K2, g2.threshold)
    n_layers = len(lay.layers)
    big_k = 1.5 * 1.0 * math.log2(4) * math.log2(16)
    opts = set()
    for q in itertools.product(range(1, 5), repeat=3):
        opt = len(opt_max_pi(embed_sgkh(lay, q).graph, INDEPENDENT_SET))
        opts.add(opt)
        ok &= n_layers <= opt <= n_layers + big_k
    rng = random.Random(7)
    for run_i in range(100):
        q = [rng.randint(1, 4) for _ in range(3)]
        if run_i % 4 == 0:
            factory, oracle = (lambda: PlantedLayerAlgorithm(4)), PlantedLayerAlgorithm.oracle
        else:
            bits = "".join(rng.choice("01") for _ in range(16))
            factory, oracle = (lambda: AdviceDrivenPreemptive(INDEPENDENT_SET)), (lambda e, b=bits: b)
        adv = maxpi_preemptive_to_sgkh_advice(q, lay, INDEPENDENT_SET, factory(), oracle)
        alg = maxpi_preemptive_to_sgkh(factory(), lay, INDEPENDENT_SET)
        play_guessing(GuessingInstance(4, tuple(q), SGKH), alg, adv.tape)
        out = alg.outcome(q)
        ok &= out.good >= out.surviving_special
        ok &= all(len(c) <= t1 for c in out.candidates)
        ok &= out.correct >= out.good / (1.5 * math.log2(4))
    return ok, (f"per-layer OPT {per_layer} < {t1}; transversal holds at {g2.threshold}; "
                f"OPT in {sorted(opts)} within [{n_layers}, {n_layers + big_k:.1f}]; 100 runs g >= surviving")


class _Greedy:
    def start(self, tape):
        pass

    def decide(self, view, tape):
        return Decision(satisfies_set(view.revealed, view.held | {view.step}, INDEPENDENT_SET))


def criterion_8():
    sigma, n_prime = 3, 4
    ok = True
    for q in itertools.product(range(1, sigma + 1), repeat=n_prime - 1):
        ok &= len(opt_max_pi(build_clique_layers(q, sigma).graph, INDEPENDENT_SET)) == n_prime
    rng = random.Random(8)
    runs, checked = 0, 0
    for _ in range(60):
        q = [rng.randint(1, sigma) for _ in range(n_prime - 1)]
        full = "".join(format(s - 1, "02b") for s in q) + "00"
        random_bits = "".join(rng.choice("01") for _ in range(sigma * n_prime))
        algs = [(FirstVertexPerLayer(sigma), ""), (PlantedLayerAlgorithm(sigma), full), (RejectAll(), ""),
                (_Greedy(), ""), (AdviceDrivenPreemptive(INDEPENDENT_SET), random_bits)]
        for alg, tape in algs:
            red = indset_preemptive_to_sgkh(alg, sigma)
            play_guessing(GuessingInstance(sigma, tuple(q), SGKH), red, tape)
            out = red.outcome(q)
            ok &= red.max_per_layer <= 1 and out.transcript.feasible_throughout
            profit = out.transcript.objective
            runs += 1
            for c in (1, Fraction(4, 3), Fraction(3, 2), 2, Fraction(9, 4)):
                if profit > 0 and Fraction(n_prime, int(profit)) <= c:
                    checked += 1
                    ok &= out.correct >= clique_layer_alpha(c, n_prime) * (n_prime - 1)
    return ok, f"OPT = 4 on all 27 strings; {runs} runs with <= 1 vertex per layer; {checked} ratio checks"


def criterion_9():
    gt = ramsey_like_graph(12, K2, 1.5, seed=0)
    if not gt.verified:
        return False, "base graph not verified"
    fx = AntiFixture(K2, gt, INDEPENDENT_SET)
    rng = random.Random(9)
    ok = True
    enc_n = len(encode_self_delimited(12))
    worst_err = 0
    for trial in range(20):
        nu = [rng.randint(1, 2) for _ in range(12)]
        lay, x = build_gnu_anti(nu, K2, gt)
        g = lay.graph
        ok &= len(x) == 12 and satisfies_set(g, x, INDEPENDENT_SET)
        ok &= all(is_isomorphic(induced_subgraph(g, layer), K2) for layer in lay.layers)
        rest = [v for v in g.vertices if v not in x]
        # hereditary: checking every subset of size exactly k*threshold covers all larger ones
        ok &= not any(satisfies_set(g, s, INDEPENDENT_SET) for s in itertools.combinations(rest, fx.error_cap))
        ok &= len(opt_max_pi(induced_subgraph(g, rest), INDEPENDENT_SET)) < fx.error_cap
        adv = maxpi_preemptive_to_antisgkh_advice(nu, fx, PlantedSlotAlgorithm(2), PlantedSlotAlgorithm.oracle)
        rep = play_guessing(GuessingInstance(2, tuple(nu), ANTI), maxpi_preemptive_to_antisgkh(PlantedSlotAlgorithm(2), fx),
                            adv.tape)
        ok &= rep.score == 0
        for factory, oracle in ((RejectAll, lambda l: ""),
                                (lambda: AdviceDrivenPreemptive(INDEPENDENT_SET),
                                 lambda l: "".join(rng.choice("01") for _ in range(24)))):
            adv = maxpi_preemptive_to_antisgkh_advice(nu, fx, factory(), oracle)
            alg = maxpi_preemptive_to_antisgkh(factory(), fx)
            rep = play_guessing(GuessingInstance(2, tuple(nu), ANTI), alg, adv.tape)
            list_bits = len(encode_self_delimited(len(adv.s_error))) + len(adv.s_error) * index_width(12)
            ok &= len(adv.s_error) <= fx.error_cap
            ok &= rep.bits_read == enc_n + list_bits + adv.transcript.bits_read
            worst_err = max(worst_err, len(adv.s_error))
    return ok, f"observations hold on 20 strings; planted cost 0; |S_error| <= {worst_err} of cap {fx.error_cap}"


def criterion_10():
    rng = random.Random(10)
    ok, worst = True, 0
    alg_bits = []
    for _ in range(100):
        n = rng.randint(3, 20)
        edges = {tuple(sorted(rng.sample(range(1, n + 1), 2))) for _ in range(rng.randint(0, n // 2))}
        a, b, c = rng.sample(range(1, n + 1), 3)
        edges |= {tuple(sorted(e)) for e in ((a, b), (b, c), (a, c))}
        inst = OnlineInstance(Graph.from_edges(n, sorted(edges)))
        opt = opt_min_pi(inst.graph, CONTAINS_CYCLE)
        adv = minpi_obligatory_advice(inst, CONTAINS_CYCLE, 3)
        t = run_game(inst, minpi_obligatory_algorithm(CONTAINS_CYCLE, 3), CONTAINS_CYCLE, tape=adv, objective=MIN)
        limit = len(encode_self_delimited(n)) + 3 * math.ceil(math.log2(n))
        ok &= t.objective == len(opt) and t.bits_read <= limit and len(adv) <= limit
        alg_bits.append(t.bits_read)
        worst = max(worst, len(opt))
    return ok, f"100 instances cost-optimal, optimum at most {worst}; max advice {max(alg_bits)} bits"


class _Discarder:
    """Accepts on advice 1 and discards its oldest held vertex on advice 11."""

    def start(self, tape):
        pass

    def decide(self, view, tape):
        acc = tape.read()
        drop = frozenset([min(view.held)]) if view.held and tape.read() else frozenset()
        return Decision(bool(acc), drop)


def criterion_11():
    rng = random.Random(11)
    ok = True
    for _ in range(200):
        n = rng.randint(1, 10)
        g = Graph.random(n, rng.random(), rng=rng)
        inst = OnlineInstance(g)
        bits = "".join(rng.choice("01") for _ in range(rng.randint(0, 3 * n)))
        prop = rng.choice((INDEPENDENT_SET, TRIANGLE_FREE))
        t1 = run_game(inst, _Discarder(), prop, PREEMPTIVE, bits)
        t2 = run_game(inst, _Discarder(), prop, PREEMPTIVE, bits)
        ok &= t1.to_json() == t2.to_json()
        # replay the advice by hand: bits read, discards, first violation
        pos, held, gone, first_bad = 0, set(), set(), None

        def take():
            nonlocal pos
            pos += 1
            return bits[pos - 1] == "1" if pos <= len(bits) else False

        for v, rec in zip(g.vertices, t1.steps):
            acc = take()
            drop = {min(held)} if held and take() else set()
            held -= drop
            gone |= drop
            if acc:
                held.add(v)
            else:
                gone.add(v)
            ok &= set(rec.survivors) == held and not (gone & held)
            if first_bad is None and not satisfies_set(g, held, prop):
                first_bad = v
        ok &= t1.bits_read == pos
        ok &= t1.violation_step == first_bad
        ok &= t1.objective == (len(held) if first_bad is None else -math.inf)
    for m in range(1 << 16):
        code = encode_self_delimited(m)
        if decode_self_delimited(code) != (m, len(code)):
            ok = False
            break
    return ok, "200 randomized preemptive runs replayed by hand; codec round-trips all n < 2^16"


CRITERIA = [
    (1, criterion_1, 1), (2, criterion_2, 1), (3, criterion_3, 1), (4, criterion_4, 300), (5, criterion_5, 60),
    (6, criterion_6, 600), (7, criterion_7, 600), (8, criterion_8, 60), (9, criterion_9, 600),
    (10, criterion_10, 60), (11, criterion_11, 60),
]


def evaluate(number, fn, limit):
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as e:  # a crash is a failure of the criterion, reported like one
        ok, detail = False, f"raised {type(e).__name__}: {e}"
    elapsed = time.perf_counter() - start
    if elapsed > limit:
        ok, detail = False, f"{detail}; took {elapsed:.2f}s, limit {limit}s"
    line = f"{'PASS' if ok else 'FAIL'} criterion {number} ({elapsed:.2f}s / {limit}s): {detail}"
    return ok, line


@pytest.mark.parametrize("number,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, fn, limit):
    ok, line = evaluate(number, fn, limit)
    RESULTS.append((number, ok, line))
    print(line)
    assert ok, line


if __name__ == "__main__":
    for number, fn, limit in CRITERIA:
        print(evaluate(number, fn, limit)[1], flush=True)
