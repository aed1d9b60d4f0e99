"""Build reduction fixtures with a JSON sidecar, and re-check sidecar claims from scratch."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import InputError, ParseError, VerificationError
from .graph_core import (
    FORBIDDEN,
    Graph,
    PropertySpec,
    RamseyCertificate,
    check_subset_condition,
    get_property,
    induced_subgraph,
    is_isomorphic,
    opt_max_pi,
    ramsey_like_graph,
    ramsey_threshold,
    satisfies,
    satisfies_set,
)
from .online_engine import OnlineInstance
from .reductions import (
    CLIQUE,
    INDEPENDENT,
    TransversalCertificate,
    build_clique_layers,
    build_g_n_sigma,
    build_gnu_anti,
    build_zero_deletion,
    embed_sgkh,
    orientation_for,
    transversal_condition,
)

KINDS = ("zero-deletion", "layered", "clique-layers", "anti-layers")
KIND_ALIASES = {"thm5": "zero-deletion", "thm8": "layered", "appendix": "clique-layers", "thm10": "anti-layers"}


def canonical_kind(kind: str) -> str:
    kind = KIND_ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise InputError(f"unknown construction {kind!r}; expected one of {', '.join(KINDS)}")
    return kind


def obstruction(prop: PropertySpec, orientation: str, limit: int = 8) -> Graph:
    """Smallest clique (independent orientation) or edgeless graph violating ``prop``."""
    for s in range(1, limit + 1):
        g = Graph.complete(s) if orientation == INDEPENDENT else Graph.empty(s)
        if not satisfies(g, prop):
            return g
    raise InputError(f"{prop.name} holds on all graphs up to {limit} vertices of the needed kind")


def _cert_doc(cert) -> dict:
    doc = cert.to_dict()
    doc["edges"] = [list(e) for e in cert.graph.edges()]
    doc["n"] = cert.graph.n
    return doc


def _cert_from(doc: dict) -> RamseyCertificate:
    g = Graph.from_edges(doc["n"], [tuple(e) for e in doc["edges"]])
    h = Graph.from_edges(doc["target_n"], [tuple(e) for e in doc["target_edges"]])
    return RamseyCertificate(g, h, doc["alpha"], doc["threshold"], doc["verified"], doc["seed"], doc["attempts"])


@dataclass
class Fixture:
    instance: OnlineInstance
    sidecar: dict


def build_fixture(kind: str, seed: int = 0, n: int | None = None, sigma: int | None = None, k: int | None = None,
                  alpha: float | None = None, kappa1: float = 1.5, kappa2: float = 1.0, n_prime: int | None = None,
                  prop: str | None = None, string=None, budget: int = 1000) -> Fixture:
    """Seeded construction.  The source string is drawn from ``seed`` unless given."""
    kind = canonical_kind(kind)
    rng = random.Random(seed)
    if kind == "zero-deletion":
        n = n or 16
        p = get_property(prop or "independent-set")
        orient = orientation_for(p)
        h = obstruction(p, orient)
        base = ramsey_like_graph(n, h, alpha or 2, seed=seed, budget=budget)
        nu = list(string) if string is not None else [rng.randint(0, 1) for _ in range(n)]
        inst, i_nu = build_zero_deletion(nu, base, orient)
        side = {"construction": kind, "params": {"n": n, "property": p.name, "orientation": orient, "nu": nu,
                                                 "seed": seed},
                "certificates": {"base": _cert_doc(base)}, "special_vertices": sorted(i_nu)}
        return Fixture(inst, side)
    if kind == "layered":
        n, sigma = n or 16, sigma or 4
        p = get_property(prop or "independent-set")
        if p.mode != FORBIDDEN:
            raise InputError("the layered construction needs a forbidden-subgraph property")
        h = p.smallest_witness
        lay = build_g_n_sigma(n, sigma, h, kappa1, kappa2, seed=seed, budget=budget)
        q = list(string) if string is not None else [rng.randint(1, sigma) for _ in range(n // sigma - 1)]
        emb = embed_sgkh(lay, q)
        g2 = lay.certificates["G2"]
        side = {"construction": kind,
                "params": {**lay.params, "property": p.name, "q": q},
                "certificates": {"G1": _cert_doc(lay.certificates["G1"]),
                                 "G2": {**g2.to_dict(), "n": g2.graph.n, "edges": [list(e) for e in g2.graph.edges()]}},
                "special_vertices": [v for v in emb.special if v is not None]}
        return Fixture(emb.instance, side)
    if kind == "clique-layers":
        sigma, n_prime = sigma or 3, n_prime or 4
        q = list(string) if string is not None else [rng.randint(1, sigma) for _ in range(n_prime - 1)]
        lay = build_clique_layers(q, sigma)
        side = {"construction": kind, "params": {"sigma": sigma, "n_prime": n_prime, "q": q, "seed": seed},
                "certificates": {}, "special_vertices": [v for v in lay.special if v is not None]}
        return Fixture(lay.instance, side)
    if kind == "anti-layers":
        n, k = n or 12, k or 2
        if prop is None:
            prop = {2: "independent-set", 3: "triangle-free"}.get(k)
            if prop is None:
                raise InputError(f"no shipped property with a smallest forbidden subgraph on {k} vertices")
        p = get_property(prop)
        if p.mode != FORBIDDEN or p.k != k:
            raise InputError(f"{p.name} does not have a smallest forbidden subgraph on {k} vertices")
        h = p.smallest_witness
        gt = ramsey_like_graph(n, h, alpha or 1.5, seed=seed, budget=budget)
        nu = list(string) if string is not None else [rng.randint(1, k) for _ in range(n)]
        lay, x = build_gnu_anti(nu, h, gt)
        side = {"construction": kind, "params": {"n": n, "k": k, "property": p.name, "nu": nu, "seed": seed},
                "certificates": {"G~": _cert_doc(gt)}, "special_vertices": sorted(x)}
        return Fixture(lay.instance, side)
    raise AssertionError(kind)


# -- verification ---------------------------------------------------------------


def _claims_zero_deletion(g: Graph, side: dict, claims: list):
    p = get_property(side["params"]["property"])
    base = _cert_from(side["certificates"]["base"])
    claims.append(("base certificate re-verified", check_subset_condition(base.graph, base.target, base.threshold)
                   and base.threshold == ramsey_threshold(base.graph.n, base.alpha, base.target)))
    orient = side["params"]["orientation"]
    rebuilt, i_nu = build_zero_deletion(side["params"]["nu"], base, orient)
    claims.append(("instance rebuilt from base and string", rebuilt.presented_graph() == g))
    claims.append(("I_nu is the zero positions", sorted(i_nu) == side["special_vertices"]))
    claims.append(("G_nu[I_nu] satisfies the property", satisfies_set(g, i_nu, p)))
    outside = [v for v in g.vertices if v not in i_nu]
    best = len(opt_max_pi(induced_subgraph(g, outside), p)) if outside else 0
    claims.append((f"every property subset has <= {base.threshold - 1} vertices outside I_nu",
                   best <= base.threshold - 1))


def _claims_layered(g: Graph, side: dict, claims: list):
    prm = side["params"]
    p = get_property(prm["property"])
    n, sigma = prm["n"], prm["sigma"]
    g1 = _cert_from(side["certificates"]["G1"])
    c2 = side["certificates"]["G2"]
    lay = build_g_n_sigma(n, sigma, p.smallest_witness, prm["kappa1"], prm["kappa2"], seed=prm["seed"],
                          budget=max(c2["attempts"], g1.attempts), density=prm["density"])
    g2 = Graph.from_edges(c2["n"], [tuple(e) for e in c2["edges"]])
    claims.append(("G1 certificate re-verified", check_subset_condition(g1.graph, g1.target, g1.threshold)))
    claims.append(("G2 transversal condition re-verified",
                   transversal_condition(g2, lay.layers, p.smallest_witness, c2["threshold"])))
    claims.append(("certificates reproduced from the seed",
                   lay.certificates["G1"].graph == g1.graph and lay.certificates["G2"].graph == g2))
    emb = embed_sgkh(lay, prm["q"])
    claims.append(("instance rebuilt from certificates and string", emb.graph == g))
    per_layer = max(len(opt_max_pi(induced_subgraph(g, layer), p)) for layer in lay.layers)
    claims.append((f"per-layer optimum {per_layer} < threshold1 {g1.threshold}", per_layer < g1.threshold))
    special = side["special_vertices"]
    claims.append(("distinguished vertices pairwise non-adjacent",
                   all(not g.has_edge(u, v) for u in special for v in special if u < v)))
    n_layers = len(lay.layers)
    k_term = prm["kappa1"] * prm["kappa2"] * math.log2(sigma) * math.log2(n)
    opt = len(opt_max_pi(g, p))
    claims.append((f"n' <= OPT <= n' + K ({n_layers} <= {opt} <= {n_layers + k_term:.2f})",
                   n_layers <= opt <= n_layers + k_term))


def _claims_clique_layers(g: Graph, side: dict, claims: list):
    prm = side["params"]
    lay = build_clique_layers(prm["q"], prm["sigma"])
    claims.append(("instance rebuilt from string", lay.graph == g))
    claims.append(("every layer is a clique",
                   all(g.has_edge(u, v) for layer in lay.layers for u in layer for v in layer if u < v)))
    special = set(side["special_vertices"])
    fwd = True
    for li, layer in enumerate(lay.layers[:-1]):
        later = [v for v in range(layer[-1] + 1, g.n + 1)]
        for u in layer:
            want = u not in special
            fwd &= all(g.has_edge(u, v) == want for v in later)
    claims.append(("designated vertices isolated forward, others joined forward", fwd))
    opt = len(opt_max_pi(g, get_property("independent-set")))
    claims.append((f"OPT = n' ({opt} = {prm['n_prime']})", opt == prm["n_prime"]))


def _claims_anti_layers(g: Graph, side: dict, claims: list):
    prm = side["params"]
    p = get_property(prm["property"])
    gt = _cert_from(side["certificates"]["G~"])
    claims.append(("base certificate re-verified", check_subset_condition(gt.graph, gt.target, gt.threshold)))
    lay, x = build_gnu_anti(prm["nu"], p.smallest_witness, gt)
    claims.append(("instance rebuilt from base and string", lay.graph == g))
    claims.append(("X matches the string", sorted(x) == side["special_vertices"]))
    claims.append(("X is independent of size n",
                   len(x) == prm["n"] and all(not g.has_edge(u, v) for u in x for v in x if u < v)))
    claims.append(("every layer induces H",
                   all(is_isomorphic(induced_subgraph(g, layer), p.smallest_witness) for layer in lay.layers)))
    rest = [v for v in g.vertices if v not in x]
    cap = prm["k"] * gt.threshold
    best = len(opt_max_pi(induced_subgraph(g, rest), p)) if rest else 0
    claims.append((f"X-disjoint property subsets have < {cap} vertices ({best})", best < cap))


_CHECKS = {"zero-deletion": _claims_zero_deletion, "layered": _claims_layered,
           "clique-layers": _claims_clique_layers, "anti-layers": _claims_anti_layers}


def verify_fixture(inst: OnlineInstance, side: dict) -> list[tuple[str, bool]]:
    """Re-derives every claim of ``side`` for ``inst``; returns (claim, holds) pairs."""
    kind = KIND_ALIASES.get(side.get("construction"), side.get("construction"))
    if kind not in _CHECKS:
        raise ParseError(f"unknown construction {kind!r} in sidecar", None)
    claims: list[tuple[str, bool]] = []
    _CHECKS[kind](inst.presented_graph(), side, claims)
    return claims


def require(claims: list[tuple[str, bool]]) -> None:
    failed = [c for c, ok in claims if not ok]
    if failed:
        raise VerificationError("; ".join(failed))
