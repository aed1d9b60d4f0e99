"""String guessing games and the closed-form advice bounds built on them.

Three games are supported: sigma-ary string guessing with known history
(``sgkh``), its anti variant where a correct guess is what costs
(``anti-sgkh``), and binary asymmetric string guessing, either seeing the
history (``maxasg-known``) or blind (``maxasg-blind``).

Bounds are returned as :class:`BoundReport` values.  Lower-order terms the
source results only give up to an unknown constant are kept as symbolic
strings and never folded into the number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import InputError, ProtocolError
from .online_engine import AdviceTape

SGKH = "sgkh"
ANTI = "anti-sgkh"
MAXASG_KNOWN = "maxasg-known"
MAXASG_BLIND = "maxasg-blind"
VARIANTS = (SGKH, ANTI, MAXASG_KNOWN, MAXASG_BLIND)


@dataclass(frozen=True)
class GuessingInstance:
    sigma: int
    x: tuple[int, ...]
    variant: str

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InputError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "x", tuple(self.x))
        if self.is_asg:
            if self.sigma != 2:
                raise InputError("asymmetric string guessing is binary")
            if set(self.x) - {0, 1}:
                raise InputError("asymmetric string guessing strings are over {0, 1}")
        else:
            if self.sigma < 2:
                raise InputError("alphabet size must be at least 2")
            if any(not 1 <= s <= self.sigma for s in self.x):
                raise InputError(f"symbols must lie in 1..{self.sigma}")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def is_asg(self) -> bool:
        return self.variant in (MAXASG_KNOWN, MAXASG_BLIND)

    @property
    def alphabet(self) -> range:
        return range(0, 2) if self.is_asg else range(1, self.sigma + 1)

    @classmethod
    def from_string(cls, s: str, variant: str, sigma: int | None = None) -> GuessingInstance:
        x = tuple(int(ch) for ch in s)
        if sigma is None:
            sigma = 2 if variant in (MAXASG_KNOWN, MAXASG_BLIND) else max(x + (2,))
        return cls(sigma, x, variant)


@dataclass(frozen=True)
class GuessReport:
    answers: tuple[int, ...]
    score: float
    matches: int
    n: int
    bits_read: int
    feasible: bool = True

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.matches, self.n) if self.n else Fraction(1)


def opt_score(inst: GuessingInstance) -> int:
    """Score of the best offline answer string (maxasg: number of zeros)."""
    if inst.is_asg:
        return inst.x.count(0)
    return 0


def score_answers(inst: GuessingInstance, y: Sequence[int]) -> GuessReport:
    matches = sum(a == b for a, b in zip(inst.x, y))
    feasible = True
    if inst.variant == SGKH:
        score = inst.n - matches
    elif inst.variant == ANTI:
        score = matches
    else:
        feasible = all(xi <= yi for xi, yi in zip(inst.x, y))
        score = list(y).count(0) if feasible else -math.inf
    return GuessReport(tuple(y), score, matches, inst.n, 0, feasible)


def play_guessing(inst: GuessingInstance, alg, tape: AdviceTape | str | None = None) -> GuessReport:
    """Run ``alg`` on ``inst``.

    The algorithm is started with ``n`` (the x_0 request; None for the
    asymmetric games) and then asked for answer i given x_1..x_{i-1}, or
    given nothing in the blind game.  An optional ``finish`` hook sees the
    whole string, standing in for the final request that needs no answer.
    """
    if tape is None:
        tape = AdviceTape()
    elif isinstance(tape, str):
        tape = AdviceTape(tape)
    else:
        tape = tape.fresh()
    alg.start(None if inst.is_asg else inst.n, tape)
    alphabet = inst.alphabet
    y = []
    for i in range(1, inst.n + 1):
        history = None if inst.variant == MAXASG_BLIND else inst.x[:i - 1]
        a = alg.answer(i, history, tape)
        if a not in alphabet:
            raise ProtocolError(f"answer {a!r} at position {i} is outside the alphabet")
        y.append(a)
    finish = getattr(alg, "finish", None)
    if finish is not None:
        finish(None if inst.variant == MAXASG_BLIND else inst.x, tape)
    rep = score_answers(inst, y)
    return GuessReport(rep.answers, rep.score, rep.matches, rep.n, tape.bits_read, rep.feasible)


# -- stock guessers -------------------------------------------------------------


@dataclass
class ConstantGuesser:
    symbol: int

    def start(self, n, tape):
        pass

    def answer(self, i, history, tape):
        return self.symbol


@dataclass
class EchoPrevious:
    """Repeats the previous symbol; the first answer is ``first``."""

    first: int

    def start(self, n, tape):
        pass

    def answer(self, i, history, tape):
        return history[-1] if history else self.first


@dataclass
class PerfectAdvice:
    """Reads ceil(log2 sigma) bits per position holding the next symbol."""

    sigma: int
    asg: bool = False

    @property
    def width(self) -> int:
        return 1 if self.asg else (self.sigma - 1).bit_length()

    def start(self, n, tape):
        pass

    def answer(self, i, history, tape):
        v = tape.read_uint(self.width)
        return v if self.asg else v + 1

    @staticmethod
    def oracle(inst: GuessingInstance) -> str:
        if inst.is_asg:
            return "".join(str(b) for b in inst.x)
        w = (inst.sigma - 1).bit_length()
        return "".join(format(s - 1, "b").zfill(w) for s in inst.x)


@dataclass
class TableStrategy:
    """Answers from a table keyed by the observed history node."""

    table: Mapping
    blind: bool = False

    def start(self, n, tape):
        pass

    def answer(self, i, history, tape):
        key = i if self.blind else tuple(history)
        return self.table[key]


# -- closed forms -----------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    formula: str
    params: dict
    value: float | None
    o_term: str = ""
    applicable: bool = True
    note: str = ""
    pieces: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {"formula_id": self.formula, "params": {**self.params, **self.pieces}, "value_bits": self.value}


def _xlogx(x: float, base: float) -> float:
    """x * log_base(x) with 0 log 0 := 0."""
    return 0.0 if x == 0 else x * math.log(x) / math.log(base)


def _num(x, name):
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a number") from None
    if math.isnan(v):
        raise InputError(f"{name} is NaN")
    return v


def resolve_c(c, n):
    """c may be a scalar, a mapping n -> c, or a callable of n."""
    if callable(c):
        return c(n)
    if isinstance(c, Mapping):
        try:
            return c[n]
        except KeyError:
            raise InputError(f"no competitive ratio tabulated for n={n}") from None
    return c


def guess_fraction_entropy(sigma: int, gamma: float) -> float:
    """1 + (1-g) log_s((1-g)/(s-1)) + g log_s g, the per-symbol advice rate
    for guessing a fraction ``gamma`` of a sigma-ary string."""
    sigma = _num(sigma, "sigma")
    if sigma < 2:
        raise InputError("sigma must be at least 2")
    gamma = _num(gamma, "gamma")
    if not 1 / sigma - 1e-15 <= gamma <= 1:
        raise InputError(f"gamma={gamma} outside [1/sigma, 1]")
    rest = 1 - gamma
    mid = 0.0 if rest == 0 else rest * math.log(rest / (sigma - 1)) / math.log(sigma)
    return 1 + mid + _xlogx(gamma, sigma)


def entropy_h(sigma: int, x: float) -> float:
    """The sigma-ary entropy function."""
    sigma = _num(sigma, "sigma")
    if sigma < 2:
        raise InputError("sigma must be at least 2")
    x = _num(x, "x")
    if not 0 <= x <= 1:
        raise InputError(f"x={x} outside [0, 1]")
    ls = math.log(sigma)
    return x * math.log(sigma - 1) / ls - _xlogx(x, sigma) - _xlogx(1 - x, sigma)


def sgkh_bound(sigma: int, gamma: float, n: int) -> BoundReport:
    f = guess_fraction_entropy(sigma, gamma)
    return BoundReport("sgkh", {"sigma": sigma, "gamma": float(gamma), "n": n},
                       max(f, 0.0) * n * math.log2(sigma), pieces={"F": f})


def anti_bound(sigma: int, c, n: int) -> BoundReport:
    c = _num(resolve_c(c, n), "c")
    if not 1 <= c < sigma / (sigma - 1):
        raise InputError(f"c={c} outside [1, sigma/(sigma-1)) = [1, {sigma / (sigma - 1):g})")
    h = entropy_h(sigma, 1 / c)
    return BoundReport("anti", {"sigma": sigma, "c": c, "n": n}, max(1 - h, 0.0) * n * math.log2(sigma),
                       pieces={"h": h})


def b_c(c) -> float:
    """log2(1 + (c-1)^(c-1) / c^c), with 0^0 := 1."""
    c = _num(c, "c")
    if c < 1:
        raise InputError("c must be at least 1")
    if c == 1:
        return 1.0
    ratio = math.exp((c - 1) * math.log(c - 1) - c * math.log(c))
    return math.log1p(ratio) / math.log(2)


def maxasg_bounds(c, n: int) -> tuple[BoundReport, BoundReport]:
    """Lower and upper advice bounds for c-competitive asymmetric string guessing."""
    c = _num(resolve_c(c, n), "c")
    if not 1 <= c <= n:
        raise InputError(f"c={c} outside [1, n={n}]")
    rate = b_c(c)
    params = {"c": c, "n": n}
    return (
        BoundReport("maxasg-lower", params, rate * n, "- O(log n)", pieces={"B_c": rate}),
        BoundReport("maxasg-upper", params, rate * n, "+ O(log n)", pieces={"B_c": rate}),
    )


def hereditary_sandwich(c, n: int) -> tuple[BoundReport, BoundReport]:
    """Lower and upper bounds on the advice for c-competitive Max-pi without preemption."""
    c = _num(resolve_c(c, n), "c")
    lo, _ = maxasg_bounds(c, n)
    params = {"c": c, "n": n}
    return (
        BoundReport("maxpi-lower", params, lo.value, "- O(log n)", pieces=lo.pieces),
        BoundReport("maxpi-upper", params, lo.value, "+ O(log^2 n)", pieces=lo.pieces),
    )


def layered_reduction_pieces(c, n: int, kappa1: float = 1.0, kappa2: float = 1.0) -> BoundReport:
    """Every quantity in the layered string-guessing reduction for preemptive Max-pi."""
    c = _num(resolve_c(c, n), "c")
    kappa1 = _num(kappa1, "kappa1")
    kappa2 = _num(kappa2, "kappa2")
    if c < 2:
        raise InputError("c must be at least 2")
    if kappa1 < 1 or kappa2 <= 0:
        raise InputError("kappa1 must be >= 1 and kappa2 > 0")
    if n < 2:
        raise InputError("n must be at least 2")
    t = 4 * c * kappa1
    sigma = t * math.log2(t)
    log_sigma = math.log2(sigma)
    n_prime = n / sigma
    big_k = kappa1 * kappa2 * log_sigma * math.log2(n)
    denom = c * kappa1 * log_sigma
    alpha_lo, alpha_hi = 1 / (2 * denom), 1 / denom
    pieces = {
        "sigma": sigma,
        "n_prime": n_prime,
        "K": big_k,
        "alpha_lower": alpha_lo,
        "alpha_upper": alpha_hi,
        "window_lhs": n_prime,
        "window_rhs": 2 * c * big_k - 1,
        "alpha_lower_ge_1_over_sigma": alpha_lo >= 1 / sigma,
    }
    params = {"c": c, "n": n, "kappa1": kappa1, "kappa2": kappa2}
    if n_prime < 2 * c * big_k - 1 or n_prime <= 1:
        return BoundReport("layered", params, None, "", applicable=False,
                           note="n' < 2cK - 1: outside the validity window", pieces=pieces)
    alpha = (n_prime - c * big_k) / (denom * (n_prime - 1))
    pieces["alpha"] = alpha
    pieces["alpha_in_window"] = alpha_lo <= alpha <= alpha_hi
    if alpha < 1 / sigma or alpha > 1:
        return BoundReport("layered", params, None, "", applicable=False,
                           note="alpha outside [1/sigma, 1]", pieces=pieces)
    f = guess_fraction_entropy(sigma, alpha)
    pieces["F"] = f
    pieces["F_at_alpha_lower"] = guess_fraction_entropy(sigma, max(alpha_lo, 1 / sigma))
    return BoundReport("layered", params, f * (n_prime - 1) * log_sigma, pieces=pieces)


def indset_preemption_bound(c, n: int) -> BoundReport:
    c = _num(resolve_c(c, n), "c")
    upper = (1 + math.sqrt(1 + 4 * n)) / 4
    if not 8 <= c <= upper:
        raise InputError(f"c={c} outside [8, (1+sqrt(1+4n))/4 = {upper:g}]")
    value = 0.01 * math.log2(2 * c) / (2 * c * c) * (n - 2 * c)
    return BoundReport("indset-preemption", {"c": c, "n": n}, value)


def clique_layer_alpha(c, n_prime):
    """(n' - c) / (c n' - c); exact when both inputs are rational."""
    if not isinstance(c, (int, Fraction)) or not isinstance(n_prime, (int, Fraction)):
        c, n_prime = _num(c, "c"), _num(n_prime, "n'")
    if not 1 <= c < (n_prime + 1) / 2:
        raise InputError(f"c={c} outside [1, (n'+1)/2)")
    if isinstance(c, (int, Fraction)) and isinstance(n_prime, (int, Fraction)):
        return Fraction(n_prime - c) / Fraction(c * n_prime - c)
    return (n_prime - c) / (c * n_prime - c)


def h_of_c(c) -> float:
    """(2 + ln2 log2(2c)) / (2 ln2 (c - 1)), the loss term in the clique-layer bound."""
    c = _num(c, "c")
    if c <= 1:
        raise InputError("c must exceed 1")
    ln2 = math.log(2)
    return (2 + ln2 * math.log2(2 * c)) / (2 * ln2 * (c - 1))


def anti_small_ratio_bound(k: int, c, n: int) -> BoundReport:
    """(1 - h_k(1/c)) n log2(k) / k - O(log^2 n) for preemptive Max-pi with small c.

    The closed endpoint c = k/(k-1) is accepted and evaluates to 0.
    """
    k = int(k)
    if k < 2:
        raise InputError("k must be at least 2")
    c = resolve_c(c, n)
    limit = Fraction(k, k - 1)
    if isinstance(c, (int, Fraction)):
        if not 1 < c <= limit:
            raise InputError(f"c={c} outside (1, k/(k-1)]")
        if c == limit:
            return BoundReport("anti-small-ratio", {"k": k, "c": float(c), "n": n}, 0.0, "- O(log^2 n)", pieces={"h": 1.0})
    cf = _num(c, "c")
    if not 1 < cf <= k / (k - 1):
        raise InputError(f"c={cf} outside (1, k/(k-1)]")
    h = min(entropy_h(k, min(1 / cf, 1.0)), 1.0)
    return BoundReport("anti-small-ratio", {"k": k, "c": cf, "n": n}, (1 - h) * n * math.log2(k) / k, "- O(log^2 n)",
                       pieces={"h": h})


FORMULAS: dict[str, Callable[..., object]] = {
    "sgkh": sgkh_bound,
    "anti": anti_bound,
    "Bc": b_c,
    "maxasg": maxasg_bounds,
    "layered": layered_reduction_pieces,
    "indset-preemption": indset_preemption_bound,
    "alpha": clique_layer_alpha,
    "hofc": h_of_c,
    "anti-small-ratio": anti_small_ratio_bound,
    "entropy": entropy_h,
}

# identifiers used by the documented command lines and API
FORMULA_ALIASES = {"thm8": "layered", "thm9": "indset-preemption", "cor2": "anti-small-ratio"}
thm8_bound_pieces = layered_reduction_pieces
appendix_alpha = clique_layer_alpha
corollary2_bound = anti_small_ratio_bound
