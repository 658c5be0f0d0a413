"""Shared oracles and random generators for the test suite.

The oracles here recompute relational operations over plain pair sets,
independent of the bitmask and lazy implementations under test.
"""

from __future__ import annotations

import random
from typing import FrozenSet, Iterable, Set, Tuple

from relfork import (
    BT,
    BTC,
    Bin,
    Cons,
    Elem,
    HOLE,
    NIL,
    PI,
    RHO,
    Seq,
)
from relfork import terms

Pair = Tuple[int, int]


# ---------------------------------------------------------------------------
# Pair-set oracles for relational operations


def compose_pairs(r: Iterable[Pair], s: Iterable[Pair]) -> Set[Pair]:
    s = set(s)
    return {(a, d) for a, b in r for c, d in s if b == c}


def converse_pairs(r: Iterable[Pair]) -> Set[Pair]:
    return {(b, a) for a, b in r}


def complement_pairs(r: Iterable[Pair], n: int) -> Set[Pair]:
    r = set(r)
    return {(a, b) for a in range(n) for b in range(n) if (a, b) not in r}


def fork_pairs(r: Iterable[Pair], s: Iterable[Pair], star) -> Set[Pair]:
    s = set(s)
    return {(a, star(x, y)) for a, x in r for a2, y in s if a == a2}


def random_pairs(rng: random.Random, n: int, density: float = 0.4) -> FrozenSet[Pair]:
    return frozenset(
        (a, b) for a in range(n) for b in range(n) if rng.random() < density
    )


# ---------------------------------------------------------------------------
# Random control structures


def random_tree(rng: random.Random, depth: int = 3) -> BT:
    if depth == 0 or rng.random() < 0.35:
        return NIL
    return Bin(random_tree(rng, depth - 1), random_tree(rng, depth - 1))


def random_nonnil_tree(rng: random.Random, depth: int = 3) -> BT:
    return Bin(random_tree(rng, depth - 1), random_tree(rng, depth - 1))


def random_context(rng: random.Random, depth: int = 3) -> BTC:
    if depth == 0 or rng.random() < 0.3:
        return HOLE if rng.random() < 0.5 else NIL
    return Bin(random_context(rng, depth - 1), random_context(rng, depth - 1))


def random_seq(rng: random.Random, max_len: int = 4) -> Seq:
    length = rng.randrange(1, max_len + 1)
    seq: Seq = Elem(rng.choice((PI, RHO)))
    for _ in range(length - 1):
        seq = Cons(rng.choice((PI, RHO)), seq)
    return seq


# ---------------------------------------------------------------------------
# Random terms and formulas


def random_term(rng: random.Random, depth: int, names=("x", "y", "z"), fork: bool = True):
    if depth == 0:
        if rng.random() < 0.6:
            return terms.Var(rng.choice(names))
        kinds = ["zero", "one", "id"] + (["pi", "rho", "urid"] if fork else [])
        return terms.Const(rng.choice(kinds))
    roll = rng.random()
    if roll < 0.15:
        return terms.Complement(random_term(rng, depth - 1, names, fork))
    if roll < 0.3:
        return terms.Converse(random_term(rng, depth - 1, names, fork))
    shapes = [terms.Union, terms.Meet, terms.Compose] + ([terms.Fork] if fork else [])
    shape = rng.choice(shapes)
    return shape(
        random_term(rng, depth - 1, names, fork),
        random_term(rng, depth - 1, names, fork),
    )


def random_formula(rng: random.Random, depth: int, names=("x", "y", "z"), fork: bool = True):
    if depth == 0:
        shape = terms.Eq if rng.random() < 0.5 else terms.Leq
        term_depth = rng.randrange(0, 3)
        return shape(
            random_term(rng, term_depth, names, fork),
            random_term(rng, term_depth, names, fork),
        )
    roll = rng.random()
    if roll < 0.2:
        return terms.Not(random_formula(rng, depth - 1, names, fork))
    shape = rng.choice((terms.And, terms.Or, terms.Implies))
    return shape(
        random_formula(rng, depth - 1, names, fork),
        random_formula(rng, depth - 1, names, fork),
    )


# ---------------------------------------------------------------------------
# Naive term evaluation over pair sets (independent of FiniteRelation)


def eval_term_pairs(t, env, n: int) -> Set[Pair]:
    full = {(a, b) for a in range(n) for b in range(n)}
    if isinstance(t, terms.Var):
        return set(env[t.name])
    if isinstance(t, terms.Const):
        if t.kind == "zero":
            return set()
        if t.kind == "one":
            return set(full)
        if t.kind == "id":
            return {(a, a) for a in range(n)}
        raise ValueError(f"constant {t.kind} has no plain-model meaning")
    if isinstance(t, terms.Union):
        return eval_term_pairs(t.left, env, n) | eval_term_pairs(t.right, env, n)
    if isinstance(t, terms.Meet):
        return eval_term_pairs(t.left, env, n) & eval_term_pairs(t.right, env, n)
    if isinstance(t, terms.Complement):
        return full - eval_term_pairs(t.arg, env, n)
    if isinstance(t, terms.Compose):
        return compose_pairs(
            eval_term_pairs(t.left, env, n), eval_term_pairs(t.right, env, n)
        )
    if isinstance(t, terms.Converse):
        return converse_pairs(eval_term_pairs(t.arg, env, n))
    raise TypeError(f"unexpected term {t!r}")
