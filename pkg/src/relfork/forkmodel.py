"""Countable fork-algebra models driven by an injective pairing function.

A :class:`PairingFunction` packages an injective ``star`` on the
naturals together with its partial inverse ``unstar`` (``None`` exactly
on urelements, the values outside the range of ``star``).

Relations over this base are lazy: a membership predicate, optionally
an exact finite support, and optionally a complete successor enumerator
(``witnesses``).  Operations propagate support and witnesses whenever
the result stays enumerable; a composition whose left operand offers
neither a support nor witnesses and whose right operand has no support
is rejected as undecidable.

``underline_tree(t)`` is the relation folding fork over the shape of a
binary tree starting from the identity; its membership test reduces to
one functional image ``tree_map(t, star, u)``.  ``underline_seq(s)``
chains projection steps through ``unstar``.  Fixpoint queries for a
control tree, a control sequence, or a single projection scan a finite
region with these reductions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .btree import BT, Bin, Nil, tree_map
from .relcore import FiniteRelation
from .seqs import PI, RHO, Seq, seq_symbols

Pair = Tuple[int, int]

WINDOW_CAP = 4096


class UndecidableCompositionError(ValueError):
    def __init__(self):
        super().__init__(
            "undecidable-composition: neither operand offers a finite support "
            "or successor enumeration"
        )


class NoFiniteSupportError(ValueError):
    pass


class NilControlError(ValueError):
    def __init__(self):
        super().__init__("control tree must not be nil")


@dataclass(frozen=True)
class PairingFunction:
    """Injective pairing on the naturals with explicit partial inverse."""

    star: Callable[[int, int], int]
    unstar: Callable[[int], Optional[Pair]]
    meta: object = None

    def describe(self) -> str:
        return getattr(self.meta, "description", "pairing function")


@dataclass(frozen=True)
class LazyRelation:
    """A relation on the naturals given by a membership predicate.

    ``support_hint`` is the exact extension when finite.  ``witnesses``
    enumerates all successors of a left element; when present it is
    sound and complete for ``contains``.
    """

    contains: Callable[[int, int], bool]
    support_hint: Optional[FrozenSet[Pair]] = None
    witnesses: Optional[Callable[[int], Iterable[int]]] = None

    @classmethod
    def from_support(cls, pairs: Iterable[Pair]) -> "LazyRelation":
        support = frozenset((int(a), int(b)) for a, b in pairs)
        by_left: Dict[int, Tuple[int, ...]] = {}
        for a, b in sorted(support):
            by_left.setdefault(a, ())
            by_left[a] += (b,)
        return cls(
            contains=lambda a, b: (a, b) in support,
            support_hint=support,
            witnesses=lambda a: by_left.get(a, ()),
        )

    @classmethod
    def from_predicate(
        cls,
        predicate: Callable[[int, int], bool],
        witnesses: Optional[Callable[[int], Iterable[int]]] = None,
    ) -> "LazyRelation":
        return cls(contains=predicate, witnesses=witnesses)


EMPTY = LazyRelation.from_support(())
UNIVERSAL = LazyRelation.from_predicate(lambda a, b: True)
IDENTITY = LazyRelation.from_predicate(lambda a, b: a == b, witnesses=lambda a: (a,))


def union_rel(r: LazyRelation, s: LazyRelation) -> LazyRelation:
    support = None
    if r.support_hint is not None and s.support_hint is not None:
        support = r.support_hint | s.support_hint
    witnesses = None
    if r.witnesses is not None and s.witnesses is not None:
        rw, sw = r.witnesses, s.witnesses
        witnesses = lambda a: tuple(dict.fromkeys(tuple(rw(a)) + tuple(sw(a))))
    return LazyRelation(
        contains=lambda a, b: r.contains(a, b) or s.contains(a, b),
        support_hint=support,
        witnesses=witnesses,
    )


def meet_rel(r: LazyRelation, s: LazyRelation) -> LazyRelation:
    support = None
    if r.support_hint is not None:
        support = frozenset(p for p in r.support_hint if s.contains(*p))
    elif s.support_hint is not None:
        support = frozenset(p for p in s.support_hint if r.contains(*p))
    witnesses = None
    if r.witnesses is not None:
        rw = r.witnesses
        witnesses = lambda a: tuple(b for b in rw(a) if s.contains(a, b))
    elif s.witnesses is not None:
        sw = s.witnesses
        witnesses = lambda a: tuple(b for b in sw(a) if r.contains(a, b))
    return LazyRelation(
        contains=lambda a, b: r.contains(a, b) and s.contains(a, b),
        support_hint=support,
        witnesses=witnesses,
    )


def complement_rel(r: LazyRelation) -> LazyRelation:
    """Complement relative to the universal relation; always co-infinite."""
    return LazyRelation(contains=lambda a, b: not r.contains(a, b))


def converse_rel(r: LazyRelation) -> LazyRelation:
    support = None
    witnesses = None
    if r.support_hint is not None:
        support = frozenset((b, a) for a, b in r.support_hint)
        by_left: Dict[int, Tuple[int, ...]] = {}
        for a, b in sorted(support):
            by_left[a] = by_left.get(a, ()) + (b,)
        witnesses = lambda a: by_left.get(a, ())
    return LazyRelation(
        contains=lambda a, b: r.contains(b, a),
        support_hint=support,
        witnesses=witnesses,
    )


def compose_rel(r: LazyRelation, s: LazyRelation) -> LazyRelation:
    """Relational composition; needs one enumerable side to stay decidable."""
    if r.support_hint is not None and s.support_hint is not None:
        by_left: Dict[int, Set[int]] = {}
        for x, b in s.support_hint:
            by_left.setdefault(x, set()).add(b)
        pairs = {
            (a, b)
            for a, x in r.support_hint
            for b in by_left.get(x, ())
        }
        return LazyRelation.from_support(pairs)
    if r.witnesses is not None:
        rw = r.witnesses
        contains = lambda a, b: any(s.contains(x, b) for x in rw(a))
        witnesses = None
        if s.witnesses is not None:
            sw = s.witnesses
            witnesses = lambda a: tuple(
                dict.fromkeys(b for x in rw(a) for b in sw(x))
            )
        return LazyRelation(contains=contains, witnesses=witnesses)
    if s.support_hint is not None:
        s_pairs = s.support_hint
        contains = lambda a, b: any(
            x_b[1] == b and r.contains(a, x_b[0]) for x_b in s_pairs
        )
        witnesses = lambda a: tuple(
            dict.fromkeys(b for x, b in sorted(s_pairs) if r.contains(a, x))
        )
        return LazyRelation(contains=contains, witnesses=witnesses)
    raise UndecidableCompositionError()


def fork(r: LazyRelation, s: LazyRelation, pf: PairingFunction) -> LazyRelation:
    """The fork of r and s: pairs (a, star(x, y)) with a r x and a s y."""
    unstar = pf.unstar
    star = pf.star

    def contains(a: int, b: int) -> bool:
        decoded = unstar(b)
        if decoded is None:
            return False
        x, y = decoded
        return r.contains(a, x) and s.contains(a, y)

    support = None
    if r.support_hint is not None and s.support_hint is not None:
        by_left: Dict[int, Set[int]] = {}
        for a, y in s.support_hint:
            by_left.setdefault(a, set()).add(y)
        support = frozenset(
            (a, star(x, y))
            for a, x in r.support_hint
            for y in by_left.get(a, ())
        )
    witnesses = None
    if r.witnesses is not None and s.witnesses is not None:
        rw, sw = r.witnesses, s.witnesses
        witnesses = lambda a: tuple(
            dict.fromkeys(star(x, y) for x in rw(a) for y in sw(a))
        )
    return LazyRelation(contains=contains, support_hint=support, witnesses=witnesses)


def projections(pf: PairingFunction) -> Tuple[LazyRelation, LazyRelation]:
    """First and second projection relations induced by star."""
    unstar = pf.unstar

    def pi_contains(u: int, x: int) -> bool:
        decoded = unstar(u)
        return decoded is not None and decoded[0] == x

    def rho_contains(u: int, y: int) -> bool:
        decoded = unstar(u)
        return decoded is not None and decoded[1] == y

    def pi_witnesses(u: int):
        decoded = unstar(u)
        return () if decoded is None else (decoded[0],)

    def rho_witnesses(u: int):
        decoded = unstar(u)
        return () if decoded is None else (decoded[1],)

    return (
        LazyRelation(contains=pi_contains, witnesses=pi_witnesses),
        LazyRelation(contains=rho_contains, witnesses=rho_witnesses),
    )


def urelement_relations(pf: PairingFunction) -> Tuple[LazyRelation, LazyRelation]:
    """The partial identity on urelements and the all-urelement-pairs unit."""
    unstar = pf.unstar
    id_u = LazyRelation(
        contains=lambda u, v: u == v and unstar(u) is None,
        witnesses=lambda u: (u,) if unstar(u) is None else (),
    )
    u1u = LazyRelation(
        contains=lambda u, v: unstar(u) is None and unstar(v) is None,
    )
    return id_u, u1u


def underline_tree(t: BT, pf: PairingFunction) -> LazyRelation:
    """Fold fork over the shape of t starting from the identity relation.

    Membership reduces to the functional image through star: (u, v) is
    in the relation iff v = tree_map(t, star, u).
    """
    star = pf.star

    def image(u: int) -> int:
        return tree_map(t, star, u)

    return LazyRelation(
        contains=lambda u, v: image(u) == v,
        witnesses=lambda u: (image(u),),
    )


def _chase(symbols: Sequence[str], unstar, u: int) -> Optional[int]:
    for symbol in symbols:
        decoded = unstar(u)
        if decoded is None:
            return None
        u = decoded[0] if symbol == PI else decoded[1]
    return u


def underline_seq(s: Seq, pf: PairingFunction) -> LazyRelation:
    """Chain of projection steps named by s, resolved through unstar."""
    symbols = seq_symbols(s)
    unstar = pf.unstar

    def image(u: int) -> Optional[int]:
        return _chase(symbols, unstar, u)

    def witnesses(u: int):
        v = image(u)
        return () if v is None else (v,)

    return LazyRelation(
        contains=lambda u, v: image(u) == v,
        witnesses=witnesses,
    )


def fix_members(pf: PairingFunction, region: Iterable[int]) -> Tuple[int, ...]:
    """Plain fixpoints star(u, u) = u inside the region."""
    star = pf.star
    return tuple(u for u in region if star(u, u) == u)


def fix_tree_members(t: BT, pf: PairingFunction, region: Iterable[int]) -> Tuple[int, ...]:
    if isinstance(t, Nil):
        raise NilControlError()
    star = pf.star
    return tuple(u for u in region if tree_map(t, star, u) == u)


def fix_proj_members(
    pf: PairingFunction, region: Iterable[int], which: str = PI
) -> Tuple[int, ...]:
    """Projection fixpoints: some v pairs with u on the named side."""
    unstar = pf.unstar
    index = 0 if which == PI else 1
    out = []
    for u in region:
        decoded = unstar(u)
        if decoded is not None and decoded[index] == u:
            out.append(u)
    return tuple(out)


def fix_seq_members(s: Seq, pf: PairingFunction, region: Iterable[int]) -> Tuple[int, ...]:
    symbols = seq_symbols(s)
    unstar = pf.unstar
    return tuple(u for u in region if _chase(symbols, unstar, u) == u)


def si_member(a: LazyRelation, bound_rel: LazyRelation) -> bool:
    """True when a is a subidentity below bound_rel (meet with identity)."""
    if a.support_hint is None:
        raise NoFiniteSupportError("subidentity test needs a finitely supported relation")
    return all(u == v and bound_rel.contains(u, u) for u, v in a.support_hint)


def window(rel: LazyRelation, n: int, cap: int = WINDOW_CAP) -> FiniteRelation:
    """Restriction of rel to [0, n) as a finite relation."""
    if n > cap:
        raise ValueError(f"window size {n} exceeds cap {cap}")
    if rel.support_hint is not None:
        return FiniteRelation.from_pairs(
            n, [(a, b) for a, b in rel.support_hint if a < n and b < n]
        )
    if rel.witnesses is not None:
        pairs = []
        for a in range(n):
            for b in rel.witnesses(a):
                if 0 <= b < n:
                    pairs.append((a, b))
        return FiniteRelation.from_pairs(n, pairs)
    return FiniteRelation.from_pairs(
        n, [(a, b) for a in range(n) for b in range(n) if rel.contains(a, b)]
    )


# ---------------------------------------------------------------------------
# Conjugation by a finite-support permutation


def _check_permutation(perm: Dict[int, int]) -> Dict[int, int]:
    if set(perm.keys()) != set(perm.values()):
        raise ValueError("permutation must be a bijection on its finite support")
    return {v: k for k, v in perm.items()}


def conjugate(pf: PairingFunction, perm: Dict[int, int]) -> PairingFunction:
    """The pairing star' = perm . star . (perm^-1 x perm^-1)."""
    inverse = _check_permutation(perm)
    star, unstar = pf.star, pf.unstar

    def fwd(x: int) -> int:
        return perm.get(x, x)

    def bwd(x: int) -> int:
        return inverse.get(x, x)

    def star2(x: int, y: int) -> int:
        return fwd(star(bwd(x), bwd(y)))

    def unstar2(u: int) -> Optional[Pair]:
        decoded = unstar(bwd(u))
        if decoded is None:
            return None
        return (fwd(decoded[0]), fwd(decoded[1]))

    return PairingFunction(star=star2, unstar=unstar2, meta=("conjugate", pf.meta))


def transport(rel: LazyRelation, perm: Dict[int, int]) -> LazyRelation:
    """Image of rel under the permutation on both coordinates."""
    inverse = _check_permutation(perm)

    def fwd(x: int) -> int:
        return perm.get(x, x)

    def bwd(x: int) -> int:
        return inverse.get(x, x)

    support = None
    if rel.support_hint is not None:
        support = frozenset((fwd(a), fwd(b)) for a, b in rel.support_hint)
    witnesses = None
    if rel.witnesses is not None:
        rw = rel.witnesses
        witnesses = lambda a: tuple(fwd(b) for b in rw(bwd(a)))
    return LazyRelation(
        contains=lambda a, b: rel.contains(bwd(a), bwd(b)),
        support_hint=support,
        witnesses=witnesses,
    )


# ---------------------------------------------------------------------------
# Direct checks of the fork axioms over a pairing function


def _compose_pairs(r: FrozenSet[Pair], s: FrozenSet[Pair]) -> FrozenSet[Pair]:
    by_left: Dict[int, Set[int]] = {}
    for x, b in s:
        by_left.setdefault(x, set()).add(b)
    return frozenset((a, b) for a, x in r for b in by_left.get(x, ()))


def _converse_pairs(r: FrozenSet[Pair]) -> FrozenSet[Pair]:
    return frozenset((b, a) for a, b in r)


@dataclass
class AxiomResult:
    name: str
    description: str
    passed: bool
    detail: str
    witness: Optional[object] = None


@dataclass
class CfaReport:
    results: List[AxiomResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)


def random_supported_relation(rng: random.Random, bound: int, max_size: int = 8) -> LazyRelation:
    size = rng.randrange(0, max_size + 1)
    pairs = {(rng.randrange(bound), rng.randrange(bound)) for _ in range(size)}
    return LazyRelation.from_support(pairs)


def cfa_axiom_check(
    pf: PairingFunction,
    support_bound: int = 64,
    trials: int = 200,
    seed: int = 0,
    urelement_bound: int = 1000,
    include_urelement_axiom: bool = False,
) -> CfaReport:
    """Check the fork axioms on random finitely supported relations.

    The first axiom compares the computed fork against the projection
    pattern decided through unstar; the second compares exact finite
    supports of both sides; the third verifies that star inverts unstar
    on a scan window (the fork of the projections is then a
    subidentity).  The optional urelement axiom searches the scan window
    for an element outside the range of star.
    """
    rng = random.Random(seed)
    star, unstar = pf.star, pf.unstar
    report = CfaReport()

    failures1 = []
    failures2 = []
    for _ in range(trials):
        r = random_supported_relation(rng, support_bound)
        s = random_supported_relation(rng, support_bound)
        t = random_supported_relation(rng, support_bound)
        u = random_supported_relation(rng, support_bound)

        forked = fork(r, s, pf)
        pattern = lambda a, b: (
            (decoded := unstar(b)) is not None
            and r.contains(a, decoded[0])
            and s.contains(a, decoded[1])
        )
        for a, b in forked.support_hint:
            if not pattern(a, b):
                failures1.append(((a, b), "fork pair rejected by projection pattern"))
        probe_lefts = {a for a, _ in r.support_hint | s.support_hint}
        probe_rights = {b for _, b in forked.support_hint}
        probe_rights.update(rng.randrange(support_bound) for _ in range(8))
        for a in probe_lefts:
            for b in probe_rights:
                if pattern(a, b) != forked.contains(a, b):
                    failures1.append(((a, b), "projection pattern disagrees with fork"))

        lhs = _compose_pairs(
            fork(r, s, pf).support_hint, _converse_pairs(fork(t, u, pf).support_hint)
        )
        rhs = _compose_pairs(r.support_hint, _converse_pairs(t.support_hint)) & _compose_pairs(
            s.support_hint, _converse_pairs(u.support_hint)
        )
        if lhs != rhs:
            failures2.append((sorted(lhs ^ rhs)[:4], "support mismatch"))

    report.results.append(
        AxiomResult(
            name="cfa1",
            description="r # s = (r;pi^) & (s;rho^)",
            passed=not failures1,
            detail=f"{trials} random pairs of finitely supported relations",
            witness=failures1[0] if failures1 else None,
        )
    )
    report.results.append(
        AxiomResult(
            name="cfa2",
            description="(r # s);(t # u)^ = (r;t^) & (s;u^)",
            passed=not failures2,
            detail=f"{trials} random quadruples of finitely supported relations",
            witness=failures2[0] if failures2 else None,
        )
    )

    failures3 = []
    for a in range(urelement_bound):
        decoded = unstar(a)
        if decoded is not None and star(decoded[0], decoded[1]) != a:
            failures3.append(a)
    report.results.append(
        AxiomResult(
            name="cfa3",
            description="pi^ # rho^ <= 1' (fork of the projections is a subidentity)",
            passed=not failures3,
            detail=f"star inverts unstar on [0, {urelement_bound})",
            witness=failures3[0] if failures3 else None,
        )
    )

    if include_urelement_axiom:
        urelement = next(
            (u for u in range(urelement_bound) if unstar(u) is None), None
        )
        report.results.append(
            AxiomResult(
                name="cfau",
                description="1;(~(1 # 1) & 1');1 = 1 (some urelement exists)",
                passed=urelement is not None,
                detail=f"searched [0, {urelement_bound}) for an element outside star's range",
                witness=urelement,
            )
        )
    return report


# ---------------------------------------------------------------------------
# Term-evaluation backend


class ForkBackend:
    """Evaluation backend over a pairing function for the term language."""

    def __init__(self, pf: PairingFunction):
        self.pf = pf
        self._pi, self._rho = projections(pf)
        self._id_u, self._u1u = urelement_relations(pf)

    def const(self, kind: str) -> LazyRelation:
        if kind == "zero":
            return EMPTY
        if kind == "one":
            return UNIVERSAL
        if kind == "id":
            return IDENTITY
        if kind == "pi":
            return self._pi
        if kind == "rho":
            return self._rho
        if kind == "urid":
            return self._id_u
        raise ValueError(f"unknown constant kind {kind!r}")

    def union(self, r, s):
        return union_rel(r, s)

    def meet(self, r, s):
        return meet_rel(r, s)

    def complement(self, r):
        return complement_rel(r)

    def compose(self, r, s):
        return compose_rel(r, s)

    def converse(self, r):
        return converse_rel(r)

    def fork(self, r, s):
        return fork(r, s, self.pf)

    def equal(self, r, s) -> bool:
        raise ValueError(
            "equality of lazy relations is undecidable; compare windows instead"
        )

    def below(self, r, s) -> bool:
        raise ValueError(
            "containment of lazy relations is undecidable; compare windows instead"
        )
