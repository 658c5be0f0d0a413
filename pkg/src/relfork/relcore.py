"""Finite binary relations and proper relation algebras.

A relation on base ``[0, n)`` is stored as a tuple of n row bitmasks, so
membership is one shift and the Boolean operations run word-parallel.
Composition ORs the rows of the right operand selected by the bits of
each left row.

An :class:`AlgebraModel` packages a carrier of relations together with
its unit, identity and empty element.  ``full_pra(n)`` builds the full
algebra over a base of size n (every subset of the unit ``n x n``).
Products, generated subalgebras, ideal elements and the classification
into trivial / simple / prime live here as well.
"""

from __future__ import annotations

import json
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

MAX_BASE = 16
MAX_CARRIER = 1 << 16
MAX_FULL_PRA_BASE = 4
CLOSURE_CHECK_LIMIT = 1024


class RelationError(ValueError):
    """Base-size mismatches, cap violations and malformed inputs."""


Pair = Tuple[int, int]


@lru_cache(maxsize=1 << 18)
def _compose_rows(rows_r: Tuple[int, ...], rows_s: Tuple[int, ...]) -> Tuple[int, ...]:
    out = []
    for row in rows_r:
        acc = 0
        while row:
            low = row & -row
            acc |= rows_s[low.bit_length() - 1]
            row ^= low
        out.append(acc)
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def _converse_rows(rows: Tuple[int, ...]) -> Tuple[int, ...]:
    n = len(rows)
    out = [0] * n
    for a, row in enumerate(rows):
        bit = 1 << a
        while row:
            low = row & -row
            out[low.bit_length() - 1] |= bit
            row ^= low
    return tuple(out)


class FiniteRelation:
    """An immutable binary relation on the base [0, base_size)."""

    __slots__ = ("base_size", "rows", "_hash")

    def __init__(self, base_size: int, rows: Tuple[int, ...]):
        self.base_size = base_size
        self.rows = rows
        self._hash = hash((base_size, rows))

    @classmethod
    def from_pairs(cls, base_size: int, pairs: Iterable[Pair]) -> "FiniteRelation":
        if base_size < 0:
            raise RelationError(f"base size must be nonnegative, got {base_size}")
        rows = [0] * base_size
        for a, b in pairs:
            if not (0 <= a < base_size and 0 <= b < base_size):
                raise RelationError(
                    f"pair ({a}, {b}) out of range for base size {base_size}"
                )
            rows[a] |= 1 << b
        return cls(base_size, tuple(rows))

    @classmethod
    def empty(cls, base_size: int) -> "FiniteRelation":
        return cls(base_size, (0,) * base_size)

    @classmethod
    def identity(cls, base_size: int) -> "FiniteRelation":
        return cls(base_size, tuple(1 << a for a in range(base_size)))

    @classmethod
    def full(cls, base_size: int) -> "FiniteRelation":
        mask = (1 << base_size) - 1
        return cls(base_size, (mask,) * base_size)

    def contains(self, a: int, b: int) -> bool:
        return 0 <= a < self.base_size and 0 <= b < self.base_size and (
            self.rows[a] >> b
        ) & 1 == 1

    def pairs(self) -> Tuple[Pair, ...]:
        out: List[Pair] = []
        for a, row in enumerate(self.rows):
            while row:
                low = row & -row
                out.append((a, low.bit_length() - 1))
                row ^= low
        return tuple(out)

    def count(self) -> int:
        return sum(row.bit_count() for row in self.rows)

    def _check_same_base(self, other: "FiniteRelation") -> None:
        if self.base_size != other.base_size:
            raise RelationError(
                f"base-size mismatch: {self.base_size} vs {other.base_size}"
            )

    def union(self, other: "FiniteRelation") -> "FiniteRelation":
        self._check_same_base(other)
        return FiniteRelation(
            self.base_size, tuple(a | b for a, b in zip(self.rows, other.rows))
        )

    def meet(self, other: "FiniteRelation") -> "FiniteRelation":
        self._check_same_base(other)
        return FiniteRelation(
            self.base_size, tuple(a & b for a, b in zip(self.rows, other.rows))
        )

    def complement_in(self, unit: "FiniteRelation") -> "FiniteRelation":
        """Complement relative to the given unit."""
        self._check_same_base(unit)
        return FiniteRelation(
            self.base_size, tuple(u & ~a for a, u in zip(self.rows, unit.rows))
        )

    def compose(self, other: "FiniteRelation") -> "FiniteRelation":
        self._check_same_base(other)
        return FiniteRelation(self.base_size, _compose_rows(self.rows, other.rows))

    def converse(self) -> "FiniteRelation":
        return FiniteRelation(self.base_size, _converse_rows(self.rows))

    def is_subset(self, other: "FiniteRelation") -> bool:
        self._check_same_base(other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteRelation)
            and self.base_size == other.base_size
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"FiniteRelation({self.base_size}, {sorted(self.pairs())})"


def bool_op(
    kind: str,
    r: FiniteRelation,
    s: Optional[FiniteRelation] = None,
    unit: Optional[FiniteRelation] = None,
) -> FiniteRelation:
    """Boolean operation dispatch: union, meet or complement."""
    if kind == "union":
        if s is None:
            raise RelationError("union needs a second operand")
        return r.union(s)
    if kind == "meet":
        if s is None:
            raise RelationError("meet needs a second operand")
        return r.meet(s)
    if kind == "complement":
        if unit is None:
            raise RelationError("complement needs the unit")
        return r.complement_in(unit)
    raise RelationError(f"unknown boolean operation {kind!r}")


class AlgebraModel:
    """A finite proper relation algebra given by its carrier of relations."""

    __slots__ = (
        "base_size",
        "carrier",
        "unit",
        "identity",
        "empty",
        "is_full",
        "_carrier_set",
    )

    def __init__(
        self,
        base_size: int,
        carrier: Sequence[FiniteRelation],
        unit: FiniteRelation,
        identity: FiniteRelation,
        is_full: bool = False,
        validate: bool = True,
    ):
        if base_size > MAX_BASE:
            raise RelationError(f"base size {base_size} exceeds cap {MAX_BASE}")
        if len(carrier) > MAX_CARRIER:
            raise RelationError(
                f"carrier size {len(carrier)} exceeds cap {MAX_CARRIER}"
            )
        self.base_size = base_size
        self.carrier = tuple(sorted(set(carrier), key=lambda rel: rel.rows))
        self.unit = unit
        self.identity = identity
        self.empty = FiniteRelation.empty(base_size)
        self.is_full = is_full
        self._carrier_set = frozenset(rel.rows for rel in self.carrier)
        if validate:
            self._validate()

    def __contains__(self, rel: FiniteRelation) -> bool:
        return rel.base_size == self.base_size and rel.rows in self._carrier_set

    def _validate(self) -> None:
        for name, rel in (("unit", self.unit), ("identity", self.identity), ("empty", self.empty)):
            if rel.base_size != self.base_size:
                raise RelationError(f"{name} has base size {rel.base_size}, expected {self.base_size}")
            if rel not in self:
                raise RelationError(f"distinguished element {name} not in carrier")
        for rel in self.carrier:
            if not rel.is_subset(self.unit):
                raise RelationError("carrier element not contained in the unit")
        if self.is_full:
            if len(self.carrier) != 1 << (self.base_size * self.base_size):
                raise RelationError("full model must contain every subset of the unit")
            return
        if len(self.carrier) <= CLOSURE_CHECK_LIMIT:
            self._check_closure()

    def _check_closure(self) -> None:
        for r in self.carrier:
            if r.converse() not in self:
                raise RelationError("carrier not closed under converse")
            if r.complement_in(self.unit) not in self:
                raise RelationError("carrier not closed under complement")
        for r in self.carrier:
            for s in self.carrier:
                if r.union(s) not in self:
                    raise RelationError("carrier not closed under union")
                if r.meet(s) not in self:
                    raise RelationError("carrier not closed under meet")
                if r.compose(s) not in self:
                    raise RelationError("carrier not closed under composition")

    def complement(self, r: FiniteRelation) -> FiniteRelation:
        return r.complement_in(self.unit)

    def __repr__(self) -> str:
        shape = "full" if self.is_full else "proper"
        return (
            f"AlgebraModel(base={self.base_size}, carrier={len(self.carrier)}, {shape})"
        )


def full_pra(n: int) -> AlgebraModel:
    """The full proper relation algebra over a base of n elements."""
    if n < 0:
        raise RelationError("base size must be nonnegative")
    if n > MAX_FULL_PRA_BASE:
        raise RelationError(
            f"full_pra base {n} exceeds cap {MAX_FULL_PRA_BASE} "
            f"(carrier would have 2**{n * n} elements)"
        )
    mask = (1 << n) - 1
    carrier = []
    for code in range(1 << (n * n)):
        rows = tuple((code >> (n * a)) & mask for a in range(n))
        carrier.append(FiniteRelation(n, rows))
    return AlgebraModel(
        n,
        carrier,
        unit=FiniteRelation.full(n),
        identity=FiniteRelation.identity(n),
        is_full=True,
    )


def ideal_elements(model: AlgebraModel) -> Tuple[FiniteRelation, ...]:
    """Elements x with 1;x;1 = x."""
    unit = model.unit
    out = []
    for x in model.carrier:
        if unit.compose(x).compose(unit) == x:
            out.append(x)
    return tuple(out)


class Classification:
    __slots__ = ("ideal_count", "carrier_size", "simple", "trivial", "prime")

    def __init__(self, ideal_count: int, carrier_size: int):
        self.ideal_count = ideal_count
        self.carrier_size = carrier_size
        self.simple = ideal_count <= 2
        self.trivial = carrier_size <= 2
        self.prime = self.simple and not self.trivial

    @property
    def label(self) -> str:
        if self.trivial:
            return "trivial"
        if self.prime:
            return "prime"
        return "not simple"

    def __repr__(self) -> str:
        return (
            f"Classification(ideals={self.ideal_count}, carrier={self.carrier_size}, "
            f"label={self.label!r})"
        )


def classify(model: AlgebraModel) -> Classification:
    return Classification(len(ideal_elements(model)), len(model.carrier))


def direct_product(m1: AlgebraModel, m2: AlgebraModel) -> AlgebraModel:
    """Direct product realized on the disjoint union of the two bases.

    An element is the union of a component of m1 with a shifted component
    of m2; the unit is the union of the two units, so the product is not
    full even when both factors are.
    """
    n1, n2 = m1.base_size, m2.base_size
    n = n1 + n2
    if n > MAX_BASE:
        raise RelationError(f"product base size {n} exceeds cap {MAX_BASE}")
    if len(m1.carrier) * len(m2.carrier) > MAX_CARRIER:
        raise RelationError("product carrier exceeds size cap")

    def shift(rel: FiniteRelation) -> Tuple[int, ...]:
        return tuple(row << n1 for row in rel.rows)

    def combine(r1: FiniteRelation, r2: FiniteRelation) -> FiniteRelation:
        rows2 = shift(r2)
        return FiniteRelation(n, tuple(r1.rows) + rows2)

    carrier = [combine(r1, r2) for r1 in m1.carrier for r2 in m2.carrier]
    return AlgebraModel(
        n,
        carrier,
        unit=combine(m1.unit, m2.unit),
        identity=combine(m1.identity, m2.identity),
        is_full=False,
    )


def power(model: AlgebraModel, exponent: int) -> AlgebraModel:
    """Iterated direct product; exponent 0 gives the one-element algebra."""
    if exponent < 0:
        raise RelationError("exponent must be nonnegative")
    result = full_pra(0)
    for _ in range(exponent):
        result = direct_product(result, model)
    return result


def generate_subalgebra(
    base_size: int,
    generators: Iterable[FiniteRelation],
    carrier_cap: int = MAX_CARRIER,
) -> AlgebraModel:
    """Subalgebra of the full algebra over [0, base_size) generated by H."""
    if base_size > MAX_BASE:
        raise RelationError(f"base size {base_size} exceeds cap {MAX_BASE}")
    unit = FiniteRelation.full(base_size)
    identity = FiniteRelation.identity(base_size)
    current: Dict[Tuple[int, ...], FiniteRelation] = {}

    def add(rel: FiniteRelation) -> None:
        if rel.base_size != base_size:
            raise RelationError("generator has wrong base size")
        current[rel.rows] = rel

    add(FiniteRelation.empty(base_size))
    add(unit)
    add(identity)
    for g in generators:
        add(g)

    while True:
        elems = list(current.values())
        before = len(current)
        for r in elems:
            add(r.converse())
            add(r.complement_in(unit))
        for r in elems:
            for s in elems:
                add(r.union(s))
                add(r.meet(s))
                add(r.compose(s))
        if len(current) > carrier_cap:
            raise RelationError(
                f"generated carrier exceeds cap {carrier_cap}"
            )
        if len(current) == before:
            break

    carrier = list(current.values())
    return AlgebraModel(
        base_size,
        carrier,
        unit=unit,
        identity=identity,
        is_full=len(carrier) == 1 << (base_size * base_size),
    )


def _pairs_to_json(rel: FiniteRelation) -> List[List[int]]:
    return [[a, b] for a, b in sorted(rel.pairs())]


def model_to_dict(model: AlgebraModel) -> dict:
    return {
        "base_size": model.base_size,
        "full": model.is_full,
        "carrier": [_pairs_to_json(rel) for rel in model.carrier],
        "unit": _pairs_to_json(model.unit),
        "identity": "auto"
        if model.identity == FiniteRelation.identity(model.base_size)
        else _pairs_to_json(model.identity),
    }


def model_from_dict(data: dict) -> AlgebraModel:
    try:
        base_size = int(data["base_size"])
        full = bool(data.get("full", False))
    except (KeyError, TypeError, ValueError) as exc:
        raise RelationError(f"malformed model data: {exc}") from exc
    if full and "carrier" not in data:
        return full_pra(base_size)
    try:
        carrier = [
            FiniteRelation.from_pairs(base_size, [tuple(p) for p in rel])
            for rel in data["carrier"]
        ]
        unit = FiniteRelation.from_pairs(base_size, [tuple(p) for p in data["unit"]])
        identity_field = data.get("identity", "auto")
        if identity_field == "auto":
            identity = FiniteRelation.identity(base_size)
        else:
            identity = FiniteRelation.from_pairs(
                base_size, [tuple(p) for p in identity_field]
            )
    except (KeyError, TypeError) as exc:
        raise RelationError(f"malformed model data: {exc}") from exc
    return AlgebraModel(base_size, carrier, unit=unit, identity=identity, is_full=full)


def save_model(model: AlgebraModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model_to_dict(model), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_model(path: str) -> AlgebraModel:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise RelationError(f"invalid model file {path}: {exc}") from exc
    return model_from_dict(data)
