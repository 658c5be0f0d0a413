"""Concrete injective pairings on the naturals with pinned fixpoints.

Every builder here partitions the naturals into a finite reserved set
and an infinite residual, splits the residual into countably many
disjoint infinite blocks through the Cantor pairing, and then defines
``star`` by a finite table of pinned cells plus a default encoder on
all remaining pairs.

The default encoder sends (u, v) to an element of block 0 strictly
above max(u, v), so no pair outside the table can close a fixpoint
equation: every controlled fixpoint is forced through the table, and
the table pins exactly the designated members.

Kinds:

* ``basic``: self-pairing fixpoints.  star(u, u) = u exactly on the
  designated members; other diagonal values shift one block up and
  off-diagonal pairs fill block 0 bijectively, so star is a bijection.
* ``tree``: fixpoints of the map folding star over a control tree.
  Each non-nil strict subtree owns a block of scaffolding images; the
  table lifts scaffolding level by level and closes at the root.
* ``pi`` / ``rho``: fixpoints of the named projection.  Each member is
  paired with a reserved partner on the named side; partners stay
  outside the range of star.
* ``seq``: fixpoints of the projection chain named by a control
  sequence over {pi, rho}.  Levels own blocks; a reserved-block partner
  sits on the silent side of every chain step.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .btree import BT, NIL, Bin, Nil, format_tree, node_count, parse_tree, strict_subtrees
from .forkmodel import PairingFunction
from .seqs import PI, RHO, Seq, format_seq, parse_seq, seq_symbols

Pair = Tuple[int, int]

MAX_MEMBERS = 512
MAX_CONTROL_NODES = 64


class ConstructionError(ValueError):
    pass


def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def cantor_unpair(m: int) -> Pair:
    w = (math.isqrt(8 * m + 1) - 1) // 2
    b = m - w * (w + 1) // 2
    return (w - b, b)


def _checked_members(s_members: Iterable[int]) -> Tuple[int, ...]:
    values = sorted(set(int(u) for u in s_members))
    if values and values[0] < 0:
        raise ConstructionError("members must be non-negative")
    if len(values) > MAX_MEMBERS:
        raise ConstructionError(f"at most {MAX_MEMBERS} members supported")
    return tuple(values)


class ConstructionLayout:
    """Reserved set, residual block arithmetic, and the pinned table."""

    def __init__(
        self,
        kind: str,
        s_values: Tuple[int, ...],
        reserved: Tuple[int, ...],
        block_names: Tuple[str, ...],
        control_text: Optional[str] = None,
        partners: Optional[Tuple[int, ...]] = None,
    ):
        self.kind = kind
        self.s_values = s_values
        self.s_rank = {u: i for i, u in enumerate(s_values)}
        self.reserved = reserved
        self.reserved_set = frozenset(reserved)
        self.block_names = block_names
        self.control_text = control_text
        self.partners = partners
        self.table: Dict[Pair, int] = {}

    @property
    def description(self) -> str:
        bits = [self.kind, f"S={list(self.s_values)}"]
        if self.control_text is not None:
            bits.append(f"control={self.control_text}")
        return " ".join(bits)

    def residual_element(self, j: int) -> int:
        u = j
        for r in self.reserved:
            if r <= u:
                u += 1
        return u

    def residual_rank(self, u: int) -> int:
        if u in self.reserved_set:
            raise ValueError(f"{u} is reserved")
        return u - sum(1 for r in self.reserved if r < u)

    def block_element(self, i: int, k: int) -> int:
        return self.residual_element(cantor_pair(i, k))

    def block_of(self, u: int) -> Optional[Pair]:
        """Block index and offset of a residual element, None on reserved."""
        if u in self.reserved_set:
            return None
        return cantor_unpair(self.residual_rank(u))

    def encode_rest(self, u: int, v: int) -> int:
        """Default cell: block 0, strictly above both coordinates."""
        return self.block_element(0, cantor_pair(u, v) + 1)

    def decode_rest(self, w: int) -> Optional[Pair]:
        place = self.block_of(w)
        if place is None or place[0] != 0 or place[1] == 0:
            return None
        return cantor_unpair(place[1] - 1)

    def fix_candidates(self) -> Tuple[int, ...]:
        """Elements the table pins as controlled fixpoints."""
        return self.s_values


def _finish(layout: ConstructionLayout, star, unstar) -> PairingFunction:
    return PairingFunction(star=star, unstar=unstar, meta=layout)


# ---------------------------------------------------------------------------
# basic: star(u, u) = u exactly on S; bijective


def build_star_basic(s_members: Iterable[int]) -> PairingFunction:
    s_values = _checked_members(s_members)
    layout = ConstructionLayout(
        kind="basic",
        s_values=s_values,
        reserved=s_values,
        block_names=("offdiag", "diag-shift-0"),
    )
    s_set = layout.reserved_set

    def offdiag_code(u: int, v: int) -> int:
        return cantor_pair(u, v if v < u else v - 1)

    def offdiag_decode(k: int) -> Pair:
        u, v2 = cantor_unpair(k)
        return (u, v2 if v2 < u else v2 + 1)

    def star(u: int, v: int) -> int:
        if u == v:
            if u in s_set:
                return u
            i, k = layout.block_of(u)
            return layout.block_element(i + 1, k)
        return layout.block_element(0, offdiag_code(u, v))

    def unstar(w: int) -> Optional[Pair]:
        if w in s_set:
            return (w, w)
        i, k = layout.block_of(w)
        if i == 0:
            return offdiag_decode(k)
        u = layout.block_element(i - 1, k)
        return (u, u)

    return _finish(layout, star, unstar)


# ---------------------------------------------------------------------------
# tree: fixpoints of folding star over a control tree


def build_star_tree(t: BT, s_members: Iterable[int]) -> PairingFunction:
    if isinstance(t, Nil):
        raise ConstructionError("control tree must not be nil")
    if node_count(t) > MAX_CONTROL_NODES:
        raise ConstructionError(f"control tree exceeds {MAX_CONTROL_NODES} nodes")
    s_values = _checked_members(s_members)
    if not s_values:
        raise ConstructionError("tree construction needs at least one member")

    families: List[BT] = sorted(
        (c for c in strict_subtrees(t) if not isinstance(c, Nil)),
        key=lambda c: (node_count(c), format_tree(c)),
    )
    fam_block = {c: 1 + j for j, c in enumerate(families)}
    layout = ConstructionLayout(
        kind="tree",
        s_values=s_values,
        reserved=s_values,
        block_names=("rest",) + tuple(f"scaffold[{format_tree(c)}]" for c in families),
        control_text=format_tree(t),
    )

    def h(c: BT, w: int) -> int:
        if isinstance(c, Nil):
            return w
        return layout.block_element(fam_block[c], layout.s_rank[w])

    for w in s_values:
        for c in families:
            layout.table[(h(c.left, w), h(c.right, w))] = h(c, w)
        layout.table[(h(t.left, w), h(t.right, w))] = w

    table = layout.table
    s_set = layout.reserved_set
    n_members = len(s_values)

    def star(u: int, v: int) -> int:
        pinned = table.get((u, v))
        if pinned is not None:
            return pinned
        return layout.encode_rest(u, v)

    def unstar(w: int) -> Optional[Pair]:
        if w in s_set:
            candidate = (h(t.left, w), h(t.right, w))
        else:
            place = layout.block_of(w)
            i, k = place
            if i == 0:
                candidate = layout.decode_rest(w)
            elif i - 1 < len(families) and k < n_members:
                c = families[i - 1]
                member = s_values[k]
                candidate = (h(c.left, member), h(c.right, member))
            else:
                candidate = None
        if candidate is not None and star(*candidate) == w:
            return candidate
        return None

    return _finish(layout, star, unstar)


# ---------------------------------------------------------------------------
# pi / rho: fixpoints of one projection


def build_star_proj(s_members: Iterable[int], which: str = PI) -> PairingFunction:
    if which not in (PI, RHO):
        raise ConstructionError(f"projection kind must be {PI!r} or {RHO!r}")
    s_values = _checked_members(s_members)
    s_set = set(s_values)
    partners: List[int] = []
    candidate = 0
    while len(partners) < len(s_values):
        if candidate not in s_set:
            partners.append(candidate)
        candidate += 1
    partner_of = dict(zip(s_values, partners))

    layout = ConstructionLayout(
        kind=which,
        s_values=s_values,
        reserved=tuple(sorted(s_set | set(partners))),
        block_names=("rest",),
        partners=tuple(partners),
    )
    for w in s_values:
        p = partner_of[w]
        key = (w, p) if which == PI else (p, w)
        layout.table[key] = w

    table = layout.table

    def star(u: int, v: int) -> int:
        pinned = table.get((u, v))
        if pinned is not None:
            return pinned
        return layout.encode_rest(u, v)

    def unstar(w: int) -> Optional[Pair]:
        if w in s_set:
            p = partner_of[w]
            candidate = (w, p) if which == PI else (p, w)
        elif w in layout.reserved_set:
            return None
        else:
            candidate = layout.decode_rest(w)
        if candidate is not None and star(*candidate) == w:
            return candidate
        return None

    return _finish(layout, star, unstar)


# ---------------------------------------------------------------------------
# seq: fixpoints of a projection chain


def build_star_seq(s: Seq, s_members: Iterable[int]) -> PairingFunction:
    symbols = seq_symbols(s)
    length = len(symbols)
    if length > MAX_CONTROL_NODES:
        raise ConstructionError(f"control sequence exceeds {MAX_CONTROL_NODES} steps")
    s_values = _checked_members(s_members)
    if not s_values:
        raise ConstructionError("sequence construction needs at least one member")

    level_names = tuple(f"level-{i}" for i in range(1, length))
    layout = ConstructionLayout(
        kind="seq",
        s_values=s_values,
        reserved=s_values,
        block_names=("rest",) + level_names + ("partners",),
        control_text=format_seq(s),
    )
    s_rank = layout.s_rank

    def chain_value(j: int, w: int) -> int:
        """j-th value on the chain of w; ends of the chain are w itself."""
        if j == 0 or j == length:
            return w
        return layout.block_element(j, s_rank[w])

    def partner(w: int) -> int:
        return layout.block_element(length, s_rank[w])

    for w in s_values:
        for i in range(1, length + 1):
            key = chain_value(i, w)
            out = chain_value(i - 1, w)
            pair = (key, partner(w)) if symbols[i - 1] == PI else (partner(w), key)
            layout.table[pair] = out

    table = layout.table
    s_set = layout.reserved_set
    n_members = len(s_values)

    def star(u: int, v: int) -> int:
        pinned = table.get((u, v))
        if pinned is not None:
            return pinned
        return layout.encode_rest(u, v)

    def entry_pair(i: int, w: int) -> Pair:
        key = chain_value(i, w)
        return (key, partner(w)) if symbols[i - 1] == PI else (partner(w), key)

    def unstar(w: int) -> Optional[Pair]:
        if w in s_set:
            candidate = entry_pair(1, w)
        else:
            i, k = layout.block_of(w)
            if i == 0:
                candidate = layout.decode_rest(w)
            elif i < length and k < n_members:
                candidate = entry_pair(i + 1, s_values[k])
            else:
                candidate = None
        if candidate is not None and star(*candidate) == w:
            return candidate
        return None

    return _finish(layout, star, unstar)


# ---------------------------------------------------------------------------
# Config entry point and reporting


def build_from_config(config: Mapping) -> PairingFunction:
    """Build a pairing from {"kind", "S", "control"}.

    "control" carries the tree text for kind "tree" and the sequence
    text for kind "seq"; the other kinds take no control.
    """
    if not isinstance(config, Mapping):
        raise ConstructionError("config must be a mapping")
    allowed = {"kind", "S", "control"}
    unknown = set(config) - allowed
    if unknown:
        raise ConstructionError(f"unknown config keys: {sorted(unknown)}")
    kind = config.get("kind")
    members = config.get("S", ())
    control = config.get("control")
    if kind == "basic":
        if control is not None:
            raise ConstructionError("basic construction takes no control")
        return build_star_basic(members)
    if kind in (PI, RHO):
        if control is not None:
            raise ConstructionError("projection construction takes no control")
        return build_star_proj(members, which=kind)
    if kind == "tree":
        if not isinstance(control, str):
            raise ConstructionError("tree construction needs a control tree text")
        return build_star_tree(parse_tree(control), members)
    if kind == "seq":
        if not isinstance(control, str):
            raise ConstructionError("sequence construction needs a control sequence text")
        return build_star_seq(parse_seq(control), members)
    raise ConstructionError(f"unknown construction kind {kind!r}")


def layout_report(pf: PairingFunction, grid: int = 12) -> Dict:
    """Inspectable summary of a built pairing: blocks, table, sample grid."""
    layout = pf.meta
    if not isinstance(layout, ConstructionLayout):
        raise ConstructionError("pairing function carries no construction layout")
    blocks = [
        {
            "index": i,
            "name": name,
            "first_elements": [layout.block_element(i, k) for k in range(6)],
        }
        for i, name in enumerate(layout.block_names)
    ]
    table = [
        {"u": u, "v": v, "value": w}
        for (u, v), w in sorted(layout.table.items())
    ]
    report = {
        "kind": layout.kind,
        "members": list(layout.s_values),
        "control": layout.control_text,
        "reserved": list(layout.reserved),
        "fix_candidates": list(layout.fix_candidates()),
        "blocks": blocks,
        "table": table,
        "star_grid": [[pf.star(u, v) for v in range(grid)] for u in range(grid)],
    }
    if layout.partners is not None:
        report["partners"] = list(layout.partners)
    return report
