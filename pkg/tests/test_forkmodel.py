"""Lazy relations over pairing functions: combinators, windows, fork axioms."""

import random

import pytest

from relfork import (
    ForkBackend,
    LazyRelation,
    NilControlError,
    NoFiniteSupportError,
    PairingFunction,
    UndecidableCompositionError,
    NIL,
    Bin,
    PI,
    RHO,
    build_star_basic,
    build_star_proj,
    cantor_pair,
    cantor_unpair,
    cfa_axiom_check,
    complement_rel,
    compose_rel,
    conjugate,
    converse_rel,
    eval_term,
    fix_members,
    fix_proj_members,
    fix_seq_members,
    fix_tree_members,
    fork,
    meet_rel,
    parse_seq,
    parse_term,
    projections,
    seq_symbols,
    si_member,
    transport,
    tree_map,
    underline_seq,
    underline_tree,
    union_rel,
    urelement_relations,
    window,
)
from relfork.forkmodel import EMPTY, IDENTITY, UNIVERSAL, random_supported_relation

from helpers import compose_pairs, converse_pairs, fork_pairs, random_pairs

# The basic star is a bijection (no urelements); the projection-controlled
# star leaves its reserved partner elements outside the range of star.
BASIC = build_star_basic([1, 2])
PROJ = build_star_proj([3, 4])
CANTOR = PairingFunction(star=cantor_pair, unstar=cantor_unpair, meta=None)


def first_urelement(pf: PairingFunction, bound: int = 200) -> int:
    return next(u for u in range(bound) if pf.unstar(u) is None)


def rel_window_pairs(rel: LazyRelation, n: int) -> set:
    return set(window(rel, n).pairs())


class TestLazyRelation:
    def test_from_support(self):
        r = LazyRelation.from_support([(0, 1), (0, 2), (3, 0)])
        assert r.contains(0, 1) and r.contains(3, 0)
        assert not r.contains(1, 0)
        assert r.support_hint == frozenset({(0, 1), (0, 2), (3, 0)})
        assert tuple(r.witnesses(0)) == (1, 2)
        assert tuple(r.witnesses(5)) == ()

    def test_from_predicate(self):
        r = LazyRelation.from_predicate(lambda a, b: a + b == 4)
        assert r.contains(1, 3) and not r.contains(1, 1)
        assert r.support_hint is None and r.witnesses is None

    def test_constants(self):
        assert EMPTY.support_hint == frozenset()
        assert UNIVERSAL.contains(10**9, 0)
        assert IDENTITY.contains(7, 7) and not IDENTITY.contains(7, 8)
        assert tuple(IDENTITY.witnesses(7)) == (7,)


class TestCombinators:
    def test_boolean_ops_match_oracles(self):
        rng = random.Random(2)
        for _ in range(60):
            pr, ps = random_pairs(rng, 10), random_pairs(rng, 10)
            r, s = LazyRelation.from_support(pr), LazyRelation.from_support(ps)
            assert rel_window_pairs(union_rel(r, s), 10) == pr | ps
            assert rel_window_pairs(meet_rel(r, s), 10) == pr & ps
            assert rel_window_pairs(converse_rel(r), 10) == converse_pairs(pr)
            comp = complement_rel(r)
            assert {
                (a, b) for a in range(10) for b in range(10) if comp.contains(a, b)
            } == {(a, b) for a in range(10) for b in range(10)} - pr

    def test_meet_keeps_one_sided_witnesses(self):
        r = LazyRelation.from_support([(0, 0), (0, 3), (1, 1)])
        odd = LazyRelation.from_predicate(lambda a, b: b % 2 == 1)
        m = meet_rel(r, odd)
        assert tuple(m.witnesses(0)) == (3,)
        m2 = meet_rel(odd, r)
        assert tuple(m2.witnesses(1)) == (1,)

    def test_compose_support_support(self):
        rng = random.Random(3)
        for _ in range(60):
            pr, ps = random_pairs(rng, 10), random_pairs(rng, 10)
            got = compose_rel(
                LazyRelation.from_support(pr), LazyRelation.from_support(ps)
            )
            assert got.support_hint == frozenset(compose_pairs(pr, ps))

    def test_compose_witness_left(self):
        r = LazyRelation.from_support([(0, 5), (1, 6)])
        s = IDENTITY
        got = compose_rel(r, s)
        assert got.contains(0, 5) and not got.contains(0, 6)
        assert tuple(got.witnesses(1)) == (6,)

    def test_compose_support_right(self):
        r = LazyRelation.from_predicate(lambda a, b: b == a + 1)
        s = LazyRelation.from_support([(3, 9), (5, 2)])
        got = compose_rel(r, s)
        assert got.contains(2, 9) and got.contains(4, 2)
        assert not got.contains(3, 9)
        assert tuple(got.witnesses(2)) == (9,)

    def test_compose_undecidable(self):
        left = LazyRelation.from_predicate(lambda a, b: a < b)
        right = LazyRelation.from_predicate(lambda a, b: a > b)
        with pytest.raises(UndecidableCompositionError) as exc:
            compose_rel(left, right)
        assert "undecidable-composition" in str(exc.value)

    def test_fork_matches_oracle(self):
        rng = random.Random(4)
        star = BASIC.star
        for _ in range(40):
            pr, ps = random_pairs(rng, 8), random_pairs(rng, 8)
            r, s = LazyRelation.from_support(pr), LazyRelation.from_support(ps)
            got = fork(r, s, BASIC)
            expected = fork_pairs(pr, ps, star)
            assert got.support_hint == frozenset(expected)
            for a, b in expected:
                assert got.contains(a, b)
            assert tuple(got.witnesses(20)) == ()

    def test_fork_contains_decides_through_unstar(self):
        r = LazyRelation.from_predicate(lambda a, b: True)
        s = LazyRelation.from_predicate(lambda a, b: True)
        f = fork(r, s, PROJ)
        assert f.contains(0, PROJ.star(0, 1))
        assert not f.contains(0, first_urelement(PROJ))


class TestWindow:
    def test_three_paths_agree(self):
        pairs = {(0, 1), (2, 3), (4, 4), (9, 0)}
        by_support = LazyRelation.from_support(pairs)
        by_witness = LazyRelation.from_predicate(
            lambda a, b: (a, b) in pairs,
            witnesses=lambda a: tuple(b for x, b in sorted(pairs) if x == a),
        )
        by_scan = LazyRelation.from_predicate(lambda a, b: (a, b) in pairs)
        w = window(by_support, 10)
        assert window(by_witness, 10) == w
        assert window(by_scan, 10) == w
        assert set(w.pairs()) == pairs

    def test_window_clips(self):
        r = LazyRelation.from_support([(0, 1), (50, 2), (3, 50)])
        assert rel_window_pairs(r, 10) == {(0, 1)}

    def test_window_cap(self):
        with pytest.raises(ValueError):
            window(IDENTITY, 5000)
        assert window(IDENTITY, 5000, cap=5000).count() == 5000


class TestProjectionRelations:
    def test_projections_agree_with_unstar(self):
        pi_rel, rho_rel = projections(BASIC)
        for u in range(200):
            decoded = BASIC.unstar(u)
            if decoded is None:
                assert tuple(pi_rel.witnesses(u)) == ()
                assert not pi_rel.contains(u, 0)
            else:
                x, y = decoded
                assert pi_rel.contains(u, x) and tuple(pi_rel.witnesses(u)) == (x,)
                assert rho_rel.contains(u, y) and tuple(rho_rel.witnesses(u)) == (y,)

    def test_urelement_relations(self):
        id_u, u1u = urelement_relations(PROJ)
        urelements = [u for u in range(100) if PROJ.unstar(u) is None]
        paired = [u for u in range(100) if PROJ.unstar(u) is not None]
        assert urelements and paired
        for u in urelements[:5]:
            assert id_u.contains(u, u)
            assert tuple(id_u.witnesses(u)) == (u,)
        for u in paired[:5]:
            assert not id_u.contains(u, u)
        assert u1u.contains(urelements[0], urelements[-1])
        assert not u1u.contains(urelements[0], paired[0])

    def test_basic_star_is_total(self):
        assert all(BASIC.unstar(u) is not None for u in range(200))

    def test_projections_on_total_pairing(self):
        pi_rel, rho_rel = projections(CANTOR)
        u = cantor_pair(3, 5)
        assert pi_rel.contains(u, 3) and rho_rel.contains(u, 5)


class TestUnderline:
    def test_underline_tree_is_tree_map_image(self):
        t = Bin(Bin(NIL, NIL), NIL)
        rel = underline_tree(t, CANTOR)
        for u in range(50):
            image = tree_map(t, cantor_pair, u)
            assert rel.contains(u, image)
            assert tuple(rel.witnesses(u)) == (image,)
            assert not rel.contains(u, image + 1)

    def test_underline_seq_chases_projections(self):
        s = parse_seq("pi.rho")
        rel = underline_seq(s, CANTOR)
        u = cantor_pair(cantor_pair(9, 4), 7)
        # Head symbol pi keeps the left component, then rho keeps the right.
        assert tuple(rel.witnesses(u)) == (4,)

    def test_underline_seq_stops_on_urelement(self):
        s = parse_seq("pi")
        rel = underline_seq(s, PROJ)
        urelement = first_urelement(PROJ)
        assert tuple(rel.witnesses(urelement)) == ()
        assert not rel.contains(urelement, urelement)


class TestFixMembers:
    def test_plain_fix_of_built_star(self):
        assert fix_members(BASIC, range(500)) == (1, 2)

    def test_plain_fix_of_cantor(self):
        assert fix_members(CANTOR, range(500)) == (0,)

    def test_tree_fix_rejects_nil_control(self):
        with pytest.raises(NilControlError):
            fix_tree_members(NIL, BASIC, range(10))

    def test_proj_fix_on_cantor(self):
        # cantor_pair(u, 0) == u at u in {0, 1}; cantor_pair(x, u) == u only at 0.
        assert fix_proj_members(CANTOR, range(300), which=PI) == (0, 1)
        assert fix_proj_members(CANTOR, range(300), which=RHO) == (0,)

    def test_seq_fix_matches_chase(self):
        s = parse_seq("pi.pi")
        got = fix_seq_members(s, CANTOR, range(300))
        symbols = seq_symbols(s)
        expected = []
        for u in range(300):
            v = u
            ok = True
            for symbol in symbols:
                decoded = cantor_unpair(v)
                v = decoded[0] if symbol == PI else decoded[1]
            if v == u:
                expected.append(u)
        assert got == tuple(expected)


class TestSiMember:
    def test_subidentity(self):
        assert si_member(LazyRelation.from_support([(3, 3), (5, 5)]), UNIVERSAL)
        assert not si_member(LazyRelation.from_support([(3, 4)]), UNIVERSAL)

    def test_bound_restricts(self):
        bound = LazyRelation.from_predicate(lambda a, b: a < 4)
        assert si_member(LazyRelation.from_support([(3, 3)]), bound)
        assert not si_member(LazyRelation.from_support([(5, 5)]), bound)

    def test_needs_support(self):
        with pytest.raises(NoFiniteSupportError):
            si_member(IDENTITY, UNIVERSAL)


class TestConjugation:
    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            conjugate(BASIC, {0: 1})
        with pytest.raises(ValueError):
            transport(EMPTY, {0: 1, 2: 1})

    def test_conjugate_moves_fixpoints(self):
        perm = {1: 7, 7: 1}
        conj = conjugate(BASIC, perm)
        assert set(fix_members(conj, range(500))) == {7, 2}

    def test_conjugate_formula(self):
        perm = {0: 3, 3: 0, 10: 11, 11: 10}
        conj = conjugate(BASIC, perm)
        fwd = lambda x: perm.get(x, x)
        for x in range(12):
            for y in range(12):
                assert conj.star(fwd(x), fwd(y)) == fwd(BASIC.star(x, y))

    def test_transport_window(self):
        perm = {0: 1, 1: 0, 4: 6, 6: 4}
        pairs = {(0, 4), (1, 1), (6, 2)}
        moved = transport(LazyRelation.from_support(pairs), perm)
        fwd = lambda x: perm.get(x, x)
        assert moved.support_hint == frozenset((fwd(a), fwd(b)) for a, b in pairs)
        assert rel_window_pairs(moved, 10) == {(fwd(a), fwd(b)) for a, b in pairs}

    def test_transport_of_predicate(self):
        perm = {2: 9, 9: 2}
        moved = transport(IDENTITY, perm)
        for u in range(12):
            assert moved.contains(u, u)
        assert tuple(moved.witnesses(9)) == (9,)


class TestCfaAxiomCheck:
    def test_passes_on_built_stars(self):
        report = cfa_axiom_check(BASIC, support_bound=32, trials=40, seed=0, urelement_bound=300)
        assert report.all_passed
        assert [r.name for r in report.results] == ["cfa1", "cfa2", "cfa3"]
        with_urelements = cfa_axiom_check(
            PROJ, support_bound=32, trials=40, seed=0, urelement_bound=300,
            include_urelement_axiom=True,
        )
        assert with_urelements.all_passed
        assert [r.name for r in with_urelements.results] == ["cfa1", "cfa2", "cfa3", "cfau"]

    def test_urelement_axiom_fails_on_bijective_star(self):
        report = cfa_axiom_check(
            BASIC, support_bound=16, trials=10, urelement_bound=300,
            include_urelement_axiom=True,
        )
        by_name = {r.name: r for r in report.results}
        assert not by_name["cfau"].passed

    def test_urelement_axiom_fails_on_total_pairing(self):
        report = cfa_axiom_check(
            CANTOR, support_bound=16, trials=10, urelement_bound=200,
            include_urelement_axiom=True,
        )
        by_name = {r.name: r for r in report.results}
        assert by_name["cfa1"].passed and by_name["cfa2"].passed
        assert by_name["cfa3"].passed
        assert not by_name["cfau"].passed
        assert not report.all_passed

    def test_broken_inverse_fails(self):
        broken = PairingFunction(
            star=cantor_pair,
            unstar=lambda u: (0, 0),
        )
        report = cfa_axiom_check(broken, support_bound=16, trials=10, urelement_bound=50)
        by_name = {r.name: r for r in report.results}
        assert not by_name["cfa3"].passed
        assert by_name["cfa3"].witness == 1

    def test_broken_fork_pattern_fails(self):
        # unstar decodes a region star never reaches, so fork support pairs
        # are rejected by the projection pattern.
        broken = PairingFunction(
            star=lambda x, y: cantor_pair(x, y) + 1,
            unstar=lambda u: cantor_unpair(u),
        )
        report = cfa_axiom_check(broken, support_bound=16, trials=20, seed=3)
        assert not report.all_passed

    def test_random_supported_relation_bounds(self):
        rng = random.Random(0)
        for _ in range(20):
            rel = random_supported_relation(rng, 10, max_size=5)
            assert len(rel.support_hint) <= 5
            assert all(0 <= a < 10 and 0 <= b < 10 for a, b in rel.support_hint)


class TestForkBackend:
    def test_const_dispatch(self):
        backend = ForkBackend(BASIC)
        assert backend.const("zero") is EMPTY
        assert backend.const("one") is UNIVERSAL
        assert backend.const("id") is IDENTITY
        pi_rel = backend.const("pi")
        u = BASIC.star(4, 9)
        assert pi_rel.contains(u, 4)
        assert backend.const("rho").contains(u, 9)
        urelement = first_urelement(PROJ)
        assert ForkBackend(PROJ).const("urid").contains(urelement, urelement)
        with pytest.raises(ValueError):
            backend.const("bottom")

    def test_term_evaluation_through_backend(self):
        backend = ForkBackend(BASIC)
        r = LazyRelation.from_support([(0, 3), (1, 4)])
        s = LazyRelation.from_support([(0, 5), (1, 6)])
        got = eval_term(parse_term("x # y"), {"x": r, "y": s}, backend)
        assert got.support_hint == frozenset(
            {(0, BASIC.star(3, 5)), (1, BASIC.star(4, 6))}
        )

    def test_projection_fork_is_subidentity(self):
        # pi # rho re-pairs the components of a, so it lands on the diagonal
        # exactly where star inverts unstar.
        for pf in (BASIC, PROJ):
            rel = eval_term(parse_term("pi # rho"), {}, ForkBackend(pf))
            got = rel_window_pairs(rel, 60)
            assert got == {(a, a) for a in range(60) if pf.unstar(a) is not None}

    def test_comparisons_rejected(self):
        backend = ForkBackend(BASIC)
        with pytest.raises(ValueError):
            backend.equal(EMPTY, EMPTY)
        with pytest.raises(ValueError):
            backend.below(EMPTY, EMPTY)
