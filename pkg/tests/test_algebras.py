import itertools

import numpy as np
import pytest

from mtlforest.algebras import (
    canonicalize,
    chain_w,
    bool2,
    enumerate_mtl_chains,
    filter_generated,
    filters,
    godel_chain,
    idempotent_structure,
    interval_algebra,
    is_archimedean,
    is_simple,
    lukasiewicz_chain,
    parse_mtl,
    quotient,
    relabel,
    spectrum,
    trivial_algebra,
    upset_algebra,
    validate_mtl,
    write_mtl,
)
from mtlforest.errors import (
    BoundsWrong,
    NotAChain,
    NotCommutative,
    NotIdempotent,
    ParseError,
    PrelinearityFails,
    ResiduationFails,
    ValidationError,
)
from mtlforest.morphisms import enumerate_morphisms, find_isomorphism
from mtlforest.posets import is_forest


# ---------------------------------------------------------------- validation


def test_boolean_two_chain_is_valid():
    two = validate_mtl({
        "n": 2, "bot": 0, "top": 1,
        "mul": [[0, 0], [0, 1]],
        "imp": [[1, 1], [0, 1]],
        "meet": [[0, 0], [0, 1]],
        "join": [[0, 1], [1, 1]],
    })
    assert two == bool2()


def test_lukasiewicz3_residuation_oracle():
    # independent tables straight from the truncated-sum formulas
    mul = [[max(0, x + y - 2) for y in range(3)] for x in range(3)]
    imp = [[min(2, 2 - x + y) for y in range(3)] for x in range(3)]
    for x, y, z in itertools.product(range(3), repeat=3):
        assert (mul[x][y] <= z) == (x <= imp[y][z])
    alg = validate_mtl({
        "n": 3, "bot": 0, "top": 2, "mul": mul, "imp": imp,
        "meet": [[min(x, y) for y in range(3)] for x in range(3)],
        "join": [[max(x, y) for y in range(3)] for x in range(3)],
    })
    assert alg == lukasiewicz_chain(3)


def test_mutated_lukasiewicz3_is_rejected():
    l3 = lukasiewicz_chain(3)
    bad = np.array(l3.mul)
    bad.setflags(write=True)
    bad[1, 1] = 2  # a·a = 1 breaks residuation against the Ł3 residual
    with pytest.raises(ValidationError):
        validate_mtl({"n": 3, "bot": 0, "top": 2, "mul": bad, "imp": l3.imp,
                      "meet": l3.meet, "join": l3.join})


def test_noncommutative_product_is_rejected():
    two = bool2()
    bad = [[0, 1], [0, 1]]
    with pytest.raises(NotCommutative):
        validate_mtl({"n": 2, "bot": 0, "top": 1, "mul": bad, "imp": two.imp,
                      "meet": two.meet, "join": two.join})


def test_bounds_errors():
    two = bool2()
    with pytest.raises(BoundsWrong):
        validate_mtl({"n": 2, "bot": 2, "top": 1, "mul": two.mul,
                      "imp": two.imp, "meet": two.meet, "join": two.join})
    with pytest.raises(BoundsWrong):
        validate_mtl({"n": 2, "bot": 1, "top": 1, "mul": two.mul,
                      "imp": two.imp, "meet": two.meet, "join": two.join})


def test_residuation_witness():
    l3 = lukasiewicz_chain(3)
    bad = np.array(l3.imp)
    bad.setflags(write=True)
    bad[1, 0] = 2  # a -> 0 lifted to 1
    with pytest.raises(ResiduationFails):
        validate_mtl({"n": 3, "bot": 0, "top": 2, "mul": l3.mul, "imp": bad,
                      "meet": l3.meet, "join": l3.join})


def _heyting_imp(meet, n):
    # x -> y = largest z with x ∧ z <= y (exists in a Heyting algebra)
    leq = [[meet[x][y] == x for y in range(n)] for x in range(n)]
    imp = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            cands = [z for z in range(n) if leq[meet[x][z]][y]]
            best = [z for z in cands if all(leq[w][z] for w in cands)]
            assert len(best) == 1
            imp[x][y] = best[0]
    return imp


def test_non_prelinear_heyting_algebra_is_rejected():
    # 0 < {a, b} < m < 1 with a, b incomparable: (a->b) ∨ (b->a) = m != 1
    n = 5
    order = [
        [1, 1, 1, 1, 1],
        [0, 1, 0, 1, 1],
        [0, 0, 1, 1, 1],
        [0, 0, 0, 1, 1],
        [0, 0, 0, 0, 1],
    ]
    meet = [[0] * n for _ in range(n)]
    join = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            lows = [z for z in range(n) if order[z][x] and order[z][y]]
            meet[x][y] = [z for z in lows if all(order[w][z] for w in lows)][0]
            ups = [z for z in range(n) if order[x][z] and order[y][z]]
            join[x][y] = [z for z in ups if all(order[z][w] for w in ups)][0]
    imp = _heyting_imp(meet, n)
    with pytest.raises(PrelinearityFails) as exc:
        validate_mtl({"n": n, "bot": 0, "top": 4, "mul": meet, "imp": imp,
                      "meet": meet, "join": join})
    assert sorted(exc.value.witness) == [1, 2]


def test_trivial_algebra_is_valid():
    one = trivial_algebra()
    assert validate_mtl(one) is one
    assert one.is_chain() and is_archimedean(one)


# ---------------------------------------------------------------- structure


def test_idempotent_structure_l3():
    st = idempotent_structure(lukasiewicz_chain(3))
    assert st.idempotents == (0, 2)
    assert st.join_irreducible == (2,)
    assert st.minimal == (2,)
    assert st.a(2) == 0


def test_idempotent_structure_2x2():
    from mtlforest.constructions import direct_product

    p = direct_product([bool2(), bool2()])
    # oracle: square every element
    idem = tuple(x for x in range(4) if int(p.mul[x, x]) == x)
    st = idempotent_structure(p)
    assert st.idempotents == idem == (0, 1, 2, 3)
    assert st.join_irreducible == (1, 2)
    assert not st.ji_poset.comparable(0, 1)  # a 2-antichain


def test_idempotent_structure_g3():
    g3 = godel_chain(3)
    st = idempotent_structure(g3)
    assert st.idempotents == (0, 1, 2)
    assert st.join_irreducible == (1, 2)
    assert st.minimal == (1,)
    assert st.a(1) == 0 and st.a(2) == 1


# ---------------------------------------------------------------- filters


def test_filter_generated_by_nilpotent_is_everything():
    l3 = lukasiewicz_chain(3)
    f = filter_generated(l3, 1)  # a^2 = 0
    assert f.members == frozenset({0, 1, 2})


def test_g3_filters_and_primes():
    g3 = godel_chain(3)
    fs = filters(g3)
    assert [(f.generator, sorted(f.members)) for f in fs] == [
        (0, [0, 1, 2]), (1, [1, 2]), (2, [2]),
    ]
    assert [f.is_prime() for f in fs] == [False, True, True]


def test_filter_of_top_is_singleton(chains6):
    for m in chains6:
        f = filter_generated(m, m.top)
        assert f.members == frozenset({m.top})


def test_filters_biject_with_idempotents(algebras):
    for m in algebras:
        fs = filters(m)
        assert [f.generator for f in fs] == list(m.idempotents())
        assert len({f.members for f in fs}) == len(fs)
        # prime filters are generated by join irreducibles
        ji = set(idempotent_structure(m).join_irreducible)
        for f in fs:
            assert f.is_prime() == (f.generator in ji) or m.n == 1


# ---------------------------------------------------------------- quotients


def test_quotient_by_top_filter_is_identity():
    for m in (lukasiewicz_chain(4), godel_chain(3), chain_w()):
        q, proj = quotient(m, filter_generated(m, m.top))
        assert q.n == m.n
        assert find_isomorphism(m, q) is not None
        assert proj.is_injective


def test_quotient_by_whole_algebra_is_trivial():
    m = lukasiewicz_chain(3)
    q, proj = quotient(m, filter_generated(m, m.bot))
    assert q.n == 1
    assert set(proj.mapping) == {0}


def test_quotient_w_by_e_collapses_to_two():
    w = chain_w()
    q, proj = quotient(w, filter_generated(w, 2))
    # b -> 0 = e lands in the filter, so b ~ 0; e ~ 1 likewise
    assert proj.mapping[0] == proj.mapping[1]
    assert proj.mapping[2] == proj.mapping[3]
    assert q == bool2()


def test_quotient_universal_property_by_search(chains6):
    small_targets = [c for c in chains6 if c.n <= 3]
    for m in (godel_chain(3), chain_w()):
        for filt in filters(m):
            q, proj = quotient(m, filt)
            for b in small_targets:
                for g in enumerate_morphisms(m, b):
                    if not filt.members <= g.kernel:
                        continue
                    factored = [
                        h for h in enumerate_morphisms(q, b)
                        if tuple(h.mapping[proj.mapping[x]] for x in range(m.n))
                        == g.mapping
                    ]
                    assert len(factored) == 1


def test_quotient_chain_and_archimedean_characterizations(algebras):
    # quotients by nontrivial filters: a chain exactly at join irreducibles,
    # archimedean exactly at the minimal ones
    for m in algebras:
        if m.n == 1:
            continue
        st = idempotent_structure(m)
        for filt in filters(m):
            e = filt.generator
            if e == m.bot:  # the full congruence gives the trivial quotient
                continue
            q, _ = quotient(m, filt)
            assert q.is_chain() == (e in st.join_irreducible)
            if q.is_chain() and q.n > 1:
                assert is_archimedean(q) == (e in st.minimal)


# ---------------------------------------------------------------- spectrum


def test_spectrum_of_two():
    sp = spectrum(bool2())
    assert sp.poset.n == 1


def test_spectrum_of_2x2_is_antichain():
    from mtlforest.constructions import direct_product

    sp = spectrum(direct_product([bool2(), bool2()]))
    assert sp.poset.n == 2
    assert not sp.poset.comparable(0, 1)


def test_spectrum_of_g3_is_chain():
    sp = spectrum(godel_chain(3))
    assert sp.poset.n == 2
    assert sp.poset.comparable(0, 1)
    # inclusion order: ↑top ⊂ ↑a
    gens = [f.generator for f in sp.primes]
    assert gens == [1, 2]


def test_spectrum_duality_with_join_irreducibles(algebras):
    for m in algebras:
        sp = spectrum(m)
        st = idempotent_structure(m)
        assert is_forest(sp.op_forest)
        gens = tuple(f.generator for f in sp.primes)
        assert gens == st.join_irreducible
        # e <= e' iff ↑e' ⊆ ↑e: the generator map is an order reversal
        for i, e in enumerate(gens):
            for j, f_ in enumerate(gens):
                assert m.le(e, f_) == (sp.primes[j].members <= sp.primes[i].members)


# ---------------------------------------------------------------- archimedean


def test_archimedean_examples():
    assert is_archimedean(bool2())
    assert is_archimedean(lukasiewicz_chain(3))
    assert not is_archimedean(godel_chain(3))


def test_archimedean_requires_chain():
    from mtlforest.constructions import direct_product

    with pytest.raises(NotAChain):
        is_archimedean(direct_product([bool2(), bool2()]))


def test_archimedean_four_way_equivalence(chains6):
    for m in chains6:
        if m.n == 1:
            continue
        arch = is_archimedean(m)  # definitional and equational must agree inside
        no_internal_idem = m.idempotents() == [m.bot, m.top]
        simple = is_simple(m)
        assert arch == no_internal_idem == simple


# ---------------------------------------------------------------- up-sets


def test_upset_algebra_of_bot_is_whole():
    m = lukasiewicz_chain(4)
    alg, elems = upset_algebra(m, m.bot)
    assert alg == m and elems == list(range(4))


def test_upset_algebra_of_top_is_trivial():
    m = lukasiewicz_chain(4)
    alg, elems = upset_algebra(m, m.top)
    assert alg.n == 1 and elems == [3]


def test_upset_algebra_g3_middle():
    g3 = godel_chain(3)
    alg, elems = upset_algebra(g3, 1)
    assert elems == [1, 2]
    assert alg == bool2()


def test_upset_requires_idempotent():
    with pytest.raises(NotIdempotent):
        upset_algebra(lukasiewicz_chain(3), 1)


def test_interval_algebra_matches_quotient_when_local_unit():
    g4 = godel_chain(4)
    # e = 2 covers a_e = 1 in the idempotent order of a Gödel chain
    alg, elems = interval_algebra(g4, 1, 2)
    assert elems == [1, 2]
    up, up_elems = upset_algebra(g4, 1)
    from mtlforest.algebras import Filter

    filt = Filter(up, up_elems.index(2),
                  frozenset(i for i, v in enumerate(up_elems) if g4.le(2, v)))
    q, _ = quotient(up, filt)
    assert find_isomorphism(alg, q) is not None


# ---------------------------------------------------------------- chain oracle


def brute_force_chains(n):
    """Enumerate products entry-by-entry with no pruning at all."""
    top = n - 1
    free = [(x, y) for x in range(1, top) for y in range(x, top)]
    found = []
    for combo in itertools.product(*(range(min(x, y) + 1) for x, y in free)):
        mul = [[0] * n for _ in range(n)]
        for x in range(n):
            mul[x][top] = x
            mul[top][x] = x
        for (x, y), v in zip(free, combo):
            mul[x][y] = v
            mul[y][x] = v
        ok = True
        for x in range(n):
            for y in range(n):
                if x and mul[x][y] < mul[x - 1][y]:
                    ok = False
                for z in range(n):
                    if mul[mul[x][y]][z] != mul[x][mul[y][z]]:
                        ok = False
        if ok:
            found.append(tuple(map(tuple, mul)))
    return sorted(set(found))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_chain_oracle_against_brute_force(n):
    expected = brute_force_chains(n)
    got = [tuple(map(tuple, c.mul.tolist())) for c in enumerate_mtl_chains(n)]
    assert got == list(expected)


def test_chain_counts():
    assert [len(enumerate_mtl_chains(n)) for n in range(1, 7)] == [1, 1, 2, 6, 22, 94]


def test_all_enumerated_chains_validate(chains6):
    for c in chains6:
        assert validate_mtl(c) is c
        assert c.is_chain()


# ---------------------------------------------------------------- encoding


def test_canonicalize_restores_linear_extension():
    l4 = lukasiewicz_chain(4)
    perm = {0: 2, 1: 0, 2: 3, 3: 1}
    shuffled = relabel(l4, perm)
    validate_mtl(shuffled)
    fixed = canonicalize(shuffled)
    assert fixed == l4


def test_mtl_file_round_trip():
    for m in (lukasiewicz_chain(3), chain_w(), godel_chain(4)):
        text = write_mtl(m)
        again = parse_mtl(text)
        assert again == m
        assert write_mtl(again) == text


def test_mtl_parse_without_lattice_tables():
    l3 = lukasiewicz_chain(3)
    text = "n 3\nbot 0\ntop 2\nmul\n" + \
        "\n".join(" ".join(str(int(v)) for v in row) for row in l3.mul) + \
        "\nimp\n" + \
        "\n".join(" ".join(str(int(v)) for v in row) for row in l3.imp) + "\n"
    assert parse_mtl(text) == l3


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as exc:
        parse_mtl("n 2\nbot 0\ntop 1\nmul\n0 0\n0 1\nimp\n1 1\n")
    assert exc.value.line >= 7
    with pytest.raises(ParseError):
        parse_mtl("frobnicate\n")


def test_w_chain_shape():
    w = chain_w()
    assert w.idempotents() == [0, 2, 3]
    assert int(w.mul[2, 1]) == 0  # e·b = 0 < b = e ∧ b
    assert int(w.meet[2, 1]) == 1
