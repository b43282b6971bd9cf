"""Unit tests for the power-commutator group engine."""

import pytest

from ramify import (
    CapExceededError,
    InconsistentPresentationError,
    InputError,
    PcGroup,
    PcPresentation,
    build_heisenberg,
    build_tower_truncation,
    consistency_check,
    shipped_truncations,
)


def _heis(p):
    return PcGroup(build_heisenberg(p))


# -- presentation and collection ---------------------------------------------


def test_presentation_validation():
    with pytest.raises(InputError):
        PcPresentation.build(4, 2)  # composite p
    with pytest.raises(InputError):
        PcPresentation.build(2, 0)  # no generators
    with pytest.raises(InputError):
        PcPresentation.build(2, 2, comm={(1, 2): {}})  # needs j > i
    with pytest.raises(InputError):
        PcPresentation.build(2, 2, power={1: {1: 1}})  # rhs not above j


def test_presentation_json_round_trip():
    pres = build_heisenberg(3)
    assert PcPresentation.from_json_dict(pres.to_json_dict()) == pres
    with pytest.raises(InputError):
        PcPresentation.from_json_dict({"p": 3, "n": 3, "bogus": []})


def test_collection_fixtures():
    g = _heis(3)
    a1, a2, a3 = g.generator(1), g.generator(2), g.generator(3)
    assert g.product(a1, a2) == (1, 1, 0)  # already in normal form
    assert g.product(a2, a1) == (1, 1, 1)  # a2 a1 = a1 a2 a3
    assert g.product(a1, g.identity()) == a1
    assert g.product(a1, g.inverse(a1)) == g.identity()
    assert g.commutator(a2, a1) == a3
    assert g.commutator(a1, a1) == g.identity()
    assert g.power_p(a1) == g.identity()


def test_order_and_elements():
    g = _heis(3)
    assert g.order == 27
    assert len(g.elements()) == 27
    assert g.identity() == (0, 0, 0)
    with pytest.raises(InputError):
        g.element((1, 2))  # wrong arity
    with pytest.raises(InputError):
        g.element((3, 0, 0))  # exponent out of range


def test_element_length_and_sentinel():
    g = _heis(3)
    assert g.element_length(g.generator(1)) == 1
    assert g.element_length(g.generator(3)) == 2
    assert g.element_length((1, 0, 1)) == 1
    # identity reported as class + 1, never infinity
    assert g.element_length(g.identity()) == 3


def test_cap_enforced():
    with pytest.raises(CapExceededError):
        PcGroup(build_heisenberg(3), cap=10)


# -- consistency ----------------------------------------------------------------


def test_consistent_presentations_accept():
    for p in (2, 3):
        res = consistency_check(build_heisenberg(p))
        assert res.ok and res.witness is None


def test_depth_four_even_tower_rejected():
    with pytest.raises(InconsistentPresentationError) as exc:
        build_tower_truncation(2, 4)
    assert exc.value.witness == ((0, 1, 0, 0), (0, 1, 0, 0), (1, 0, 0, 0))


def test_consistency_witness_for_bad_variant():
    pres = PcPresentation.build(2, 4, comm={(2, 1): {3: 1}, (3, 1): {4: 1}})
    res = consistency_check(pres)
    assert not res.ok
    assert res.witness == ((0, 1, 0, 0), (1, 0, 0, 0), (1, 0, 0, 0))
    assert res.detail == "overlap test failed"


def test_exhaustive_flag_agrees():
    pres = build_heisenberg(2)
    assert consistency_check(pres, exhaustive=True).ok
    bad = PcPresentation.build(2, 4, comm={(2, 1): {3: 1}, (3, 1): {4: 1}})
    assert not consistency_check(bad, exhaustive=True).ok


# -- series, subgroups, rank ------------------------------------------------------


def test_heisenberg_series():
    g = _heis(3)
    gamma = g.lower_central_series()
    pser = g.lower_p_series()
    assert [s.order for s in gamma] == [27, 3, 1]
    assert [s.order for s in pser] == [27, 3, 1]
    rep = g.series_equality_check()
    assert rep["all_equal"]
    assert rep["gp_in_derived"]


def test_cyclic_p_squared_series_differ():
    g = PcGroup(PcPresentation.build(3, 2, power={1: {2: 1}}))
    rep = g.series_equality_check()
    assert not rep["all_equal"]
    gamma = [lvl["gamma_order"] for lvl in rep["levels"]]
    pser = [lvl["p_order"] for lvl in rep["levels"]]
    assert gamma == [9, 1, 1]
    assert pser == [9, 3, 1]
    assert not rep["levels"][1]["equal"]


def test_elementary_abelian_series():
    g = PcGroup(PcPresentation.build(5, 2))
    assert [s.order for s in g.lower_central_series()] == [25, 1]
    assert [s.order for s in g.lower_p_series()] == [25, 1]


def test_subgroup_closures():
    g = _heis(3)
    center = g.subgroup([g.generator(3)])
    assert center.order == 3
    assert center.is_normal()
    closure = g.normal_closure([g.generator(2)])
    assert closure.order == 9
    assert g.generator(3) in closure
    assert g.subgroup([]).order == 1
    off_axis = g.subgroup([g.generator(1)])
    assert off_axis.order == 3
    assert not off_axis.is_normal()


def test_min_generators_and_frattini():
    g = _heis(7)
    full = g.full_subgroup()
    assert g.frattini_subgroup(full).order == 7
    assert g.min_generators(full) == 2
    assert g.min_generators(g.trivial_subgroup()) == 0
    two_gen = g.subgroup([g.generator(2), g.generator(3)])
    assert two_gen.order == 49
    assert g.min_generators(two_gen) == 2


# -- tower truncations --------------------------------------------------------------


def test_shipped_registry_contents():
    assert shipped_truncations() == [
        (2, 3),
        (3, 3),
        (5, 3),
        (7, 3),
        (3, 4),
        (5, 4),
        (7, 4),
    ]


def test_shipped_truncations_build():
    for p, depth in shipped_truncations():
        pres = build_tower_truncation(p, depth)
        assert pres.order == p**depth


def test_depth_five_rejected_small_primes():
    for p in (2, 3, 5, 7):
        with pytest.raises(InconsistentPresentationError):
            build_tower_truncation(p, 5)


def test_truncation_policy_validation():
    with pytest.raises(InputError):
        build_tower_truncation(3, 4, policy="guess")
    with pytest.raises(InputError):
        # trivial-fill accepts no assignments
        build_tower_truncation(3, 4, comm={(3, 1): {4: 1}})
    with pytest.raises(InputError):
        # the chain relations cannot be overridden even under the table policy
        build_tower_truncation(3, 4, policy="table", comm={(3, 2): {4: 1}})
    with pytest.raises(InputError):
        build_tower_truncation(3, 1)


def test_just_infinite_probe_shape():
    g = PcGroup(build_tower_truncation(3, 4))
    rep = g.just_infinite_probe([1, 2, 3, 4])
    assert rep["ok"]
    assert all(pair["contained"] for pair in rep["pairs"])
    with pytest.raises(InputError):
        g.just_infinite_probe([0, 1])


def test_rank_growth_probe_fixture():
    g = PcGroup(build_tower_truncation(3, 4))
    rep = g.rank_growth_probe(1)
    assert rep["indices"] == [3, 4]
    assert rep["order"] == 9
    assert rep["min_generators"] == 2
    with pytest.raises(InputError):
        g.rank_growth_probe(2)  # needs depth >= 6


def test_abelianization_map_is_onto():
    # exponent sums on the first two generators give the Frattini quotient
    for p, depth in [(3, 4), (5, 4)]:
        g = PcGroup(build_tower_truncation(p, depth))
        assert g.min_generators(g.full_subgroup()) == 2
        images = {(x[0] % p, x[1] % p) for x in g.elements()}
        assert len(images) == p * p
