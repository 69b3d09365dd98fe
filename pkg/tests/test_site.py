"""Sieve generation, pullback, saturation, topology axioms."""

import pytest

from finsite.errors import CodomainMismatchError, SizeLimitError
from finsite.site import (
    Sieve,
    all_sieves,
    empty_cover_objects,
    empty_sieve,
    generated_sieve,
    induced_topology,
    maximal_sieve,
    pullback_sieve,
    saturate_topology,
    validate_topology,
    Topology,
)
from finsite.fincat import full_subcategory
from finsite.standard import (
    all_sieves_topology,
    cyclic_group_category,
    sierpinski_poset,
    trivial_topology,
)


def test_generated_sieve_on_sierpinski():
    sp = sierpinski_poset()
    a = sp.morphism_id("0<=1")
    sieve = generated_sieve(sp, sp.object_id("1"), {a})
    assert sieve.members == {a}


def test_generated_sieve_from_identity_is_maximal():
    sp = sierpinski_poset()
    one = sp.object_id("1")
    sieve = generated_sieve(sp, one, {sp.identity[one]})
    assert sieve == maximal_sieve(sp, one)


def test_generated_sieve_empty_and_codomain_check():
    sp = sierpinski_poset()
    assert generated_sieve(sp, 0, set()).members == frozenset()
    with pytest.raises(CodomainMismatchError):
        generated_sieve(sp, sp.object_id("0"), {sp.morphism_id("0<=1")})


def test_pullback_examples():
    sp = sierpinski_poset()
    zero, one = sp.object_id("0"), sp.object_id("1")
    a = sp.morphism_id("0<=1")
    top = maximal_sieve(sp, one)
    assert pullback_sieve(sp, top, a) == maximal_sieve(sp, zero)
    assert pullback_sieve(sp, Sieve(one, frozenset({a})), a) == maximal_sieve(sp, zero)
    assert pullback_sieve(sp, empty_sieve(one), a) == empty_sieve(zero)
    with pytest.raises(CodomainMismatchError):
        pullback_sieve(sp, empty_sieve(zero), a)


def test_trivial_topology_only_maximal(bz4_site):
    cat = bz4_site.category
    assert bz4_site.topology.covers_of(0) == (maximal_sieve(cat, 0),)
    assert validate_topology(cat, bz4_site.topology) == []


def test_all_sieves_topology_is_already_a_topology():
    bz2 = cyclic_group_category(2)
    full = all_sieves_topology(bz2)
    assert validate_topology(bz2, full) == []
    basis = {0: list(all_sieves(bz2, 0))}
    assert saturate_topology(bz2, basis) == full


def test_open_cover_saturation_from_union_basis(opens_site):
    cat = opens_site.category
    x = cat.object_id("X")
    union_cover = Sieve(
        x, frozenset({cat.morphism_id("O<=X"), cat.morphism_id("U<=X")})
    )
    basis = {cat.object_id("O"): [empty_sieve(cat.object_id("O"))], x: [union_cover]}
    saturated = saturate_topology(cat, basis)
    # The union {O, U} does not reach X, so that sieve saturates away only
    # via transitivity additions; the open-cover topology differs from it
    # exactly by whether that sieve covers.
    assert saturated.is_cover(empty_sieve(cat.object_id("O")))
    assert validate_topology(cat, saturated) == []


def test_validate_topology_missing_maximal():
    sp = sierpinski_poset()
    broken = Topology({0: (empty_sieve(0),), 1: (maximal_sieve(sp, 1),)})
    axioms = {v.axiom for v in validate_topology(sp, broken)}
    assert "maximality" in axioms


def test_saturation_output_always_valid(opens_site, bz2_all_sieves_site, bz4_site):
    for site in (opens_site, bz2_all_sieves_site, bz4_site):
        assert validate_topology(site.category, site.topology) == []


def test_empty_cover_objects(opens_site, bz4_site, bz2_all_sieves_site):
    assert empty_cover_objects(bz4_site.category, bz4_site.topology) == []
    assert empty_cover_objects(
        bz2_all_sieves_site.category, bz2_all_sieves_site.topology
    ) == ["*"]
    assert empty_cover_objects(opens_site.category, opens_site.topology) == ["O"]


def test_induced_topology_identity_case(bz4_site):
    cat = bz4_site.category
    sub = full_subcategory(cat, list(cat.objects))
    assert induced_topology(cat, bz4_site.topology, sub) == bz4_site.topology


def test_induced_topology_on_opens_chain(opens_site, opens_d_site):
    sub = opens_d_site.category
    topo = opens_d_site.topology
    assert empty_cover_objects(sub, topo) == []
    assert validate_topology(sub, topo) == []
    # The chain inherits exactly the maximal sieves.
    for x in range(len(sub.objects)):
        assert topo.covers_of(x) == (maximal_sieve(sub, x),)


def test_trivial_topology_induces_trivially(bs3_site):
    cat = bs3_site.category
    sub = full_subcategory(cat, list(cat.objects))
    induced = induced_topology(cat, bs3_site.topology, sub)
    assert induced == trivial_topology(sub)


def test_cover_intersections_are_covers(opens_site, bz2_all_sieves_site, bz4_site, bs3_site):
    for site in (opens_site, bz2_all_sieves_site, bz4_site, bs3_site):
        topo = site.topology
        for x in range(len(site.category.objects)):
            for s in topo.covers_of(x):
                for r in topo.covers_of(x):
                    assert topo.is_cover(Sieve(x, s.members & r.members))


def test_sieve_lattice_guard():
    bz2 = cyclic_group_category(2)
    with pytest.raises(SizeLimitError):
        all_sieves(bz2, 0, max_cone=1)


def test_all_sieves_is_complete_and_closed():
    bz2 = cyclic_group_category(2)
    sieves = all_sieves(bz2, 0)
    # On BZ2 the sieves on the point are exactly the empty and maximal ones.
    assert [sorted(s.members) for s in sieves] == [[], [0, 1]]
