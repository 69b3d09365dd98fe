"""Shared site and sheaf catalogue fixtures."""

import pytest

from finsite.fincat import full_subcategory
from finsite.presheaf import (
    coproduct_many,
    representable,
    sheafify,
    terminal_presheaf,
)
from finsite.site import Site, induced_topology
from finsite.standard import (
    all_sieves_topology,
    cyclic_group_category,
    dihedral_group_category_order8,
    discrete_two_space_site,
    klein_four_category,
    quaternion_group_category,
    sierpinski_poset,
    sierpinski_space_site,
    symmetric_group_category,
    trivial_site,
)


def group_centre_oracle(elements, multiply):
    """Brute-force group centre: elements commuting with everything."""
    return [
        g for g in elements if all(multiply(g, x) == multiply(x, g) for x in elements)
    ]


@pytest.fixture(scope="session")
def bz2_site():
    return trivial_site(cyclic_group_category(2))


@pytest.fixture(scope="session")
def bz4_site():
    return trivial_site(cyclic_group_category(4))


@pytest.fixture(scope="session")
def bs3_site():
    return trivial_site(symmetric_group_category(3))


@pytest.fixture(scope="session")
def sierpinski_site():
    return trivial_site(sierpinski_poset())


@pytest.fixture(scope="session")
def opens_site():
    return sierpinski_space_site()


@pytest.fixture(scope="session")
def opens_d_site(opens_site):
    sub = full_subcategory(opens_site.category, ["U", "X"])
    return Site(sub, induced_topology(opens_site.category, opens_site.topology, sub))


@pytest.fixture(scope="session")
def bz2_all_sieves_site():
    cat = cyclic_group_category(2)
    return Site(cat, all_sieves_topology(cat))


@pytest.fixture(scope="session")
def diamond_site():
    return discrete_two_space_site()


@pytest.fixture(scope="session")
def group_sites():
    """The one-object sites used by the centre oracle comparison."""
    return {
        "Z2": trivial_site(cyclic_group_category(2)),
        "Z3": trivial_site(cyclic_group_category(3)),
        "Z4": trivial_site(cyclic_group_category(4)),
        "Z2xZ2": trivial_site(klein_four_category()),
        "S3": trivial_site(symmetric_group_category(3)),
        "D4": trivial_site(dihedral_group_category_order8()),
        "Q8": trivial_site(quaternion_group_category()),
    }


@pytest.fixture(scope="session")
def subcanonical_sites(bz4_site, bs3_site, sierpinski_site, opens_d_site):
    """Subcanonical catalogue sites without empty covers."""
    return {
        "BZ4-trivial": bz4_site,
        "BS3-trivial": bs3_site,
        "Sierpinski-trivial": sierpinski_site,
        "opens-restricted": opens_d_site,
    }


def small_catalogue(site):
    """Representables, terminal, and one sheafified coproduct per site."""
    cat = site.category
    sheaves = []
    for x in range(len(cat.objects)):
        sheaf, _ = sheafify(representable(cat, x), site.topology)
        sheaves.append((f"a(y {cat.objects[x]})", sheaf))
    sheaves.append(("terminal", terminal_presheaf(cat)))
    total, _ = coproduct_many([sheaves[0][1], sheaves[-1][1]])
    mixed, _ = sheafify(total, site.topology)
    sheaves.append(("a(rep + terminal)", mixed))
    return sheaves
