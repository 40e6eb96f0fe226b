"""Shared fixtures and random-form helpers."""
from __future__ import annotations

import numpy as np
import pytest

from kyforms import geometry, killing
from kyforms.exprs import tree
from kyforms.forms import PForm


@pytest.fixture(scope="session")
def ads3():
    return geometry.ads_static(3)


@pytest.fixture(scope="session")
def ads3_ky():
    return killing.ads3_ky()


@pytest.fixture(scope="session")
def ads3_cky():
    return killing.ads_cky(3)


@pytest.fixture(scope="session")
def mink3():
    return geometry.minkowski(3)


@pytest.fixture(scope="session")
def mink4():
    return geometry.minkowski(4)


def random_poly_form(geom, degree: int, rng: np.random.Generator,
                     max_coeff: int = 3, poly_degree: int = 2) -> PForm:
    """Random form with small integer polynomial coefficients."""
    import itertools
    comps = {}
    coords = geom.chart.coordinates
    for idx in itertools.combinations(range(geom.n), degree):
        terms = [tree.Rat(int(rng.integers(-max_coeff, max_coeff + 1)))]
        for _ in range(int(rng.integers(0, poly_degree + 1))):
            c = int(rng.integers(-max_coeff, max_coeff + 1))
            v1 = coords[int(rng.integers(0, geom.n))]
            v2 = coords[int(rng.integers(0, geom.n))]
            terms.append(tree.rmul((tree.Rat(c), tree.Sym(v1), tree.Sym(v2))))
        comps[idx] = tree.radd(terms)
    return PForm(geom, degree, comps)


def random_family_combo(family, degree: int, rng: np.random.Generator) -> PForm:
    """Random small-integer combination of family members of one degree."""
    from kyforms.forms import zero_form
    out = zero_form(family.geometry, degree)
    for _name, _role, f in family.by_degree(degree):
        c = int(rng.integers(-2, 3))
        if c:
            out = out + f.scaled(c)
    return out
