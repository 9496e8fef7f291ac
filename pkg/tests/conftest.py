from __future__ import annotations

from fractions import Fraction

import pytest

from strata2rec import genus1_load, load_relation, solve_up_to

# Published table of (N2, H2, P2)(d), d = 1..10.
TABLE = {
    1: (0, 0, 0),
    2: (0, 0, 0),
    3: (0, Fraction(-1, 4), Fraction(-1, 12)),
    4: (27, 42, Fraction(25, 4)),
    5: (36855, 130431, 21119),
    6: (58444767, 239431851, 33238513),
    7: (122824720116, 530315850624, 63738316894),
    8: (346860150644700, 1532247146604636, 161943939423280),
    9: (1301798459308709880, 5811753079971551880, 547601957576517600),
    10: (6383405726993645784000, 28632855467501316224640, 2432759415312389538720),
}


@pytest.fixture(scope="session")
def relation():
    return load_relation()


@pytest.fixture(scope="session")
def genus1():
    return genus1_load()


@pytest.fixture(scope="session")
def table10(genus1):
    return solve_up_to(10, genus1)
