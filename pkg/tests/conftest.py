import math
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from rhsinv.jones import JonesGrid, MilnorData, SlopeClass


def borromean(N=3, mu=1):
    """Borromean rings on components 0, 1, 2, split from any further unknots."""
    return MilnorData(N, triples={(0, 1, 2): mu}, phi1_singles={j: 0 for j in range(N)})


def normalised_grid(N, cls, order, raw):
    """Grid from arbitrary entries, forced to d00 = 1, d01 = 0 and J(1, ..., 1) = 1.

    The d_{0,t} column absorbs the color-one total at each order t.
    """
    zero = (0,) * N
    e = {k: v for k, v in raw.items() if k[:2] not in ((0, 0), (0, 1))}
    e[(0, 0, zero)] = Fraction(1)
    totals = {}
    for (m, n, _), v in e.items():
        if (m, n) != (0, 0):
            totals[n + 2 * m] = totals.get(n + 2 * m, 0) + v
    for t, v in totals.items():
        if 2 <= t <= order:
            e[(0, t, zero)] = e.get((0, t, zero), 0) - v
    return JonesGrid(N, cls, order, e)


@st.composite
def grids(draw, N, cls, order, max_entries=10):
    """Random grids inside the slope bound and the m + n <= order window."""
    cls = SlopeClass.parse(cls)
    sig = cls.sigma
    raw = {}
    for _ in range(draw(st.integers(0, max_entries))):
        m = draw(st.integers(0, math.floor(order / (1 - sig))))
        lo = math.ceil(-sig * m)
        if lo > order - m:
            continue
        n = draw(st.integers(lo, order - m))
        parts = draw(st.lists(st.integers(0, N - 1), min_size=m, max_size=m)) if N else []
        multi = [0] * N
        for j in parts:
            multi[j] += 1
        num = draw(st.integers(-6, 6))
        den = draw(st.integers(1, 5))
        raw[(m, n, tuple(multi))] = Fraction(num, den)
    return normalised_grid(N, cls, order, raw)


@st.composite
def slopes(draw, pmax=7, qmax=5):
    """Coprime (p, q) with p != 0 and q != 0."""
    p = draw(st.integers(-pmax, pmax).filter(lambda x: x != 0))
    q = draw(st.integers(-qmax, qmax).filter(lambda x: x != 0 and math.gcd(p, x) == 1))
    return (p, q)


@pytest.fixture
def bor():
    return borromean()
