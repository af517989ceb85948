"""Generate src/rhsinv/data/trefoil.json.

Uses the cyclotomic form of the colored Jones polynomial of the right-handed
trefoil, normalised by the unknot,

    J_alpha / [alpha] = sum_{n>=0} q^n prod_{j=1}^{n} 4 e^{2jh} (sinh^2(jh) - sinh^2(u)),

with q = e^{2h}, u = alpha h.  The grid stores the coefficients of
u^{2m} h^n in (sinh u/u) (h/sinh h) J_alpha/[alpha].  The n-th summand has
total degree >= 2n in (u, h), so n <= order summands fill the window
m + n <= order.

Run:  python scripts/gen_trefoil_fixture.py [order]
"""

import json
import sys
from fractions import Fraction
from math import factorial
from pathlib import Path


def mul(a, b, limit):
    """Product of {(deg_u, deg_h): c} series, dropping deg_u + 2 deg_h > limit."""
    out = {}
    for (i1, j1), x in a.items():
        for (i2, j2), y in b.items():
            i, j = i1 + i2, j1 + j2
            if i + 2 * j <= limit:
                out[(i, j)] = out.get((i, j), Fraction(0)) + x * y
    return out


def add(a, b, s=1):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + s * v
    return out


def exp_h(c, limit):
    return {(0, k): Fraction(c) ** k / factorial(k) for k in range(limit // 2 + 1)}


def sinh2(var, c, limit):
    """sinh^2(c x) with x = u (var 0) or h (var 1)."""
    out = {}
    for k in range(1, limit + 1):
        key = (2 * k, 0) if var == 0 else (0, 2 * k)
        if key[0] + 2 * key[1] <= limit:
            out[key] = Fraction(2 * c) ** (2 * k) / (2 * factorial(2 * k))
    return out


def sinhc(var, limit, inverse=False):
    """sinh(x)/x, or its reciprocal, in x = u or h."""
    c = [Fraction(1, factorial(2 * k + 1)) for k in range(limit + 1)]
    if inverse:
        r = [Fraction(0)] * len(c)
        r[0] = Fraction(1)
        for n in range(1, len(c)):
            r[n] = -sum((c[k] * r[n - k] for k in range(1, n + 1)), Fraction(0))
        c = r
    out = {}
    for k, v in enumerate(c):
        key = (2 * k, 0) if var == 0 else (0, 2 * k)
        if key[0] + 2 * key[1] <= limit:
            out[key] = v
    return out


def trefoil_grid(order):
    limit = 2 * order  # weight of u^a h^b is a/2 + b
    J = {(0, 0): Fraction(1)}
    prod = {(0, 0): Fraction(1)}
    for n in range(1, order + 1):
        factor = mul(exp_h(2 * n, limit), add(sinh2(1, n, limit), sinh2(0, 1, limit), -1), limit)
        prod = mul(prod, {k: 4 * v for k, v in factor.items()}, limit)
        J = add(J, mul(exp_h(2 * n, limit), prod, limit))
    G = mul(mul(sinhc(0, limit), sinhc(1, limit, inverse=True), limit), J, limit)
    entries = []
    for (a, b), v in sorted(G.items()):
        assert a % 2 == 0
        m = a // 2
        if v and m + b <= order:
            entries.append({"m": m, "n": b, "multi": [m], "value": str(v)})
    return {"N": 1, "class": "BL", "order": order, "entries": entries}


def main():
    order = int(sys.argv[1]) if len(sys.argv) > 1 else 8
    doc = trefoil_grid(order)
    out = Path(__file__).resolve().parent.parent / "src" / "rhsinv" / "data" / "trefoil.json"
    out.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {len(doc['entries'])} entries to {out}")


if __name__ == "__main__":
    main()
