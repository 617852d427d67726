"""Multivariate gcd and exact division.

The gcd uses primitive-part recursion with a subresultant polynomial
remainder sequence on the last occurring variable, which is plenty at desk
scale. Outputs are normalized monic under graded lex so that repeated runs
are bit-identical.
"""

from __future__ import annotations

from .poly import NotDivisible, Polynomial, monic


def divexact(f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact quotient f/g; raises NotDivisible if the division has a remainder."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return f
    f._check(g)
    universe = f.universe
    ge, gc = g.leading()
    quotient: dict = {}
    rem = f
    while rem.terms:
        re_, rc = rem.leading()
        qe = tuple(a - b for a, b in zip(re_, ge))
        if any(x < 0 for x in qe):
            raise NotDivisible("leading monomial not divisible")
        qc = rc / gc
        quotient[qe] = qc
        rem = rem - Polynomial(universe, {qe: qc}) * g
    return Polynomial(universe, quotient)


def divides(g: Polynomial, f: Polynomial) -> bool:
    try:
        divexact(f, g)
        return True
    except NotDivisible:
        return False


# -- univariate view helpers -------------------------------------------


def _coeffs_in(p: Polynomial, idx: int) -> dict[int, Polynomial]:
    """View p as a polynomial in variable idx with polynomial coefficients."""
    out: dict[int, dict] = {}
    for e, c in p.terms.items():
        d = e[idx]
        ne = e[:idx] + (0,) + e[idx + 1 :]
        bucket = out.setdefault(d, {})
        s = bucket.get(ne)
        bucket[ne] = c if s is None else s + c
    return {d: Polynomial(p.universe, t) for d, t in out.items() if any(t.values())}


def _from_coeffs(coeffs: dict[int, Polynomial], idx: int, universe) -> Polynomial:
    total = Polynomial.zero(universe)
    for d, c in coeffs.items():
        if c.is_zero():
            continue
        shift = {}
        for e, k in c.terms.items():
            shift[e[:idx] + (e[idx] + d,) + e[idx + 1 :]] = k
        total = total + Polynomial(universe, shift)
    return total


def _deg(coeffs: dict[int, Polynomial]) -> int:
    return max(coeffs) if coeffs else -1


def _content_in(p: Polynomial, idx: int) -> Polynomial:
    coeffs = _coeffs_in(p, idx)
    content = Polynomial.zero(p.universe)
    for c in coeffs.values():
        content = gcd_multivariate(content, c)
    return content


def _pseudo_rem(a: dict, b: dict, universe) -> dict:
    """Pseudo-remainder of a by b, both univariate views in the same variable."""
    da, db = _deg(a), _deg(b)
    lb = b[db]
    r = dict(a)
    e = da - db + 1
    while r and _deg(r) >= db:
        dr = _deg(r)
        lr = r[dr]
        new: dict[int, Polynomial] = {}
        for d, c in r.items():
            new[d] = c * lb
        for d, c in b.items():
            shifted = d + dr - db
            t = lr * c
            s = new.get(shifted)
            new[shifted] = -t if s is None else s - t
        r = {d: c for d, c in new.items() if not c.is_zero()}
        e -= 1
    for _ in range(e):
        r = {d: c * lb for d, c in r.items()}
    return r


def gcd_multivariate(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd dividing both arguments with exact quotients.

    gcd(p, 0) is the normalized p; constants are units of the coefficient
    field, so any nonzero constant input forces gcd 1.
    """
    if a.is_zero():
        return monic(b)
    if b.is_zero():
        return monic(a)
    a._check(b)
    universe = a.universe
    sup = a.support_vars() | b.support_vars()
    if not sup:
        return Polynomial.constant(universe, 1)
    # recurse on the last occurring variable in universe order
    idx = max(universe.index(name) for name in sup)
    ca = _content_in(a, idx)
    cb = _content_in(b, idx)
    content = gcd_multivariate(ca, cb)
    if a.degree_in(universe.names[idx]) == 0 or b.degree_in(universe.names[idx]) == 0:
        return monic(content)
    pa = _coeffs_in(divexact(a, ca), idx)
    pb = _coeffs_in(divexact(b, cb), idx)
    if _deg(pa) < _deg(pb):
        pa, pb = pb, pa
    one = Polynomial.constant(universe, 1)
    g = one
    h = one
    while True:
        delta = _deg(pa) - _deg(pb)
        r = _pseudo_rem(pa, pb, universe)
        if not r:
            result = _from_coeffs(pb, idx, universe)
            result = divexact(result, _content_in(result, idx))
            break
        if _deg(r) == 0:
            result = one
            break
        pa = pb
        denom = g * h ** delta
        pb = {d: divexact(c, denom) for d, c in r.items()}
        g = pa[_deg(pa)]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = divexact(g ** delta, h ** (delta - 1))
    return monic(content * result)
