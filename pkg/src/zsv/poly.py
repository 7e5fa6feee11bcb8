"""Dense univariate polynomials over the rationals with Sturm root isolation.

Coefficient lists run from the constant term upward.
"""

import math
from fractions import Fraction


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p):
    return len(trim(p)) - 1


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def add(p, q):
    out = [0] * max(len(p), len(q))
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return trim(out)


def scale(p, c):
    return trim([c * a for a in p])


def mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def power(p, k):
    out = [1]
    for _ in range(k):
        out = mul(out, p)
    return out


def derivative(p):
    return trim([i * c for i, c in enumerate(p)][1:])


def divmod_poly(a, b):
    a = [Fraction(c) for c in trim(a)]
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lead = Fraction(b[-1])
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] -= c * bc
        a = trim(a)
    return trim(q), a


def monic(p):
    p = trim(p)
    if not p:
        return p
    lead = Fraction(p[-1])
    return [Fraction(c) / lead for c in p]


def gcd(a, b):
    a, b = trim(a), trim(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def squarefree_factors(p):
    """Yun's algorithm: list of (factor, multiplicity) with p = c * prod f^k."""
    p = trim(p)
    if degree(p) < 1:
        return []
    out = []
    dp = derivative(p)
    a = gcd(p, dp)
    b = divmod_poly(p, a)[0]
    c = divmod_poly(dp, a)[0]
    d = add(c, scale(derivative(b), -1))
    k = 1
    while degree(b) >= 1:
        f = gcd(b, d)
        if degree(f) >= 1:
            out.append((f, k))
        b = divmod_poly(b, f)[0]
        c = divmod_poly(d, f)[0]
        d = add(c, scale(derivative(b), -1))
        k += 1
    return out


def squarefree_part(p):
    p = trim(p)
    if degree(p) < 1:
        return p
    return monic(divmod_poly(p, gcd(p, derivative(p)))[0])


def sturm_chain(p):
    p = trim(p)
    chain = [p, derivative(p)]
    while chain[-1]:
        r = divmod_poly(chain[-2], chain[-1])[1]
        chain.append(scale(r, -1))
    return [c for c in chain if c]


def _sign(x):
    return (x > 0) - (x < 0)


def _variations(signs):
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def variations_at(chain, x):
    if x == math.inf:
        return _variations([_sign(c[-1]) for c in chain])
    return _variations([_sign(evaluate(c, x)) for c in chain])


def count_roots(chain, a, b):
    """Distinct real roots in (a, b] of the square-free head of chain."""
    return variations_at(chain, a) - variations_at(chain, b)


def root_bound(p):
    p = trim(p)
    lead = abs(Fraction(p[-1]))
    return 1 + max((abs(Fraction(c)) / lead for c in p[:-1]), default=0)


def isolate_roots(p, lo, hi):
    """Disjoint intervals (a, b) each holding exactly one distinct root in (lo, hi).

    A root hit exactly by bisection is returned as the degenerate interval
    (r, r). Endpoints are rationals; hi may be math.inf.
    """
    f = squarefree_part(p)
    if degree(f) < 1:
        return []
    lo = Fraction(lo)
    if hi == math.inf:
        hi = Fraction(max(root_bound(f), lo + 1)) + 1
    hi = Fraction(hi)
    chain = sturm_chain(f)
    out = []
    # roots exactly at hi are outside the open interval
    stack = [(lo, hi, count_roots(chain, lo, hi) - (1 if evaluate(f, hi) == 0 else 0))]
    while stack:
        a, b, k = stack.pop()
        if k == 0:
            continue
        if k == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        left = count_roots(chain, a, mid)
        right = k - left
        if evaluate(f, mid) == 0:
            out.append((mid, mid))
            left -= 1
        stack.append((mid, b, right))
        stack.append((a, mid, left))
    out.sort()
    return [_tighten(f, a, b) for a, b in out]


def _tighten(f, a, b):
    # make sure the interval is half-open (a, b] with the root strictly inside
    # or exactly at b so sign bisection works
    if a == b:
        return (a, b)
    if evaluate(f, b) == 0:
        return (b, b)
    return (a, b)


def refine(p, interval, tol):
    """Bisect an isolating interval (a, b] down to width tol.

    Only the sign at b is trusted, so a may itself be a root lying outside
    the interval.
    """
    a, b = interval
    if a == b:
        return (a, b)
    f = squarefree_part(p)
    fb = _sign(evaluate(f, b))
    if fb == 0:
        return (b, b)
    tol = Fraction(tol)
    while b - a > tol:
        mid = (a + b) / 2
        fm = _sign(evaluate(f, mid))
        if fm == 0:
            return (mid, mid)
        if fm == fb:
            b = mid
        else:
            a = mid
    return (a, b)


def rational_root_near(p, interval, max_den=10**6):
    """Try to recognise a small-denominator rational root inside an interval."""
    a, b = interval
    if a == b:
        return a if evaluate(p, a) == 0 else None
    center = (a + b) / 2
    for den in (10, 100, 1000, 10**4, max_den):
        r = center.limit_denominator(den)
        if a <= r <= b and evaluate(p, r) == 0:
            return r
    return None


def _raise_left(f, interval, floor):
    # shrink (a, b] from the left until a > floor, keeping the root inside
    a, b = interval
    while a <= floor:
        mid = (a + b) / 2
        if evaluate(f, mid) == 0:
            return mid, mid
        if _sign(evaluate(f, mid)) == _sign(evaluate(f, b)):
            b = mid
        else:
            a = mid
    return a, b


def gap_points(p, lo=0, hi=math.inf):
    """One rational point inside each sign-constant gap between the distinct
    real roots of p on (lo, hi)."""
    f = squarefree_part(p)
    lo = Fraction(lo)
    roots = isolate_roots(p, lo, hi) if degree(f) >= 1 else []
    points = []
    floor = lo
    for a, b in roots:
        if a == b:
            r = a
            if r > floor:
                points.append((floor + r) / 2)
        else:
            a, b = _raise_left(f, (a, b), floor)
            if a == b:
                r = a
                points.append((floor + r) / 2)
            else:
                points.append(a)
                r = None
        if r is not None:
            floor = r
        elif evaluate(f, b) == 0:
            floor = b
        else:
            # the root sits in (a, b); b is already past it
            points.append(b)
            floor = b
    if hi == math.inf:
        points.append(floor + 1 if floor >= 1 else floor * 2 + 1)
    elif floor < hi:
        points.append((floor + Fraction(hi)) / 2)
    out = []
    for x in points:
        if x > lo and (hi == math.inf or x < hi) and x not in out:
            out.append(x)
    return out


def negative_somewhere(p, lo=0, hi=math.inf):
    """Exact test for whether p takes a negative value on the open interval (lo, hi).

    Returns (bool, witness) where witness is a rational point with p < 0.
    """
    p = trim(p)
    if not p:
        return False, None
    for x in gap_points(p, lo, hi):
        if evaluate(p, x) < 0:
            return True, x
    return False, None
