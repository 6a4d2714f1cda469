"""Locate a logistic parameter whose critical orbit is recurrent.

The target is the Fibonacci combinatorics: kneading map Q(k) = k - 2, so the
cutting times are 1, 2, 3, 5, 8, ... and the critical orbit returns closest
to 1/2 at those times.  The kneading sequence is generated from Q by the
cutting-time recursion and the parameter a of x -> a x (1 - x) is found by
bisection in the unimodal (parity-lexicographic) order, in which the
kneading sequence is monotone in a.

Output: the parameter to 17 significant digits plus the closest-return table
that justifies it.  Run with ``python scripts/find_recurrent_parameter.py``.
"""
import mpmath as mp

mp.mp.dps = 120
HALF = mp.mpf(1) / 2


def fibonacci_kneading(length):
    """Symbols e_1 e_2 ... of f(c) (1 = right of c) for kneading map k - 2."""
    e = [1]
    cut = [1]
    k = 1
    while len(e) < length:
        q = max(k - 2, 0)
        block = e[: cut[q] - 1] + [1 - e[cut[q] - 1]]
        e.extend(block)
        cut.append(cut[-1] + cut[q])
        k += 1
    return e[:length], cut


def itinerary(a, length):
    x = a / 4
    out = []
    for _ in range(length):
        out.append(1 if x > HALF else 0)
        x = a * x * (1 - x)
    return out


def unimodal_less(u, v):
    """u < v in the order induced by the orientation of f (decreasing on 1)."""
    flips = 0
    for s, t in zip(u, v):
        if s != t:
            return (s < t) if flips % 2 == 0 else (s > t)
        flips += s
    return False


def closest_returns(a, n):
    x, best, out = HALF, mp.inf, []
    for k in range(1, n + 1):
        x = a * x * (1 - x)
        gap = abs(x - HALF)
        if gap < best:
            best = gap
            out.append((k, gap))
    return out


def find_parameter(length=377, steps=300):
    target, _ = fibonacci_kneading(length)
    lo, hi = mp.mpf("3.5"), mp.mpf(4)
    for _ in range(steps):
        mid = (lo + hi) / 2
        it = itinerary(mid, length)
        if it == target:
            break
        if unimodal_less(it, target):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def main():
    a = find_parameter()
    print(f"parameter a = {mp.nstr(a, 17)}")
    print(f"equivalent 1 - b x^2 parameter b = {mp.nstr(a * (a - 2) / 4, 17)}")
    for k, gap in closest_returns(a, 10**4)[:16]:
        print(f"  n = {k:5d}  |f^n(c) - c| = {mp.nstr(gap, 6)}")
    return a


if __name__ == "__main__":
    main()
