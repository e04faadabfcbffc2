"""Independent reference implementations used only by the tests."""

import itertools
import math

import mpmath


def t_two_tailed(t, df):
    """1 - 2 * integral of the t density over [0, |t|], by mpmath quadrature at 40 digits."""
    with mpmath.workdps(40):
        nu = mpmath.mpf(df)
        c = mpmath.gamma((nu + 1) / 2) / (mpmath.sqrt(nu * mpmath.pi) * mpmath.gamma(nu / 2))
        inner = mpmath.quad(lambda x: c * (1 + x * x / nu) ** (-(nu + 1) / 2), [0, abs(t)])
        return float(1 - 2 * inner)


def kendall_pairs(x, y):
    """O(n^2) tau-b by explicit pair enumeration."""
    c = d = tx = ty = 0
    for i, j in itertools.combinations(range(len(x)), 2):
        dx = (x[i] > x[j]) - (x[i] < x[j])
        dy = (y[i] > y[j]) - (y[i] < y[j])
        if dx and dy:
            if dx == dy:
                c += 1
            else:
                d += 1
        elif dx and not dy:
            ty += 1
        elif dy and not dx:
            tx += 1
    denom = math.sqrt((c + d + ty) * (c + d + tx))
    return None if denom == 0 else (c - d) / denom


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def ter_exhaustive(hyp, ref):
    """Minimum over every sequence of block shifts of (#shifts + edit distance).

    Breadth-first over shift counts; only practical for very short inputs.
    """
    hyp, ref = tuple(hyp), tuple(ref)
    if not ref:
        raise ValueError("empty reference")
    best = levenshtein(hyp, ref)
    frontier, seen, shifts = {hyp}, {hyp}, 0
    while frontier and shifts + 1 < best:
        shifts += 1
        nxt = set()
        for h in frontier:
            n = len(h)
            for i in range(n):
                for j in range(i + 1, n + 1):
                    block, rest = h[i:j], h[:i] + h[j:]
                    for k in range(len(rest) + 1):
                        if k == i:
                            continue
                        cand = rest[:k] + block + rest[k:]
                        if cand not in seen:
                            seen.add(cand)
                            nxt.add(cand)
                            best = min(best, shifts + levenshtein(cand, ref))
        frontier = nxt
    return best / len(ref)


def char_ngrams(s, n):
    s = "".join(s.split())
    out = {}
    for i in range(len(s) - n + 1):
        g = s[i : i + n]
        out[g] = out.get(g, 0) + 1
    return out
