"""Sparse multivariate polynomials over a coefficient field.

A polynomial is a dict ``{exponent_tuple: coefficient}`` without zero
coefficients.  The monomial order is graded reverse lexicographic with the
declared variable order.  ``PolyAlgebra`` owns the arithmetic, the division
algorithm and Buchberger's algorithm (optionally tracking how every basis
element is combined from the inputs).
"""

from __future__ import annotations

from itertools import combinations


def grevlex_key(m):
    return (sum(m), tuple(-e for e in reversed(m)))


def divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


class PolyAlgebra:
    def __init__(self, field, nvars):
        self.K = field
        self.n = nvars
        self.unit_mono = (0,) * nvars

    # -- arithmetic ----------------------------------------------------
    def const(self, c):
        return {} if self.K.is_zero(c) else {self.unit_mono: c}

    def var(self, i):
        m = [0] * self.n
        m[i] = 1
        return {tuple(m): self.K.one}

    def add(self, f, g):
        K = self.K
        out = dict(f)
        for m, c in g.items():
            if m in out:
                s = K.add(out[m], c)
                if K.is_zero(s):
                    del out[m]
                else:
                    out[m] = s
            else:
                out[m] = c
        return out

    def neg(self, f):
        return {m: self.K.neg(c) for m, c in f.items()}

    def sub(self, f, g):
        return self.add(f, self.neg(g))

    def scale(self, f, c, mono=None):
        K = self.K
        if K.is_zero(c):
            return {}
        if mono is None:
            return {m: K.mul(a, c) for m, a in f.items()}
        return {mono_mul(m, mono): K.mul(a, c) for m, a in f.items()}

    def mul(self, f, g):
        K = self.K
        out = {}
        for m1, c1 in f.items():
            for m2, c2 in g.items():
                m = mono_mul(m1, m2)
                c = K.mul(c1, c2)
                if m in out:
                    s = K.add(out[m], c)
                    if K.is_zero(s):
                        del out[m]
                    else:
                        out[m] = s
                else:
                    out[m] = c
        return out

    def lead(self, f):
        m = max(f, key=grevlex_key)
        return m, f[m]

    def monic(self, f):
        if not f:
            return f
        _, c = self.lead(f)
        return self.scale(f, self.K.inv(c))

    def is_const(self, f):
        return not f or (len(f) == 1 and self.unit_mono in f)

    def freeze(self, f):
        K = self.K
        return tuple(sorted(((m, c) for m, c in f.items() if not K.is_zero(c)),
                            key=lambda mc: grevlex_key(mc[0]), reverse=True))

    # -- division ------------------------------------------------------
    def reduce(self, f, G, quotients=False):
        """Full reduction of ``f`` by the list ``G``.

        Returns ``(remainder, q)`` with ``f = sum(q[k] * G[k]) + remainder``;
        ``q`` is None unless requested.
        """
        K = self.K
        leads = [self.lead(g) for g in G]
        invs = [K.inv(c) for _, c in leads]
        p = dict(f)
        r = {}
        q = [{} for _ in G] if quotients else None
        while p:
            m = max(p, key=grevlex_key)
            c = p[m]
            for k, (lm, _) in enumerate(leads):
                if divides(lm, m):
                    shift = mono_div(m, lm)
                    coef = K.mul(c, invs[k])
                    for gm, gc in G[k].items():
                        mm = mono_mul(gm, shift)
                        v = K.sub(p.get(mm, K.zero), K.mul(coef, gc))
                        if K.is_zero(v):
                            p.pop(mm, None)
                        else:
                            p[mm] = v
                    if q is not None:
                        q[k] = self.add(q[k], {shift: coef})
                    break
            else:
                r[m] = c
                del p[m]
        return r, q

    # -- Groebner bases ------------------------------------------------
    def groebner(self, F, track=False):
        """Reduced Groebner basis of the ideal generated by ``F``.

        With ``track=True`` also returns, for every basis element, the list of
        cofactors expressing it as a combination of the inputs.
        """
        m = len(F)
        G, cof = [], []
        for idx, f in enumerate(F):
            if f:
                G.append(dict(f))
                if track:
                    row = [{} for _ in range(m)]
                    row[idx] = self.const(self.K.one)
                    cof.append(row)
        if not G:
            return ([], []) if track else []

        def combine(rows, coeffs):
            out = [{} for _ in range(m)]
            for row, (mono, c) in zip(rows, coeffs):
                for i in range(m):
                    if row[i]:
                        out[i] = self.add(out[i], self.scale(row[i], c, mono))
            return out

        pairs = set(combinations(range(len(G)), 2))
        while pairs:
            i, j = min(pairs, key=lambda ij: (grevlex_key(mono_lcm(self.lead(G[ij[0]])[0], self.lead(G[ij[1]])[0])), ij))
            pairs.discard((i, j))
            (mi, ci), (mj, cj) = self.lead(G[i]), self.lead(G[j])
            lcm = mono_lcm(mi, mj)
            if lcm == mono_mul(mi, mj):
                continue
            if any(
                k not in (i, j)
                and divides(self.lead(G[k])[0], lcm)
                and (min(i, k), max(i, k)) not in pairs
                and (min(j, k), max(j, k)) not in pairs
                for k in range(len(G))
            ):
                continue
            ti, tj = mono_div(lcm, mi), mono_div(lcm, mj)
            ai, aj = self.K.inv(ci), self.K.neg(self.K.inv(cj))
            s = self.add(self.scale(G[i], ai, ti), self.scale(G[j], aj, tj))
            r, q = self.reduce(s, G, quotients=track)
            if not r:
                continue
            if track:
                row = combine([cof[i], cof[j]], [(ti, ai), (tj, aj)])
                sub = [{} for _ in range(m)]
                for k, qk in enumerate(q):
                    if qk:
                        for i2 in range(m):
                            if cof[k][i2]:
                                sub[i2] = self.add(sub[i2], self.mul(qk, cof[k][i2]))
                row = [self.sub(row[i2], sub[i2]) for i2 in range(m)]
                cof.append(row)
            G.append(r)
            new = len(G) - 1
            if self.is_const(r):
                G, cof = [r], ([cof[-1]] if track else [])
                break
            pairs.update((k, new) for k in range(new))
        return self._interreduce(G, cof, track)

    def _interreduce(self, G, cof, track):
        K = self.K
        m = len(cof[0]) if track and cof else 0
        # drop elements whose leading monomial is divisible by another's
        keep = []
        for i, g in enumerate(G):
            lm = self.lead(g)[0]
            dominated = False
            for j, h in enumerate(G):
                if i == j:
                    continue
                lh = self.lead(h)[0]
                if divides(lh, lm) and (lh != lm or j < i):
                    dominated = True
                    break
            if not dominated:
                keep.append(i)
        G = [G[i] for i in keep]
        cof = [cof[i] for i in keep] if track else []
        out, out_cof = [], []
        for i, g in enumerate(G):
            others = G[:i] + G[i + 1:]
            r, q = self.reduce(g, others, quotients=track) if others else (dict(g), [])
            c = K.inv(self.lead(r)[1])
            out.append(self.scale(r, c))
            if track:
                row = list(cof[i])
                other_cof = cof[:i] + cof[i + 1:]
                for k, qk in enumerate(q or []):
                    if qk:
                        for i2 in range(m):
                            if other_cof[k][i2]:
                                row[i2] = self.sub(row[i2], self.mul(qk, other_cof[k][i2]))
                out_cof.append([self.scale(x, c) for x in row])
        order = sorted(range(len(out)), key=lambda k: grevlex_key(self.lead(out[k])[0]))
        G = [out[k] for k in order]
        if track:
            return G, [out_cof[k] for k in order]
        return G

    # -- dimension -----------------------------------------------------
    def staircase_dimension(self, G):
        """Krull dimension of ``K[x]/(G)`` for a Groebner basis ``G`` (-1 if unit)."""
        leads = [self.lead(g)[0] for g in G if g]
        if any(sum(m) == 0 for m in leads):
            return -1
        supports = [frozenset(i for i, e in enumerate(m) if e) for m in leads]
        for size in range(self.n, -1, -1):
            for S in combinations(range(self.n), size):
                S = frozenset(S)
                if not any(sup <= S for sup in supports):
                    return size
        return 0

    def standard_monomials(self, G, limit=100000):
        """All monomials outside the leading ideal; requires a zero-dimensional quotient."""
        leads = [self.lead(g)[0] for g in G if g]
        found, frontier = [], [self.unit_mono]
        seen = {self.unit_mono}
        while frontier:
            m = frontier.pop()
            if any(divides(lm, m) for lm in leads):
                continue
            found.append(m)
            if len(found) > limit:
                raise ValueError("quotient is not finite-dimensional")
            for i in range(self.n):
                nxt = tuple(e + (1 if k == i else 0) for k, e in enumerate(m))
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return sorted(found, key=grevlex_key)
