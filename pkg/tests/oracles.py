"""Reference implementations that share no code with the package.

Everything here is deliberately naive: bitwise shift-and-add field
multiplication, Fermat inversion, textbook Gaussian elimination and plain
enumeration.  Slow, but easy to check by eye.
"""

from __future__ import annotations

import itertools


def gf_mul(a: int, b: int, poly: int, w: int) -> int:
    """Russian-peasant multiplication in GF(2)[x]/poly."""
    out = 0
    top = 1 << w
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return out


def gf_pow(a: int, e: int, poly: int, w: int) -> int:
    out = 1
    for _ in range(e):
        out = gf_mul(out, a, poly, w)
    return out


def gf_inv(a: int, poly: int, w: int) -> int:
    if a == 0:
        raise ZeroDivisionError
    return gf_pow(a, (1 << w) - 2, poly, w)


def multiplicative_order(a: int, poly: int, w: int) -> int:
    x, k = a, 1
    while x != 1:
        x = gf_mul(x, a, poly, w)
        k += 1
    return k


class Field:
    """Plain-int field helper bound to one (w, poly)."""

    def __init__(self, w: int, poly: int):
        self.w, self.poly, self.q = w, poly, 1 << w

    def mul(self, a, b):
        return gf_mul(a, b, self.poly, self.w)

    def inv(self, a):
        return gf_inv(a, self.poly, self.w)

    def alpha(self, e):
        return gf_pow(2, e % (self.q - 1), self.poly, self.w)

    def dot(self, u, v):
        acc = 0
        for a, b in zip(u, v):
            acc ^= self.mul(a, b)
        return acc


def parity_check(F: Field, n: int, k: int, b: int = 1):
    """``H[i][j] = alpha^(j (b+i))`` for the length-n (shortened) RS code."""
    return [[F.alpha(j * (b + i)) for j in range(n)] for i in range(n - k)]


def syndrome(F: Field, H, v):
    return [F.dot(row, v) for row in H]


def rref(F: Field, rows):
    A = [list(r) for r in rows]
    piv, r = [], 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = F.inv(A[r][c])
        A[r] = [F.mul(inv, x) for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x ^ F.mul(f, y) for x, y in zip(A[i], A[r])]
        piv.append(c)
        r += 1
    return A, piv


def rank(F: Field, rows) -> int:
    return len(rref(F, rows)[1])


def nullspace(F: Field, H, n: int):
    R, piv = rref(F, H)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for row, p in zip(R, piv):
            v[p] = row[f]  # characteristic 2: -x == x
        basis.append(v)
    return basis


def all_codewords(F: Field, H, n: int):
    basis = nullspace(F, H, n)
    for coeffs in itertools.product(range(F.q), repeat=len(basis)):
        cw = [0] * n
        for c, b in zip(coeffs, basis):
            if c:
                cw = [x ^ F.mul(c, y) for x, y in zip(cw, b)]
        yield cw


def coset_patterns(F: Field, H, n: int, s, t: int) -> set:
    """Every e with wt(e) <= t and e H^T = s, by walking the whole coset."""
    # one particular solution of H e = s, then e + every codeword
    R, piv = rref(F, [list(row) + [si] for row, si in zip(H, s)])
    e0 = [0] * n
    for row, p in zip(R, piv):
        if p == n:
            return set()
        e0[p] = row[n]
    out = set()
    for cw in all_codewords(F, H, n):
        e = tuple(x ^ y for x, y in zip(e0, cw))
        if sum(1 for x in e if x) <= t:
            out.add(e)
    return out


def min_weight_solution_by_enumeration(F: Field, H, n: int, s, max_wt: int):
    """Smallest-weight e with e H^T = s, trying supports in order of size."""
    for wt in range(max_wt + 1):
        for supp in itertools.combinations(range(n), wt):
            for vals in itertools.product(range(1, F.q), repeat=wt):
                e = [0] * n
                for j, v in zip(supp, vals):
                    e[j] = v
                if syndrome(F, H, e) == list(s):
                    return e
    return None


class ExtOracle:
    """GF(q^c) as tuples of c base symbols, lowest degree first, mod a monic poly."""

    def __init__(self, F: Field, modulus):
        self.F, self.mod = F, tuple(modulus)
        self.c = len(modulus) - 1

    def mul(self, a, b):
        F, c = self.F, self.c
        prod = [0] * (2 * c - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] ^= F.mul(x, y)
        for d in range(len(prod) - 1, c - 1, -1):
            lead = prod[d]
            if lead:
                for i, m in enumerate(self.mod):
                    prod[d - c + i] ^= F.mul(lead, m)
        return tuple(prod[:c])

    def add(self, a, b):
        return tuple(x ^ y for x, y in zip(a, b))

    def embed(self, x):
        return (x,) + (0,) * (self.c - 1)

    def evaluate(self, v, r):
        """``sum_j v_j r^j``."""
        acc, p = (0,) * self.c, self.embed(1)
        for vj in v:
            acc = self.add(acc, self.mul(self.embed(vj), p))
            p = self.mul(p, r)
        return acc
