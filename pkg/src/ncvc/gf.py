"""Table-driven arithmetic over GF(2^w) and a small tower extension GF(q^c).

Base-field elements are plain ints in ``[0, q)``.  Extension elements are
tuples of ``c`` base-field coefficients, lowest degree first.  Both fields
also expose vectorised numpy versions of their operations; the decoders and
the simulator lean on those.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# Primitive polynomials, x^w term included.
DEFAULT_PRIMITIVE_POLYS = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


def clmul_reduce(a: int, b: int, poly: int, w: int) -> int:
    """Carry-less multiply then reduce modulo ``poly``; no tables involved."""
    prod = 0
    while b:
        if b & 1:
            prod ^= a
        a <<= 1
        b >>= 1
    for bit in range(prod.bit_length() - 1, w - 1, -1):
        if prod >> bit & 1:
            prod ^= poly << (bit - w)
    return prod


class GF:
    """GF(2^w) with log/antilog tables.

    The vectorised ``vmul`` avoids branching on zero: ``log[0]`` is a
    sentinel large enough that any sum involving it indexes the zero-padded
    tail of ``exp``.
    """

    def __init__(self, w: int = 8, primitive_poly: int | None = None):
        if primitive_poly is None:
            if w not in DEFAULT_PRIMITIVE_POLYS:
                raise ValueError(f"no default primitive polynomial for w={w}")
            primitive_poly = DEFAULT_PRIMITIVE_POLYS[w]
        if primitive_poly >> w != 1:
            raise ValueError("primitive_poly must have degree exactly w")
        self.w = w
        self.q = 1 << w
        self.order = self.q - 1
        self.primitive_poly = primitive_poly

        q, order = self.q, self.order
        exp = [0] * (2 * order)
        log = [0] * q
        x = 1
        for i in range(order):
            if i and x == 1:
                raise ValueError(f"polynomial {primitive_poly:#x} is not primitive (cycle length {i})")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & q:
                x ^= primitive_poly
        if x != 1:
            raise ValueError(f"polynomial {primitive_poly:#x} is not primitive")
        exp[order:] = exp[:order]
        self._exp = exp
        self._log = log

        self.exp = np.zeros(4 * q, dtype=np.int64)
        self.exp[: 2 * order] = exp
        self.log = np.array(log, dtype=np.intp)
        self.log[0] = 2 * q - 1
        self.elements = np.arange(q, dtype=np.int64)
        self.exp.flags.writeable = False
        self.log.flags.writeable = False

    def __repr__(self):
        return f"GF(2^{self.w}, poly={self.primitive_poly:#x})"

    def __eq__(self, other):
        return isinstance(other, GF) and (self.w, self.primitive_poly) == (other.w, other.primitive_poly)

    def __hash__(self):
        return hash((self.w, self.primitive_poly))

    # scalar ops

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of GF(2^{self.w})")
        return a

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self._exp[self.order - self._log[a]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2^w)")
        if a == 0:
            return 0
        return self._exp[self._log[a] - self._log[b] + self.order]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                raise ValueError("0^0 is undefined")
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        return self._exp[(self._log[a] * e) % self.order]

    def alpha_pow(self, e: int) -> int:
        return self._exp[e % self.order]

    # vectorised ops

    def vmul(self, a, b) -> np.ndarray:
        return self.exp[self.log[a] + self.log[b]]

    def vinv(self, a) -> np.ndarray:
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self.exp[self.order - self.log[a]]

    def vpow(self, a, e: int) -> np.ndarray:
        a = np.asarray(a)
        out = self.exp[(self.log[a] * e) % self.order]
        if e == 0:
            return np.ones_like(out)
        return np.where(a == 0, 0, out)

    def dot(self, u, v) -> int:
        return int(np.bitwise_xor.reduce(self.vmul(u, v), axis=-1))

    def matvec(self, mat, vec) -> np.ndarray:
        """``mat @ vec`` over the field (``mat`` is rows x cols)."""
        return np.bitwise_xor.reduce(self.vmul(mat, np.asarray(vec)[None, :]), axis=1)

    def vecmat(self, vec, mat) -> np.ndarray:
        """``vec @ mat`` over the field."""
        return np.bitwise_xor.reduce(self.vmul(np.asarray(vec)[:, None], mat), axis=0)

    def poly_eval(self, coeffs, x) -> np.ndarray:
        """Evaluate a polynomial (lowest degree first) at scalar or array ``x``."""
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros_like(x)
        for c in reversed(list(coeffs)):
            acc = self.vmul(acc, x) ^ int(c)
        return acc

    def random(self, rng: np.random.Generator, size=None, nonzero: bool = False):
        low = 1 if nonzero else 0
        return rng.integers(low, self.q, size=size, dtype=np.int64)


@lru_cache(maxsize=None)
def get_field(w: int = 8, primitive_poly: int | None = None) -> GF:
    """Shared, immutable field instance per (w, poly)."""
    return GF(w, primitive_poly)


# --- polynomials over the base field (lists, lowest degree first) ----------


def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mod(gf: GF, a: list[int], f: list[int]) -> list[int]:
    a = list(a)
    df = len(f) - 1
    inv_lead = gf.inv(f[-1])
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i]
        if c:
            c = gf.mul(c, inv_lead)
            for j in range(df + 1):
                a[i - df + j] ^= gf.mul(c, f[j])
    return _trim(a[:df])


def _poly_mulmod(gf: GF, a: list[int], b: list[int], f: list[int]) -> list[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] ^= gf.mul(x, y)
    return _poly_mod(gf, prod, f)


def _poly_gcd(gf: GF, a: list[int], b: list[int]) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(gf, a, b)
    return a


def _frobenius_power(gf: GF, f: list[int], times: int) -> list[int]:
    """x^(q^times) mod f."""
    h = _poly_mod(gf, [0, 1], f)
    for _ in range(times * gf.w):
        h = _poly_mulmod(gf, h, h, f)
    return h


def _prime_factors(c: int) -> list[int]:
    out, p = [], 2
    while p * p <= c:
        if c % p == 0:
            out.append(p)
            while c % p == 0:
                c //= p
        p += 1
    if c > 1:
        out.append(c)
    return out


def is_irreducible(gf: GF, f) -> bool:
    """Rabin's test for a monic polynomial over GF(2^w)."""
    f = _trim(list(f))
    c = len(f) - 1
    if c < 1:
        return False
    if c == 1:
        return True
    if f[0] == 0:
        return False
    if _frobenius_power(gf, f, c) != _poly_mod(gf, [0, 1], f):
        return False
    for p in _prime_factors(c):
        h = _frobenius_power(gf, f, c // p)
        h = h + [0] * (2 - len(h)) if len(h) < 2 else list(h)
        h[1] ^= 1
        g = _poly_gcd(gf, _trim(h), f)
        if len(g) > 1:
            return False
    return True


def _batch_mulmod(gf: GF, A: np.ndarray, B: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Row-wise ``A*B mod (x^c + T)`` for (K, c) coefficient arrays."""
    K, c = T.shape
    prod = np.zeros((K, 2 * c - 1), dtype=np.int64)
    for i in range(c):
        for j in range(c):
            prod[:, i + j] ^= gf.vmul(A[:, i], B[:, j])
    for d in range(2 * c - 2, c - 1, -1):
        top = prod[:, d]
        for i in range(c):
            prod[:, d - c + i] ^= gf.vmul(top, T[:, i])
    return prod[:, :c]


def _irreducible_prefilter(gf: GF, T: np.ndarray) -> np.ndarray:
    """Mask of monic ``x^c + T`` that have no root and satisfy x^(q^c) = x.

    Both are necessary for irreducibility; survivors still go through
    ``is_irreducible``.
    """
    K, c = T.shape
    x = gf.elements[None, :]
    val = np.ones((K, gf.q), dtype=np.int64)
    for i in range(c - 1, -1, -1):
        val = gf.vmul(val, x) ^ T[:, i : i + 1]
    keep = np.all(val != 0, axis=1)
    T = T[keep]
    h = np.zeros_like(T)
    h[:, 1] = 1
    ident = h.copy()
    for _ in range(c * gf.w):
        h = _batch_mulmod(gf, h, h, T)
    idx = np.flatnonzero(keep)
    keep[idx[~np.all(h == ident, axis=1)]] = False
    return keep


@lru_cache(maxsize=None)
def smallest_irreducible(gf: GF, c: int) -> tuple[int, ...]:
    """Smallest monic irreducible degree-c polynomial over ``gf``.

    Candidates are ordered by the integer ``sum(a_i * q**i)`` of their
    non-leading coefficients.  Returned lowest degree first, leading 1
    included.
    """
    q = gf.q
    if c == 1:
        return (0, 1)
    chunk = 4096
    for start in range(1, q**c, chunk):
        codes = np.arange(start, min(start + chunk, q**c), dtype=np.int64)
        T = np.stack([(codes // q**i) % q for i in range(c)], axis=1)
        T = T[T[:, 0] != 0]
        for tail in T[_irreducible_prefilter(gf, T)]:
            f = [int(a) for a in tail] + [1]
            if is_irreducible(gf, f):
                return tuple(f)
    raise ValueError(f"no irreducible polynomial of degree {c}")  # unreachable


class ExtField:
    """GF(q^c) as polynomials of degree < c over GF(q), reduced by ``ext_poly``."""

    def __init__(self, base: GF, c: int, ext_poly=None):
        if c < 1:
            raise ValueError("extension degree must be >= 1")
        self.base = base
        self.c = c
        self.Q = base.q**c
        if ext_poly is None:
            ext_poly = smallest_irreducible(base, c) if c > 1 else (0, 1)
        ext_poly = tuple(int(x) for x in ext_poly)
        if len(ext_poly) != c + 1 or ext_poly[-1] != 1:
            raise ValueError("ext_poly must be monic of degree c")
        if not is_irreducible(base, ext_poly):
            raise ValueError(f"{ext_poly} is reducible over GF(2^{base.w})")
        self.ext_poly = ext_poly
        self._tail = np.array(ext_poly[:c], dtype=np.int64)
        self.zero = (0,) * c
        self.one = (1,) + (0,) * (c - 1)

    def __repr__(self):
        return f"ExtField(GF(2^{self.base.w})^{self.c}, poly={self.ext_poly})"

    @property
    def bits(self) -> int:
        return self.c * self.base.w

    def check(self, a) -> tuple[int, ...]:
        a = tuple(int(x) for x in a)
        if len(a) != self.c or any(not 0 <= x < self.base.q for x in a):
            raise ValueError(f"{a} is not an element of {self!r}")
        return a

    def embed(self, a: int) -> tuple[int, ...]:
        return (int(a),) + (0,) * (self.c - 1)

    @staticmethod
    def add(a, b) -> tuple[int, ...]:
        return tuple(x ^ y for x, y in zip(a, b))

    def mul(self, a, b) -> tuple[int, ...]:
        gf, c = self.base, self.c
        prod = [0] * (2 * c - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] ^= gf.mul(x, y)
        f = self.ext_poly
        for d in range(2 * c - 2, c - 1, -1):
            top = prod[d]
            if top:
                for i in range(c):
                    prod[d - c + i] ^= gf.mul(top, f[i])
        return tuple(prod[:c])

    def scale(self, a: int, x) -> tuple[int, ...]:
        """Base-field scalar times extension element (same as mul(embed(a), x))."""
        return tuple(self.base.mul(a, y) for y in x)

    def pow(self, a, e: int) -> tuple[int, ...]:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = self.one, tuple(a)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a) -> tuple[int, ...]:
        if not any(a):
            raise ZeroDivisionError("zero has no inverse in the extension field")
        return self.pow(a, self.Q - 2)

    def to_int(self, a) -> int:
        w = self.base.w
        return sum(int(x) << (i * w) for i, x in enumerate(a))

    def from_int(self, v: int) -> tuple[int, ...]:
        w, mask = self.base.w, self.base.q - 1
        return tuple((v >> (i * w)) & mask for i in range(self.c))

    def elements(self):
        for v in range(self.Q):
            yield self.from_int(v)

    def random(self, rng: np.random.Generator, nonzero: bool = False) -> tuple[int, ...]:
        while True:
            a = tuple(int(x) for x in rng.integers(0, self.base.q, size=self.c))
            if any(a) or not nonzero:
                return a

    # batched ops on arrays of shape (..., c)

    def bmul(self, A, B) -> np.ndarray:
        gf, c = self.base, self.c
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        shape = np.broadcast_shapes(A.shape, B.shape)
        prod = np.zeros(shape[:-1] + (2 * c - 1,), dtype=np.int64)
        for i in range(c):
            for j in range(c):
                prod[..., i + j] ^= gf.vmul(A[..., i], B[..., j])
        for d in range(2 * c - 2, c - 1, -1):
            top = prod[..., d]
            for i in range(c):
                if self._tail[i]:
                    prod[..., d - c + i] ^= gf.vmul(top, self._tail[i])
        return prod[..., :c]

    def bscale(self, a, B) -> np.ndarray:
        """Base-field scalars ``a`` (shape ...) times extension array ``B``."""
        return self.base.vmul(np.asarray(a)[..., None], np.asarray(B))

    def bembed(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        out = np.zeros(a.shape + (self.c,), dtype=np.int64)
        out[..., 0] = a
        return out
