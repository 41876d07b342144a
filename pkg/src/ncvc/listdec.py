"""List decoding of syndromes beyond the unique decoding radius.

A syndrome ``s`` is lifted to some word ``y`` with ``y H^T = s`` (zero on a
chosen set of k positions).  Every codeword ``x`` within distance ``t`` of
``y`` then gives an error pattern ``x + y`` of weight <= t with syndrome
``s``, and every such pattern arises this way.  Codewords near ``y`` are
found with a Guruswami-Sudan decoder: Koetter's iterative interpolation
followed by Roth-Ruckenstein root finding.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

import numpy as np

from . import linalg
from .errors import InfeasibleConfig
from .gf import GF
from .rs import CodeSpec, syndrome

DEFAULT_MAX_LIST = 64
DEFAULT_MAX_MULTIPLICITY = 64
BRUTE_FORCE_LIMIT = 1 << 24


def ceil_sqrt(x: int) -> int:
    return 0 if x <= 0 else isqrt(x - 1) + 1


def gs_radius(n: int, k: int) -> int:
    """Largest t this decoder accepts: n - ceil(sqrt(n k))."""
    return n - ceil_sqrt(n * k)


def _monomial_count(D: int, v: int) -> int:
    return sum(D - j * v + 1 for j in range(D // v + 1))


def gs_parameters(n: int, k: int, t: int, max_multiplicity: int = DEFAULT_MAX_MULTIPLICITY):
    """Smallest multiplicity reaching radius ``t``.

    Returns ``(s, D, ell)``: multiplicity, (1, k-1)-weighted degree bound and
    y-degree bound.  A nonzero interpolant exists once the number of
    monomials of weighted degree <= D exceeds the n*s(s+1)/2 constraints,
    and any message agreeing in n-t positions is a root when (n-t)*s > D.
    """
    if k < 2:
        raise ValueError("GS parameters need k >= 2")
    tau = n - t
    v = k - 1
    for s in range(1, max_multiplicity + 1):
        D = tau * s - 1
        if D < 0:
            continue
        if _monomial_count(D, v) > n * s * (s + 1) // 2:
            return s, D, D // v
    raise InfeasibleConfig(
        f"radius {t} for ({n},{k}) needs multiplicity above the cap {max_multiplicity}"
    )


@dataclass(frozen=True)
class ListDecodeParams:
    t: int
    max_list_size: int = DEFAULT_MAX_LIST
    multiplicity: int | None = None
    max_multiplicity: int = DEFAULT_MAX_MULTIPLICITY

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("radius must be non-negative")
        if self.max_list_size < 1:
            raise ValueError("max_list_size must be >= 1")

    def resolve(self, code: CodeSpec) -> tuple[int, int, int]:
        """Validate against ``code`` and return ``(s, D, ell)``."""
        n, k = code.n, code.k
        if self.t > gs_radius(n, k):
            raise InfeasibleConfig(f"t={self.t} exceeds the GS radius {gs_radius(n, k)} of ({n},{k})")
        if k < 2:
            return 1, 0, 0
        if self.multiplicity is None:
            return gs_parameters(n, k, self.t, self.max_multiplicity)
        s = self.multiplicity
        D = (n - self.t) * s - 1
        if _monomial_count(D, k - 1) <= n * s * (s + 1) // 2:
            raise InfeasibleConfig(f"multiplicity {s} is too small for radius {self.t}")
        return s, D, D // (k - 1)


@dataclass
class CandidateList:
    patterns: list = field(default_factory=list)
    truncated: bool = False

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def as_set(self) -> set[tuple[int, ...]]:
        return {tuple(int(x) for x in p) for p in self.patterns}


# --- syndrome -> word ------------------------------------------------------


def default_zero_positions(code: CodeSpec) -> list[int]:
    return list(range(code.n - code.k, code.n))


def syndrome_to_word(s, code: CodeSpec, zero_positions=None) -> np.ndarray:
    """Some ``y`` with ``y H^T = s`` that is zero on ``zero_positions`` (k of them)."""
    if zero_positions is None:
        zero_positions = default_zero_positions(code)
    zeros = {int(j) for j in zero_positions}
    if len(zeros) != code.k or not all(0 <= j < code.n for j in zeros):
        raise ValueError(f"need exactly k={code.k} distinct zero positions in [0, n)")
    free = [j for j in range(code.n) if j not in zeros]
    s = np.asarray(s, dtype=np.int64)
    if s.shape != (code.redundancy,):
        raise ValueError(f"syndrome must have length {code.redundancy}")
    y = np.zeros(code.n, dtype=np.int64)
    y[free] = linalg.solve(code.field, code.H[:, free], s)
    return y


# --- Koetter interpolation -------------------------------------------------


def _binom_parity(rows: int, cols: int) -> np.ndarray:
    """``[r, c] -> C(c, r) mod 2`` via Lucas: odd iff r is a submask of c."""
    r = np.arange(rows)[:, None]
    c = np.arange(cols)[None, :]
    return ((c & r) == r) & (c >= r)


class _Interpolator:
    """Koetter's algorithm with the (1, k-1)-weighted degree order.

    Polynomials are stored as ``G[poly, y_power, x_power]``.  A polynomial
    whose leading weighted degree passes ``D`` can never be the answer and
    is retired, which bounds the x-capacity by ``D + 1``.
    """

    def __init__(self, gf: GF, k: int, s: int, D: int):
        self.gf = gf
        self.v = k - 1
        self.s = s
        self.D = D
        self.ell = D // self.v
        P = self.ell + 1
        self.cap = min(D + 1, 64)
        self.G = np.zeros((P, P, self.cap), dtype=np.int64)
        for j in range(P):
            self.G[j, j, 0] = 1
        self.lead = [(j * self.v, j) for j in range(P)]
        self.xlen = [1] * P
        self.active = list(range(P))
        self.done = 0
        self._xpar = _binom_parity(s, D + 1)
        self._ypar = _binom_parity(s, P)

    def _grow(self, need: int):
        if need <= self.cap:
            return
        cap = min(self.D + 1, max(need, 2 * self.cap))
        G = np.zeros(self.G.shape[:2] + (cap,), dtype=np.int64)
        G[:, :, : self.cap] = self.G
        self.G, self.cap = G, cap

    def _point_weights(self, alpha: int, beta: int):
        gf, s = self.gf, self.s
        i = np.arange(self.D + 1)
        a = np.arange(s)[:, None]
        e = np.maximum(i[None, :] - a, 0)
        xw = gf.exp[(int(gf.log[alpha]) * e) % gf.order]
        xw = np.where(self._xpar, xw, 0)
        j = np.arange(self.ell + 1)
        e = np.maximum(j[None, :] - a, 0)
        if beta:
            yw = gf.exp[(int(gf.log[beta]) * e) % gf.order]
        else:
            yw = (e == 0).astype(np.int64)
        yw = np.where(self._ypar, yw, 0)
        return xw, yw

    def add_point(self, alpha: int, beta: int, limit: int | None = None) -> bool:
        """Impose multiplicity s at (alpha, beta).  False once ``limit`` is hit."""
        gf = self.gf
        xw, yw = self._point_weights(alpha, beta)
        for a in range(self.s):
            for b in range(self.s - a):
                if limit is not None and self.done >= limit:
                    return False
                self.done += 1
                act = np.array(self.active)
                L = max(self.xlen[p] for p in self.active)
                W = gf.vmul(yw[b][:, None], xw[a][None, :L])
                delta = np.bitwise_xor.reduce(
                    gf.vmul(self.G[act, :, :L], W[None]).reshape(len(act), -1), axis=1
                )
                hit = np.flatnonzero(delta)
                if hit.size == 0:
                    continue
                polys = act[hit]
                dvals = delta[hit]
                best = min(range(len(polys)), key=lambda idx: self.lead[polys[idx]])
                p, dp = int(polys[best]), int(dvals[best])
                others = np.delete(polys, best)
                if others.size:
                    do = np.delete(dvals, best)
                    Lp = max([self.xlen[p]] + [self.xlen[o] for o in others])
                    self.G[others, :, :Lp] = gf.vmul(dp, self.G[others, :, :Lp]) ^ gf.vmul(
                        do[:, None, None], self.G[p][None, :, :Lp]
                    )
                    for o in others:
                        self.xlen[o] = max(self.xlen[o], self.xlen[p])
                wdeg, slot = self.lead[p]
                if wdeg + 1 > self.D:
                    self.active.remove(p)
                    if not self.active:
                        raise InfeasibleConfig("interpolation exhausted all candidates")
                    continue
                self.lead[p] = (wdeg + 1, slot)
                n = self.xlen[p]
                self._grow(n + 1)
                old = self.G[p, :, :n].copy()
                self.G[p, :, 1 : n + 1] = old
                self.G[p, :, 0] = 0
                self.G[p, :, :n] ^= gf.vmul(alpha, old)
                self.xlen[p] = n + 1
        return True

    def result(self) -> np.ndarray:
        p = min(self.active, key=lambda j: self.lead[j])
        return self.G[p, :, : self.xlen[p]].copy()


def interpolate(gf: GF, xs, ys, k: int, s: int, D: int) -> np.ndarray:
    """Nonzero Q(x, y) (as ``Q[y_power, x_power]``) with multiplicity ``s`` at every (xs[i], ys[i])."""
    it = _Interpolator(gf, k, s, D)
    for a, b in zip(xs, ys):
        it.add_point(int(a), int(b))
    return it.result()


# --- Roth-Ruckenstein root finding ------------------------------------------


def _strip(Q: np.ndarray) -> np.ndarray:
    nz_cols = np.flatnonzero(Q.any(axis=0))
    if nz_cols.size == 0:
        return Q[:1, :1] * 0
    Q = Q[:, nz_cols[0] : nz_cols[-1] + 1]
    nz_rows = np.flatnonzero(Q.any(axis=1))
    return Q[: nz_rows[-1] + 1]


def _substitute(gf: GF, Q: np.ndarray, gamma: int) -> np.ndarray:
    """Q(x, x*y + gamma)."""
    P, X = Q.shape
    e = np.arange(P)[None, :] - np.arange(P)[:, None]
    if gamma:
        pw = gf.exp[(int(gf.log[gamma]) * np.maximum(e, 0)) % gf.order]
    else:
        pw = (e == 0).astype(np.int64)
    M = np.where(_binom_parity(P, P), pw, 0)
    shifted = np.bitwise_xor.reduce(gf.vmul(M[:, :, None], Q[None, :, :]), axis=1)
    out = np.zeros((P, X + P - 1), dtype=np.int64)
    for l in range(P):
        out[l, l : l + X] = shifted[l]
    return out


def find_y_roots(gf: GF, Q: np.ndarray, k: int) -> list[tuple[int, ...]]:
    """All f with deg f < k and (y - f(x)) | Q(x, y), plus possibly spurious paths.

    Callers filter the output; completeness is what matters here.
    """
    out: list[tuple[int, ...]] = []
    stack = [(_strip(Q), ())]
    while stack:
        cur, prefix = stack.pop()
        if len(prefix) == k:
            out.append(prefix)
            continue
        vals = gf.poly_eval(cur[:, 0], gf.elements)
        for gamma in np.flatnonzero(vals == 0)[::-1]:
            stack.append((_strip(_substitute(gf, cur, int(gamma))), prefix + (int(gamma),)))
    return out


# --- list decoding ----------------------------------------------------------


def _hamming(a, b) -> int:
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


def _sort_key(v: np.ndarray):
    return (int(np.count_nonzero(v)), tuple(int(x) for x in v))


def gs_list_decode(y, code: CodeSpec, params: ListDecodeParams) -> tuple[list[np.ndarray], bool]:
    """All codewords within distance ``params.t`` of ``y``; returns (codewords, truncated)."""
    gf, n, k, t = code.field, code.n, code.k, params.t
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (n,):
        raise ValueError(f"word must have length {n}")
    s, D, _ = params.resolve(code)
    u = code.column_multipliers
    if k < 2:
        msgs = [(int(c),) for c in gf.elements]
    else:
        yprime = gf.vmul(y, gf.vinv(u))
        Q = interpolate(gf, code.points, yprime, k, s, D)
        msgs = find_y_roots(gf, Q, k)
    found = {}
    for msg in msgs:
        cw = gf.vmul(u, gf.poly_eval(np.array(msg), code.points))
        if _hamming(cw, y) <= t:
            found[tuple(int(x) for x in cw)] = cw
    words = sorted(found.values(), key=lambda cw: _sort_key(cw ^ y))
    truncated = len(words) > params.max_list_size
    return words[: params.max_list_size], truncated


def list_error_patterns(s, code: CodeSpec, params: ListDecodeParams, zero_positions=None) -> CandidateList:
    """Every e with ``e H^T = s`` and ``wt(e) <= t`` (up to the list cap)."""
    y = syndrome_to_word(s, code, zero_positions)
    words, truncated = gs_list_decode(y, code, params)
    patterns = sorted((cw ^ y for cw in words), key=_sort_key)
    return CandidateList(patterns=patterns, truncated=truncated)


# --- brute-force oracle -----------------------------------------------------


def _codebook_chunks(code: CodeSpec):
    """Yield blocks of codewords covering the whole code exactly once."""
    gf, k, q = code.field, code.k, code.field.q
    G = code.generator
    low = max(1, min(k, 16 // gf.w))
    table = np.zeros((1, code.n), dtype=np.int64)
    for row in G[:low]:
        scaled = gf.vmul(gf.elements[:, None], row[None, :])
        table = (table[None, :, :] ^ scaled[:, None, :]).reshape(-1, code.n)
    high = G[low:]
    for digits in itertools.product(range(q), repeat=len(high)):
        offset = np.zeros(code.n, dtype=np.int64)
        for d, row in zip(digits, high):
            if d:
                offset ^= gf.vmul(d, row)
        yield table ^ offset


@lru_cache(maxsize=4)
def _cached_codebook(code: CodeSpec) -> np.ndarray:
    dtype = np.uint8 if code.field.w <= 8 else np.uint16
    return np.concatenate([c.astype(dtype) for c in _codebook_chunks(code)])


def brute_force_list(s, code: CodeSpec, t: int, zero_positions=None) -> CandidateList:
    """Exact answer to the syndrome list problem by enumerating all codewords."""
    q, k, n = code.field.q, code.k, code.n
    if q**k > BRUTE_FORCE_LIMIT:
        raise InfeasibleConfig(f"q^k = {q}^{k} codewords is too many to enumerate")
    y = syndrome_to_word(s, code, zero_positions)
    if q**k * n <= 1 << 26:
        chunks = [_cached_codebook(code)]
    else:
        chunks = _codebook_chunks(code)
    found = []
    for chunk in chunks:
        E = chunk ^ y.astype(chunk.dtype)
        keep = np.count_nonzero(E, axis=1) <= t
        found.extend(e.astype(np.int64) for e in E[keep])
    return CandidateList(patterns=sorted(found, key=_sort_key), truncated=False)


# --- budget probe -----------------------------------------------------------


def estimate_gs_seconds(code: CodeSpec, t: int, probe_fraction: float = 0.02, seed: int = 0) -> float:
    """Extrapolated wall time of one full interpolation at radius ``t``.

    Runs Koetter's algorithm for a small prefix of the constraints and fits
    a quadratic cost model (per-constraint work grows linearly with the
    degree of the working polynomials).
    """
    s, D, _ = ListDecodeParams(t).resolve(code)
    total = code.n * s * (s + 1) // 2
    rng = np.random.default_rng(seed)
    ys = code.field.random(rng, code.n)
    marks = [max(1, int(total * probe_fraction / 2)), max(2, int(total * probe_fraction))]
    times = []
    for limit in marks:
        it = _Interpolator(code.field, code.k, s, D)
        start = time.perf_counter()
        for a, b in zip(code.points, ys):
            if not it.add_point(int(a), int(b), limit=limit):
                break
        times.append(time.perf_counter() - start)
    (c1, c2), (t1, t2) = marks, times
    # t(c) = lin*c + quad*c^2 through both marks
    quad = max((t2 / c2 - t1 / c1) / (c2 - c1), 0.0)
    lin = max(t1 / c1 - quad * c1, 0.0)
    return lin * total + quad * total * total


def check_soundness(candidates: CandidateList, s, code: CodeSpec, t: int) -> bool:
    s = np.asarray(s)
    return all(
        np.count_nonzero(e) <= t and np.array_equal(syndrome(e, code), s) for e in candidates.patterns
    ) and len(candidates.as_set()) == len(candidates.patterns)
