"""Reed-Solomon codes in parity-check form.

Position ``j`` has evaluation point ``alpha^j``; the parity-check matrix is
``H[i][j] = alpha^(j*(b+i))`` for ``i < n-k``.  Shortened codes keep the
first ``n`` positions of the length-``n_full`` code.

A coding vector with at most ``m`` nonzero entries is compressed to its
syndrome ``v H^T``; the decoders here recover it from that syndrome either
blindly (Berlekamp-Massey) or with its support known (erasure decoding).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from math import comb

import numpy as np

from . import linalg
from .errors import DecodeFailure, InconsistentSystem, InfeasibleConfig
from .gf import GF, get_field


@dataclass(frozen=True, eq=False)
class CodeSpec:
    n: int
    k: int
    field: GF
    b: int = 1
    n_full: int | None = None
    H: np.ndarray = dc_field(repr=False, default=None)
    points: np.ndarray = dc_field(repr=False, default=None)

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    @property
    def d(self) -> int:
        return self.n - self.k + 1

    @property
    def t0(self) -> int:
        """Unique decoding radius."""
        return (self.n - self.k) // 2

    @property
    def shortened(self) -> bool:
        return self.n_full is not None and self.n < self.n_full

    @cached_property
    def column_multipliers(self) -> np.ndarray:
        """``u`` such that the code is ``{(u_j f(x_j))_j : deg f < k}``."""
        gf, x = self.field, self.points
        u = np.empty(self.n, dtype=np.int64)
        for j in range(self.n):
            diffs = x[np.arange(self.n) != j] ^ x[j]
            logs = int(gf.log[diffs].sum()) + int(gf.log[x[j]]) * self.b
            u[j] = gf.alpha_pow(-logs)
        return u

    @cached_property
    def generator(self) -> np.ndarray:
        """k x n generator matrix, systematic on the last k positions."""
        return linalg.nullspace(self.field, self.H)

    def __repr__(self):
        return f"CodeSpec(n={self.n}, k={self.k}, w={self.field.w}, b={self.b}, n_full={self.n_full})"


def build_code(n: int, k: int, field: GF | int = 8, b: int = 1, verify: str = "sample") -> CodeSpec:
    """Build an (n, k) RS code over ``field`` (a GF or its bit-width).

    ``verify`` is "sample" (a few random column subsets), "exhaustive" or
    "none" for the MDS sanity check.
    """
    gf = get_field(field) if isinstance(field, int) else field
    if not 0 < k < n <= gf.order:
        raise InfeasibleConfig(f"need 0 < k < n <= q-1, got n={n}, k={k}, q={gf.q}")
    j = np.arange(n)
    points = gf.exp[j % gf.order].copy()
    rows = np.arange(n - k)[:, None]
    H = gf.exp[(j[None, :] * (b + rows)) % gf.order].copy()
    H.flags.writeable = False
    points.flags.writeable = False
    code = CodeSpec(n=n, k=k, field=gf, b=b, n_full=gf.order, H=H, points=points)
    if verify == "exhaustive":
        if not check_mds(code, exhaustive=True):
            raise AssertionError("parity-check matrix is not MDS")
    elif verify == "sample":
        if not check_mds(code, samples=3):
            raise AssertionError("parity-check matrix is not MDS")
    elif verify != "none":
        raise ValueError(f"unknown verify mode {verify!r}")
    return code


def check_mds(code: CodeSpec, exhaustive: bool = False, samples: int = 3, seed: int = 0) -> bool:
    """True if every tested set of n-k columns of H has full rank."""
    r, n = code.redundancy, code.n
    if exhaustive:
        subsets = itertools.combinations(range(n), r)
    else:
        rng = np.random.default_rng(seed)
        subsets = (sorted(rng.choice(n, size=r, replace=False)) for _ in range(samples))
    return all(linalg.rank(code.field, code.H[:, list(cols)]) == r for cols in subsets)


def mds_subset_count(code: CodeSpec) -> int:
    return comb(code.n, code.redundancy)


def _as_vector(v, length: int, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (length,):
        raise ValueError(f"{what} must have length {length}, got shape {v.shape}")
    return v


def syndrome(v, code: CodeSpec) -> np.ndarray:
    v = _as_vector(v, code.n, "vector")
    return code.field.matvec(code.H, v)


def is_codeword(v, code: CodeSpec) -> bool:
    return not np.any(syndrome(v, code))


def encode_message(msg, code: CodeSpec) -> np.ndarray:
    """Codeword for message polynomial ``msg`` (k coefficients, lowest first)."""
    msg = _as_vector(msg, code.k, "message")
    gf = code.field
    return gf.vmul(code.column_multipliers, gf.poly_eval(msg, code.points))


def _poly_mul_trunc(gf: GF, a: np.ndarray, b: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size, dtype=np.int64)
    for i, ai in enumerate(a[:size]):
        if ai:
            m = min(len(b), size - i)
            out[i : i + m] ^= gf.vmul(int(ai), b[:m])
    return out


def berlekamp_massey(gf: GF, s) -> np.ndarray:
    """Shortest LFSR (connection polynomial, lowest degree first) generating ``s``."""
    s = [int(x) for x in s]
    C, B = [1], [1]
    L, shift, last_d = 0, 1, 1
    for r, sr in enumerate(s):
        d = sr
        for i in range(1, L + 1):
            if i < len(C) and C[i]:
                d ^= gf.mul(C[i], s[r - i])
        if d == 0:
            shift += 1
            continue
        coef = gf.div(d, last_d)
        T = list(C)
        need = len(B) + shift
        if len(C) < need:
            C = C + [0] * (need - len(C))
        for i, bi in enumerate(B):
            if bi:
                C[i + shift] ^= gf.mul(coef, bi)
        if 2 * L <= r:
            L = r + 1 - L
            B, last_d, shift = T, d, 1
        else:
            shift += 1
    C = C[: L + 1] + [0] * max(0, L + 1 - len(C))
    return np.array(C, dtype=np.int64)


def bma_error_decode(s, code: CodeSpec) -> np.ndarray:
    """Recover e from s = e H^T when wt(e) <= t0.

    Berlekamp-Massey for the locator, Chien search over the (possibly
    shortened) support, Forney for the magnitudes.  Any inconsistency raises
    ``DecodeFailure``; the result is always re-checked against ``s``.
    """
    gf = code.field
    s = _as_vector(s, code.redundancy, "syndrome")
    n = code.n
    if not np.any(s):
        return np.zeros(n, dtype=np.int64)

    lam = berlekamp_massey(gf, s)
    L = len(lam) - 1
    if L > code.t0 or lam[L] == 0:
        raise DecodeFailure(f"locator degree {L} exceeds t0={code.t0}", cause="too-many-errors")

    # Chien search: position j is in error iff lam(alpha^-j) == 0
    inv_points = gf.exp[(-np.arange(n)) % gf.order]
    vals = gf.poly_eval(lam, inv_points)
    positions = np.flatnonzero(vals == 0)
    if len(positions) != L:
        raise DecodeFailure(
            f"locator has {len(positions)} roots in the support, expected {L}", cause="too-many-errors"
        )

    omega = _poly_mul_trunc(gf, s, lam, code.redundancy)
    dlam = np.array([lam[i] if i % 2 == 1 else 0 for i in range(1, L + 1)], dtype=np.int64)
    e = np.zeros(n, dtype=np.int64)
    for j in positions:
        xinv = int(inv_points[j])
        num = int(gf.poly_eval(omega, xinv))
        den = int(gf.poly_eval(dlam, xinv))
        if den == 0:
            raise DecodeFailure("repeated locator root", cause="too-many-errors")
        mag = gf.mul(gf.div(num, den), gf.pow(int(code.points[j]), 1 - code.b))
        if mag == 0:
            raise DecodeFailure("zero error magnitude at a located position", cause="too-many-errors")
        e[j] = mag

    if not np.array_equal(syndrome(e, code), s):
        raise DecodeFailure("decoded vector does not reproduce the syndrome", cause="syndrome-mismatch")
    return e


def erasure_decode(s, locations, code: CodeSpec) -> np.ndarray:
    """The unique vector supported on ``locations`` whose syndrome is ``s``."""
    s = _as_vector(s, code.redundancy, "syndrome")
    locs = sorted({int(j) for j in locations})
    if len(locs) > code.redundancy:
        raise DecodeFailure(
            f"{len(locs)} erasures exceed n-k={code.redundancy}", cause="too-many-erasures"
        )
    if locs and not (0 <= locs[0] and locs[-1] < code.n):
        raise ValueError("erasure location out of range")
    try:
        vals = linalg.solve(code.field, code.H[:, locs], s)
    except InconsistentSystem as exc:
        raise InconsistentSystem("syndrome is not consistent with the erasure set") from exc
    e = np.zeros(code.n, dtype=np.int64)
    e[locs] = vals
    return e
