"""Hash-style side information that picks the true vector out of a list.

The side information for a coding vector ``v`` is one symbol of GF(q^c),
``v . g_r = sum_j v_j r^j``: the evaluation of ``v`` (read as a polynomial)
at a point ``r`` shared through the session ID.  Two distinct vectors agree
at ``r`` for at most n-1 of the Q-1 nonzero choices of ``r``.

Session-ID digest (wire constant, all parties must match bit-exactly)::

    state = 0x9E3779B97F4A7C15 ^ len(session_id)
    for byte in session_id:
        state = ((state ^ byte) * 0x100000001B3) mod 2^64
    if state == 0: state = 0x9E3779B97F4A7C15
    repeat for each 8-byte output block:
        8 rounds of:  x ^= x >> 12; x ^= (x << 25) mod 2^64; x ^= x >> 27;
                      x = (x * 0x2545F4914F6CDD1D) mod 2^64
        emit x as 8 bytes, big-endian

The digest stream is cut into chunks of ceil(c*w/8) bytes.  Each chunk, read
as a big-endian integer and masked to c*w bits, is a candidate element
(coefficient i is bits [i*w, (i+1)*w)); the first nonzero candidate is the
point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AmbiguousSelection, NoMatch
from .gf import GF, ExtField, get_field

_MASK64 = (1 << 64) - 1
DIGEST_SEED = 0x9E3779B97F4A7C15
DIGEST_ABSORB = 0x100000001B3
DIGEST_MIX = 0x2545F4914F6CDD1D
DIGEST_ROUNDS = 8


def required_ext_degree(n: int, l_max: int, p_f: float, w: int) -> int:
    """Smallest c with (l_max - 1)(n - 1)/(q^c - 1) <= p_f and q^c > n - 1.

    The true vector must differ from each of the other l_max - 1 candidates
    at ``r``; each pair collides with probability at most (n-1)/(q^c-1).
    """
    if n < 1 or l_max < 1 or not p_f > 0:
        raise ValueError("n, l_max and p_f must be positive")
    q = 1 << w
    c = 1
    while q**c <= n - 1 or (l_max - 1) * (n - 1) > p_f * (q**c - 1):
        c += 1
    return c


@dataclass(frozen=True)
class SideInfoParams:
    ext: ExtField
    n: int
    l_max: int
    p_f: float

    @classmethod
    def create(cls, n: int, field: GF | int = 8, l_max: int = 64, p_f: float = 1e-4) -> "SideInfoParams":
        gf = get_field(field) if isinstance(field, int) else field
        c = required_ext_degree(n, l_max, p_f, gf.w)
        return cls(ext=_ext_field(gf, c), n=n, l_max=l_max, p_f=p_f)

    @property
    def c(self) -> int:
        return self.ext.c

    @property
    def bits(self) -> int:
        return self.ext.bits

    @property
    def collision_bound(self) -> float:
        """Union bound on the probability that selection is ambiguous."""
        return (self.l_max - 1) * (self.n - 1) / (self.ext.Q - 1)


@lru_cache(maxsize=None)
def _ext_field(gf: GF, c: int) -> ExtField:
    return ExtField(gf, c)


def session_digest(session_id: bytes, nbytes: int) -> bytes:
    state = DIGEST_SEED ^ len(session_id)
    for byte in session_id:
        state = ((state ^ byte) * DIGEST_ABSORB) & _MASK64
    if state == 0:
        state = DIGEST_SEED
    out = bytearray()
    while len(out) < nbytes:
        for _ in range(DIGEST_ROUNDS):
            state ^= state >> 12
            state ^= (state << 25) & _MASK64
            state ^= state >> 27
            state = (state * DIGEST_MIX) & _MASK64
        out += state.to_bytes(8, "big")
    return bytes(out[:nbytes])


def derive_point(session_id: bytes | str, params: SideInfoParams) -> tuple[int, ...]:
    """Nonzero evaluation point shared by sources and terminals."""
    if isinstance(session_id, str):
        session_id = session_id.encode()
    ext = params.ext
    nbytes = (ext.bits + 7) // 8
    attempts = 64
    stream = session_digest(session_id, nbytes * attempts)
    for i in range(attempts):
        value = int.from_bytes(stream[i * nbytes : (i + 1) * nbytes], "big") & (ext.Q - 1)
        if value:
            return ext.from_int(value)
    return ext.one  # 64 zero chunks in a row; not reachable in practice


def point_powers(ext: ExtField, r, n: int) -> np.ndarray:
    """``[r^0, r^1, ..., r^(n-1)]`` as an (n, c) array."""
    return _point_powers(ext, tuple(int(x) for x in r), n)


@lru_cache(maxsize=256)
def _point_powers(ext: ExtField, r: tuple[int, ...], n: int) -> np.ndarray:
    out = np.zeros((n, ext.c), dtype=np.int64)
    cur = ext.one
    for j in range(n):
        out[j] = cur
        cur = ext.mul(cur, r)
    out.flags.writeable = False
    return out


def evaluate_side_info(v, r, ext: ExtField) -> tuple[int, ...]:
    """``sum_j embed(v_j) * r^j`` in GF(q^c)."""
    v = np.asarray(v, dtype=np.int64)
    if v.ndim != 1:
        raise ValueError("expected a single vector")
    P = point_powers(ext, r, len(v))
    acc = np.bitwise_xor.reduce(ext.bscale(v, P), axis=0)
    return tuple(int(x) for x in acc)


def evaluate_many(vectors, r, ext: ExtField) -> np.ndarray:
    """Side information of each row of ``vectors`` at one point; shape (rows, c)."""
    V = np.asarray(vectors, dtype=np.int64)
    P = point_powers(ext, r, V.shape[1])
    return np.bitwise_xor.reduce(ext.bscale(V, P[None]), axis=1)


def evaluate_at_points(v, R, ext: ExtField) -> np.ndarray:
    """Side information of one vector at many points ``R`` (shape (T, c)); Horner form."""
    v = np.asarray(v, dtype=np.int64)
    R = np.asarray(R, dtype=np.int64)
    acc = np.zeros_like(R)
    for coef in v[::-1]:
        acc = ext.bmul(acc, R)
        acc[:, 0] ^= int(coef)
    return acc


def select_candidate(candidates, target, r, ext: ExtField) -> np.ndarray:
    """The unique candidate whose side information equals ``target``.

    Raises ``NoMatch`` when nothing matches and ``AmbiguousSelection`` when
    several do; ties are never broken silently.
    """
    cands = [np.asarray(c, dtype=np.int64) for c in candidates]
    if not cands:
        raise NoMatch("empty candidate list")
    target = np.asarray(tuple(target), dtype=np.int64)
    vals = evaluate_many(np.stack(cands), r, ext)
    hits = np.flatnonzero(np.all(vals == target[None, :], axis=1))
    if hits.size == 0:
        raise NoMatch("no candidate matches the side information")
    if hits.size > 1:
        raise AmbiguousSelection(f"{hits.size} candidates match the side information", [cands[i] for i in hits])
    return cands[int(hits[0])]
