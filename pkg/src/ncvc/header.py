"""Compressed coding-vector headers: ERROR, ERASURE and LIST schemes.

Every scheme carries the syndrome ``q H^T`` of the coding vector ``q``.
ERASURE adds an n-bit ID segment (bitwise OR of the contributing sources),
LIST adds one extension-field side-information symbol ``q . g_r``.  All
three parts are linear (or monotone, for the ID bits) in ``q``, so
intermediate nodes combine headers without decoding them.

Wire layout::

    [tag: 1 byte, 0x01 ERROR / 0x02 ERASURE / 0x03 LIST]
    [syndrome: n-k symbols of w bits, MSB first, padded to a byte]
    [ERASURE: ceil(n/8) bytes, bit j in byte j//8, LSB first]
    [LIST: c symbols of w bits, ascending coefficient index, padded to a byte]

The tag byte is not counted in ``overhead_bytes``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import ceil

import numpy as np

from .errors import InconsistentIdSegment, InfeasibleConfig, NoMatch
from .gf import get_field
from .listdec import ListDecodeParams, gs_radius, list_error_patterns
from .rs import CodeSpec, bma_error_decode, build_code, erasure_decode
from .sideinfo import SideInfoParams, derive_point, point_powers, required_ext_degree, select_candidate

DEFAULT_SESSION_ID = b"ncvc-session"


class Scheme(enum.IntEnum):
    ERROR = 1
    ERASURE = 2
    LIST = 3

    @classmethod
    def parse(cls, name) -> "Scheme":
        if isinstance(name, Scheme):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError(f"unknown scheme {name!r}") from None


def code_dimension(scheme: Scheme, n: int, m: int) -> int:
    """Dimension k that lets ``scheme`` handle coding vectors of weight <= m."""
    if scheme is Scheme.ERROR:
        return n - 2 * m
    if scheme is Scheme.ERASURE:
        return n - m
    # largest k with n - ceil(sqrt(n k)) >= m
    return (n - m) ** 2 // n


@dataclass(frozen=True)
class SchemeConfig:
    scheme: Scheme
    code: CodeSpec
    m: int
    side_info: SideInfoParams | None = None
    list_params: ListDecodeParams | None = None
    point: tuple | None = None
    session_id: bytes = DEFAULT_SESSION_ID

    def __post_init__(self):
        n, k, m = self.code.n, self.code.k, self.m
        if m < 1:
            raise InfeasibleConfig("m must be at least 1")
        if self.scheme is Scheme.ERROR and m > (n - k) // 2:
            raise InfeasibleConfig(f"ERROR scheme needs m <= (n-k)/2 = {(n - k) // 2}")
        if self.scheme is Scheme.ERASURE and m > n - k:
            raise InfeasibleConfig(f"ERASURE scheme needs m <= n-k = {n - k}")
        is_list = self.scheme is Scheme.LIST
        if is_list != (self.side_info is not None) or is_list != (self.list_params is not None):
            raise ValueError("side_info and list_params are required for LIST and only for LIST")
        if is_list:
            if m > gs_radius(n, k):
                raise InfeasibleConfig(f"LIST scheme needs m <= n - ceil(sqrt(nk)) = {gs_radius(n, k)}")
            if self.list_params.t != m:
                raise ValueError("LIST scheme decodes with radius t = m")
            if self.side_info.n != n:
                raise ValueError("side information length must match n")
            if self.point is None:
                object.__setattr__(self, "point", derive_point(self.session_id, self.side_info))

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def w(self) -> int:
        return self.code.field.w


def make_config(
    scheme,
    n: int,
    m: int,
    w: int = 8,
    p_f: float = 1e-4,
    l_max: int = 64,
    session_id: bytes = DEFAULT_SESSION_ID,
    k: int | None = None,
    verify: str = "sample",
) -> SchemeConfig:
    """Size an RS code for ``scheme`` and weight bound ``m``."""
    scheme = Scheme.parse(scheme)
    if k is None:
        k = code_dimension(scheme, n, m)
    gf = get_field(w)
    if m < 1 or k < 1 or k >= n or n > gf.order:
        raise InfeasibleConfig(f"{scheme.name}: no ({n},{k}) RS code over GF(2^{w}) handles m={m}")
    code = build_code(n, k, gf, verify=verify)
    if scheme is Scheme.LIST:
        side = SideInfoParams.create(n, gf, l_max=l_max, p_f=p_f)
        return SchemeConfig(
            scheme, code, m, side, ListDecodeParams(t=m, max_list_size=l_max), session_id=session_id
        )
    return SchemeConfig(scheme, code, m, session_id=session_id)


# --- headers ---------------------------------------------------------------


@dataclass(eq=False)
class PacketHeader:
    scheme: Scheme
    syndrome: np.ndarray
    id_bits: int | None = None
    side_info: tuple | None = None

    def __eq__(self, other):
        if not isinstance(other, PacketHeader):
            return NotImplemented
        return (
            self.scheme == other.scheme
            and np.array_equal(self.syndrome, other.syndrome)
            and self.id_bits == other.id_bits
            and self.side_info == other.side_info
        )

    @property
    def id_positions(self) -> list[int]:
        bits, out, j = self.id_bits or 0, [], 0
        while bits:
            if bits & 1:
                out.append(j)
            bits >>= 1
            j += 1
        return out


@dataclass
class Packet:
    header: PacketHeader
    payload: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))


def encode_source_header(i: int, cfg: SchemeConfig) -> PacketHeader:
    """Header of the native packet of source ``i`` (coding vector = unit vector i)."""
    n = cfg.n
    if not 0 <= i < n:
        raise IndexError(f"source index {i} out of range [0, {n})")
    synd = cfg.code.H[:, i].astype(np.int64).copy()
    if cfg.scheme is Scheme.ERASURE:
        return PacketHeader(cfg.scheme, synd, id_bits=1 << i)
    if cfg.scheme is Scheme.LIST:
        r_pow = point_powers(cfg.side_info.ext, cfg.point, n)[i]
        return PacketHeader(cfg.scheme, synd, side_info=tuple(int(x) for x in r_pow))
    return PacketHeader(cfg.scheme, synd)


def combine_headers(coeffs, headers, cfg: SchemeConfig) -> PacketHeader:
    """Header of ``sum_l coeffs[l] * packet_l``."""
    headers = list(headers)
    coeffs = [int(c) for c in coeffs]
    if len(coeffs) != len(headers) or not headers:
        raise ValueError("need one coefficient per header")
    if any(h.scheme is not cfg.scheme for h in headers):
        raise ValueError("cannot combine headers of different schemes")
    gf = cfg.code.field
    c = np.array(coeffs, dtype=np.int64)
    S = np.stack([h.syndrome for h in headers])
    synd = np.bitwise_xor.reduce(gf.vmul(c[:, None], S), axis=0)
    out = PacketHeader(cfg.scheme, synd)
    if cfg.scheme is Scheme.ERASURE:
        bits = 0
        for h in headers:
            bits |= h.id_bits
        out.id_bits = bits
    elif cfg.scheme is Scheme.LIST:
        side = np.array([h.side_info for h in headers], dtype=np.int64)
        acc = np.bitwise_xor.reduce(gf.vmul(c[:, None], side), axis=0)
        out.side_info = tuple(int(x) for x in acc)
    return out


def decode_header(h: PacketHeader, cfg: SchemeConfig) -> np.ndarray:
    """Recover the coding vector carried by ``h``.

    Raises a ``DecodeFailure`` subclass if the weight bound is violated, the
    ID segment is inconsistent, or (LIST) the side information does not
    single out one candidate.
    """
    if h.scheme is not cfg.scheme:
        raise ValueError("header scheme does not match the configuration")
    code = cfg.code
    if cfg.scheme is Scheme.ERROR:
        return bma_error_decode(h.syndrome, code)
    if cfg.scheme is Scheme.ERASURE:
        locs = h.id_positions
        if locs and locs[-1] >= code.n:
            raise InconsistentIdSegment("ID segment has bits beyond n")
        if len(locs) > code.redundancy:
            raise InconsistentIdSegment(f"ID segment names {len(locs)} sources, more than n-k={code.redundancy}")
        return erasure_decode(h.syndrome, locs, code)
    cands = list_error_patterns(h.syndrome, code, cfg.list_params)
    try:
        return select_candidate(cands.patterns, h.side_info, cfg.point, cfg.side_info.ext)
    except NoMatch as exc:
        if cands.truncated:
            raise NoMatch("true vector missing from a truncated list") from exc
        raise NoMatch(f"no candidate of weight <= {cfg.m} matches the side information") from exc


def random_combination(cfg: SchemeConfig, rng, support, max_depth: int = 4, max_fanin: int = 4, allow_zero: bool = False):
    """Combine the native headers of ``support`` through a random tree.

    Internal nodes have fan-in 2..max_fanin and random coefficients; the
    tree is at most ``max_depth`` levels deep, so ``len(support)`` must not
    exceed ``max_fanin ** max_depth``.  Returns ``(header, vector)`` where
    ``vector`` is the coding vector computed directly, without headers.
    """
    leaves = [int(i) for i in support]
    if not leaves:
        raise ValueError("support must be non-empty")
    if len(leaves) > max_fanin**max_depth:
        raise ValueError(f"{len(leaves)} leaves do not fit a depth-{max_depth}, fan-in-{max_fanin} tree")
    gf = cfg.code.field

    def build(ids, depth):
        if len(ids) == 1:
            vec = np.zeros(cfg.n, dtype=np.int64)
            vec[ids[0]] = 1
            return encode_source_header(ids[0], cfg), vec
        cap = max_fanin ** (max_depth - depth - 1)
        lo = max(2, -(-len(ids) // cap))
        f = int(rng.integers(lo, min(max_fanin, len(ids)) + 1))
        groups = np.array_split(rng.permutation(ids), f)
        kids = [build([int(x) for x in g], depth + 1) for g in groups]
        coeffs = gf.random(rng, f, nonzero=not allow_zero)
        header = combine_headers(coeffs, [h for h, _ in kids], cfg)
        vec = np.bitwise_xor.reduce(gf.vmul(coeffs[:, None], np.stack([v for _, v in kids])), axis=0)
        return header, vec

    return build(leaves, 0)


# --- overhead --------------------------------------------------------------


@dataclass(frozen=True)
class Overhead:
    scheme: Scheme
    n: int
    m: int
    w: int
    k: int | None
    feasible: bool
    syndrome_symbols: int
    syndrome_bytes: int
    id_bits: int = 0
    id_bytes: int = 0
    side_info_symbols: int = 0
    side_info_bits: int = 0
    side_info_bytes: int = 0
    note: str = ""

    @property
    def total_bytes(self) -> int:
        return self.syndrome_bytes + self.id_bytes + self.side_info_bytes

    @property
    def exact_bits(self) -> int:
        return self.syndrome_symbols * self.w + self.id_bits + self.side_info_bits

    @property
    def exact_symbols(self) -> float:
        """Header length in field symbols without byte rounding."""
        return self.exact_bits / self.w

    def as_dict(self) -> dict:
        return {
            "scheme": self.scheme.name,
            "n": self.n,
            "m": self.m,
            "w": self.w,
            "k": self.k,
            "feasible": self.feasible,
            "syndrome_symbols": self.syndrome_symbols,
            "syndrome_bytes": self.syndrome_bytes,
            "id_bits": self.id_bits,
            "id_bytes": self.id_bytes,
            "side_info_symbols": self.side_info_symbols,
            "side_info_bits": self.side_info_bits,
            "side_info_bytes": self.side_info_bytes,
            "total_bytes": self.total_bytes,
            "exact_bits": self.exact_bits,
            "exact_symbols": self.exact_symbols,
            "note": self.note,
        }


def _sym_bytes(count: int, w: int) -> int:
    return ceil(count * w / 8)


def overhead(cfg: SchemeConfig) -> Overhead:
    n, k, w = cfg.n, cfg.code.k, cfg.w
    r = n - k
    kw = dict(scheme=cfg.scheme, n=n, m=cfg.m, w=w, k=k, feasible=True, syndrome_symbols=r, syndrome_bytes=_sym_bytes(r, w))
    if cfg.scheme is Scheme.ERASURE:
        kw.update(id_bits=n, id_bytes=ceil(n / 8))
    elif cfg.scheme is Scheme.LIST:
        c = cfg.side_info.c
        kw.update(side_info_symbols=c, side_info_bits=c * w, side_info_bytes=_sym_bytes(c, w))
    return Overhead(**kw)


def overhead_bytes(cfg: SchemeConfig) -> int:
    return overhead(cfg).total_bytes


def overhead_for(scheme, n: int, m: int, w: int = 8, p_f: float = 1e-4, l_max: int = 64) -> Overhead:
    """Header size for ``scheme`` at (n, m) without building the code.

    An infeasible ERROR configuration falls back to the uncompressed header
    (n symbols), which is what a sender would actually transmit.
    """
    scheme = Scheme.parse(scheme)
    k = code_dimension(scheme, n, m)
    q = 1 << w
    feasible = m >= 1 and 1 <= k < n <= q - 1
    if not feasible:
        if scheme is Scheme.ERROR:
            note = f"infeasible: needs minimum distance {2 * m + 1} > n; uncompressed h={n}"
            return Overhead(scheme, n, m, w, None, False, n, _sym_bytes(n, w), note=note)
        raise InfeasibleConfig(f"{scheme.name}: no ({n},{k}) RS code over GF(2^{w}) for m={m}")
    r = n - k
    if scheme is Scheme.ERASURE:
        return Overhead(scheme, n, m, w, k, True, r, _sym_bytes(r, w), id_bits=n, id_bytes=ceil(n / 8))
    if scheme is Scheme.LIST:
        c = required_ext_degree(n, l_max, p_f, w)
        return Overhead(
            scheme, n, m, w, k, True, r, _sym_bytes(r, w),
            side_info_symbols=c, side_info_bits=c * w, side_info_bytes=_sym_bytes(c, w),
        )
    return Overhead(scheme, n, m, w, k, True, r, _sym_bytes(r, w))


# --- wire format -----------------------------------------------------------


def _pack_symbols(symbols, w: int) -> bytes:
    count = len(symbols)
    nbytes = _sym_bytes(count, w)
    value = 0
    for s in symbols:
        value = (value << w) | int(s)
    value <<= nbytes * 8 - count * w
    return value.to_bytes(nbytes, "big")


def _unpack_symbols(data: bytes, count: int, w: int) -> list[int]:
    nbytes = _sym_bytes(count, w)
    if len(data) != nbytes:
        raise ValueError("truncated symbol section")
    value = int.from_bytes(data, "big") >> (nbytes * 8 - count * w)
    mask = (1 << w) - 1
    return [(value >> (w * (count - 1 - i))) & mask for i in range(count)]


def serialize(h: PacketHeader, cfg: SchemeConfig) -> bytes:
    if h.scheme is not cfg.scheme:
        raise ValueError("header scheme does not match the configuration")
    w = cfg.w
    out = bytearray([int(h.scheme)])
    out += _pack_symbols(h.syndrome, w)
    if cfg.scheme is Scheme.ERASURE:
        out += int(h.id_bits).to_bytes(ceil(cfg.n / 8), "little")
    elif cfg.scheme is Scheme.LIST:
        out += _pack_symbols(h.side_info, w)
    return bytes(out)


def parse(data: bytes, cfg: SchemeConfig) -> PacketHeader:
    ov = overhead(cfg)
    if len(data) != 1 + ov.total_bytes:
        raise ValueError(f"expected {1 + ov.total_bytes} header bytes, got {len(data)}")
    try:
        scheme = Scheme(data[0])
    except ValueError:
        raise ValueError(f"unknown scheme tag {data[0]:#04x}") from None
    if scheme is not cfg.scheme:
        raise ValueError("scheme tag does not match the configuration")
    w, pos = cfg.w, 1
    synd = _unpack_symbols(data[pos : pos + ov.syndrome_bytes], ov.syndrome_symbols, w)
    pos += ov.syndrome_bytes
    h = PacketHeader(scheme, np.array(synd, dtype=np.int64))
    if scheme is Scheme.ERASURE:
        h.id_bits = int.from_bytes(data[pos : pos + ov.id_bytes], "little")
    elif scheme is Scheme.LIST:
        h.side_info = tuple(_unpack_symbols(data[pos : pos + ov.side_info_bytes], ov.side_info_symbols, w))
    return h
