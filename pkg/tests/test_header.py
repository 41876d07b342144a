import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncvc.errors import DecodeFailure, InconsistentIdSegment, InfeasibleConfig
from ncvc.header import (
    PacketHeader,
    Scheme,
    code_dimension,
    combine_headers,
    decode_header,
    encode_source_header,
    make_config,
    overhead,
    overhead_bytes,
    overhead_for,
    parse,
    random_combination,
    serialize,
)
from ncvc.listdec import gs_radius

import oracles

SMALL = {
    Scheme.ERROR: dict(n=15, m=3, w=4),
    Scheme.ERASURE: dict(n=15, m=6, w=4),
    Scheme.LIST: dict(n=15, m=3, w=4),
}


@pytest.fixture(scope="module")
def small_cfgs():
    return {s: make_config(s, **kw) for s, kw in SMALL.items()}


def test_scheme_parse():
    assert Scheme.parse("erasure") is Scheme.ERASURE
    assert Scheme.parse(Scheme.LIST) is Scheme.LIST
    with pytest.raises(ValueError):
        Scheme.parse("bogus")


def test_code_dimension():
    assert code_dimension(Scheme.ERROR, 50, 15) == 20
    assert code_dimension(Scheme.ERASURE, 50, 15) == 35
    assert code_dimension(Scheme.LIST, 255, 86) == 112
    for n in range(4, 120):
        for m in range(1, n - 1):
            k = code_dimension(Scheme.LIST, n, m)
            if k >= 1:
                assert gs_radius(n, k) >= m
                assert gs_radius(n, k + 1) < m


def test_config_validation():
    with pytest.raises(InfeasibleConfig):
        make_config(Scheme.ERROR, 50, 26)
    with pytest.raises(InfeasibleConfig):
        make_config(Scheme.ERASURE, 50, 0)
    with pytest.raises(InfeasibleConfig):
        make_config(Scheme.ERASURE, 50, 15, k=40)


def test_source_header_examples(small_cfgs):
    for scheme, cfg in small_cfgs.items():
        for i in range(cfg.n):
            h = encode_source_header(i, cfg)
            assert h.syndrome.tolist() == cfg.code.H[:, i].tolist()
            unit = np.zeros(cfg.n, dtype=np.int64)
            unit[i] = 1
            assert np.array_equal(decode_header(h, cfg), unit)
    h0 = encode_source_header(0, small_cfgs[Scheme.LIST])
    assert h0.side_info == small_cfgs[Scheme.LIST].side_info.ext.one
    assert encode_source_header(5, small_cfgs[Scheme.ERASURE]).id_bits == 1 << 5
    with pytest.raises(IndexError):
        encode_source_header(15, small_cfgs[Scheme.ERROR])


def test_combine_identity_and_zero(small_cfgs):
    for cfg in small_cfgs.values():
        h = encode_source_header(3, cfg)
        assert combine_headers([1], [h], cfg) == h
        hs = [encode_source_header(i, cfg) for i in (1, 4, 9)]
        z = combine_headers([0, 0, 0], hs, cfg)
        assert not z.syndrome.any()
        if cfg.scheme is Scheme.ERASURE:
            assert z.id_bits == (1 << 1) | (1 << 4) | (1 << 9)
        if cfg.scheme is Scheme.LIST:
            assert not any(z.side_info)
    with pytest.raises(ValueError):
        combine_headers([1], [], small_cfgs[Scheme.ERROR])
    with pytest.raises(ValueError):
        combine_headers([1, 1], [encode_source_header(0, small_cfgs[Scheme.ERROR]), encode_source_header(0, small_cfgs[Scheme.ERASURE])], small_cfgs[Scheme.ERROR])


def test_commutation_direct(small_cfgs):
    rng = np.random.default_rng(0)
    for cfg in small_cfgs.values():
        gf = cfg.code.field
        for _ in range(20):
            ids = rng.choice(cfg.n, size=int(rng.integers(1, cfg.m + 1)), replace=False)
            coeffs = gf.random(rng, len(ids), nonzero=True)
            h = combine_headers(coeffs, [encode_source_header(int(i), cfg) for i in ids], cfg)
            want = np.zeros(cfg.n, dtype=np.int64)
            want[ids] = coeffs
            assert np.array_equal(decode_header(h, cfg), want)


@pytest.mark.parametrize("scheme", list(Scheme))
def test_tree_homomorphism(small_cfgs, scheme):
    cfg = small_cfgs[scheme]
    rng = np.random.default_rng(int(scheme))
    for _ in range(60):
        support = rng.choice(cfg.n, size=int(rng.integers(1, cfg.m + 1)), replace=False)
        h, vec = random_combination(cfg, rng, support)
        assert np.count_nonzero(vec) == len(support)
        assert np.array_equal(decode_header(h, cfg), vec)


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_homomorphism_property_erasure(data):
    cfg = make_config(Scheme.ERASURE, 30, 10, w=8)
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    support = data.draw(st.lists(st.integers(0, 29), min_size=1, max_size=10, unique=True))
    h, vec = random_combination(cfg, rng, support, allow_zero=data.draw(st.booleans()))
    assert np.array_equal(decode_header(h, cfg), vec)
    got = set(h.id_positions)
    assert set(np.flatnonzero(vec).tolist()) <= got == set(support)


def test_id_segment_strict_superset_on_cancellation():
    cfg = make_config(Scheme.ERASURE, 15, 6, w=4)
    a = combine_headers([1, 1], [encode_source_header(2, cfg), encode_source_header(5, cfg)], cfg)
    b = combine_headers([1], [encode_source_header(5, cfg)], cfg)
    # a + b cancels source 5 but its ID bit stays set
    c = combine_headers([1, 1], [a, b], cfg)
    assert c.id_positions == [2, 5]
    vec = decode_header(c, cfg)
    assert vec.tolist() == [0, 0, 1] + [0] * 12


def test_erasure_id_segment_checks():
    cfg = make_config(Scheme.ERASURE, 15, 6, w=4)
    h = encode_source_header(1, cfg)
    too_many = PacketHeader(Scheme.ERASURE, h.syndrome, id_bits=(1 << 7) - 1)
    with pytest.raises(InconsistentIdSegment):
        decode_header(too_many, cfg)
    beyond = PacketHeader(Scheme.ERASURE, h.syndrome, id_bits=1 << 15)
    with pytest.raises(InconsistentIdSegment):
        decode_header(beyond, cfg)
    wrong = PacketHeader(Scheme.ERASURE, h.syndrome, id_bits=1 << 2)
    with pytest.raises(DecodeFailure):
        decode_header(wrong, cfg)


def test_error_scheme_overweight_flagged():
    cfg = make_config(Scheme.ERROR, 15, 3, w=4)
    rng = np.random.default_rng(3)
    flagged = 0
    for _ in range(50):
        h, vec = random_combination(cfg, rng, rng.choice(15, size=6, replace=False))
        try:
            out = decode_header(h, cfg)
        except DecodeFailure:
            flagged += 1
            continue
        assert not np.array_equal(out, vec)
    assert flagged > 40


def test_wire_frozen_bytes():
    cfg = make_config(Scheme.ERROR, 5, 1, w=4)
    assert serialize(encode_source_header(0, cfg), cfg) == bytes([0x01, 0x11])
    assert serialize(encode_source_header(1, cfg), cfg) == bytes([0x01, 0x24])
    cfg = make_config(Scheme.ERASURE, 10, 2, w=8)
    F = oracles.Field(8, 0x11D)
    raw = serialize(encode_source_header(9, cfg), cfg)
    assert raw == bytes([0x02, F.alpha(9), F.alpha(18), 0x00, 0x02])
    cfg = make_config(Scheme.LIST, 15, 3, w=4)
    raw = serialize(encode_source_header(0, cfg), cfg)
    c = cfg.side_info.c
    assert raw[0] == 0x03 and len(raw) == 1 + overhead_bytes(cfg)
    assert raw[-((c * 4 + 7) // 8) :] == bytes([0x10] + [0] * (((c * 4 + 7) // 8) - 1))


@pytest.mark.parametrize("scheme,n,m,w", [(Scheme.ERROR, 15, 3, 4), (Scheme.ERASURE, 50, 15, 8), (Scheme.LIST, 15, 3, 4), (Scheme.ERROR, 63, 10, 6), (Scheme.ERASURE, 63, 20, 6), (Scheme.ERASURE, 20, 5, 16)])
def test_wire_roundtrip(scheme, n, m, w):
    cfg = make_config(scheme, n, m, w=w)
    rng = np.random.default_rng(n + m)
    for _ in range(20):
        h, _ = random_combination(cfg, rng, rng.choice(n, size=int(rng.integers(1, m + 1)), replace=False))
        raw = serialize(h, cfg)
        assert len(raw) == 1 + overhead_bytes(cfg)
        assert parse(raw, cfg) == h
        assert serialize(parse(raw, cfg), cfg) == raw


def test_parse_rejects_malformed(small_cfgs):
    cfg = small_cfgs[Scheme.ERROR]
    raw = serialize(encode_source_header(0, cfg), cfg)
    with pytest.raises(ValueError):
        parse(raw[:-1], cfg)
    with pytest.raises(ValueError):
        parse(bytes([0x09]) + raw[1:], cfg)
    with pytest.raises(ValueError):
        parse(bytes([0x02]) + raw[1:], cfg)


def test_overhead_examples():
    assert overhead_for(Scheme.ERROR, 50, 15).total_bytes == 30
    assert overhead_for(Scheme.ERASURE, 50, 15).total_bytes == 22
    e2 = overhead_for(Scheme.ERROR, 255, 150)
    assert not e2.feasible and e2.total_bytes == 255
    assert overhead_for(Scheme.ERASURE, 255, 150).total_bytes == 182
    e3 = {s: overhead_for(s, 255, 86, p_f=1e-4) for s in Scheme}
    assert [e3[s].total_bytes for s in Scheme] == [172, 118, 147]
    assert e3[Scheme.LIST].syndrome_bytes == 143 and e3[Scheme.LIST].side_info_bytes == 4



@pytest.mark.parametrize("n,m", [(50, 15), (255, 150), (255, 86)])
def test_scheme_ordering_on_reference_cases(n, m):
    size = {s: overhead_for(s, n, m, p_f=1e-4).total_bytes for s in Scheme}
    assert size[Scheme.ERASURE] <= size[Scheme.LIST] <= size[Scheme.ERROR]


def test_overhead_matches_built_config():
    for scheme, n, m in [(Scheme.ERROR, 50, 15), (Scheme.ERASURE, 50, 15), (Scheme.LIST, 50, 15)]:
        cfg = make_config(scheme, n, m)
        assert overhead(cfg).as_dict() == overhead_for(scheme, n, m).as_dict()
