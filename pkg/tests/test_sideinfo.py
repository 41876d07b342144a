import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from ncvc.errors import AmbiguousSelection, NoMatch
from ncvc.gf import ExtField, get_field
from ncvc.sideinfo import (
    SideInfoParams,
    derive_point,
    evaluate_at_points,
    evaluate_many,
    evaluate_side_info,
    point_powers,
    required_ext_degree,
    select_candidate,
    session_digest,
)

import oracles


def reference_digest(data: bytes, nbytes: int) -> bytes:
    m = 2**64
    x = (0x9E3779B97F4A7C15 ^ len(data)) % m
    for b in data:
        x = ((x ^ b) * 0x100000001B3) % m
    x = x or 0x9E3779B97F4A7C15
    out = b""
    while len(out) < nbytes:
        for _ in range(8):
            x ^= x >> 12
            x = (x ^ (x << 25)) % m
            x ^= x >> 27
            x = (x * 0x2545F4914F6CDD1D) % m
        out += x.to_bytes(8, "big")
    return out[:nbytes]


def test_required_degree_examples():
    assert required_ext_degree(255, 64, 1e-4, 8) == 4
    assert required_ext_degree(2, 1, 1e-4, 8) == 1
    assert required_ext_degree(2, 1, 0.5, 4) == 1


@pytest.mark.parametrize("n,l_max,p_f,w", [(255, 64, 1e-4, 8), (63, 64, 1e-4, 6), (50, 64, 1e-4, 8), (15, 8, 1e-3, 4), (10, 2, 0.05, 4)])
def test_required_degree_is_minimal(n, l_max, p_f, w):
    c = required_ext_degree(n, l_max, p_f, w)
    q = 2**w

    def ok(c):
        return q**c > n - 1 and (l_max - 1) * (n - 1) / (q**c - 1) <= p_f

    assert ok(c)
    assert c == 1 or not ok(c - 1)


def test_required_degree_rejects_bad_input():
    with pytest.raises(ValueError):
        required_ext_degree(0, 1, 0.1, 8)
    with pytest.raises(ValueError):
        required_ext_degree(10, 1, 0.0, 8)


def test_params_create():
    p = SideInfoParams.create(255, 8, l_max=64, p_f=1e-4)
    assert p.c == 4 and p.bits == 32
    assert p.collision_bound <= 1e-4


def test_digest_matches_reference():
    for sid in [b"", b"a", b"ncvc-session", bytes(range(40))]:
        assert session_digest(sid, 24) == reference_digest(sid, 24)
    # frozen first block for the empty id
    assert session_digest(b"", 8) == reference_digest(b"", 8)
    assert len(session_digest(b"x", 5)) == 5


def test_derive_point_deterministic_and_total():
    p = SideInfoParams.create(255, 8)
    r1 = derive_point(b"session-42", p)
    assert r1 == derive_point("session-42", p)
    assert r1 != derive_point(b"session-43", p)
    r0 = derive_point(b"", p)
    assert any(r0) and len(r0) == 4
    stream = reference_digest(b"", 4 * 64)
    first = next(v for v in (int.from_bytes(stream[i : i + 4], "big") for i in range(0, 256, 4)) if v)
    assert p.ext.to_int(r0) == first


def test_derive_point_roughly_uniform():
    ext = ExtField(get_field(4), 2)
    p = SideInfoParams(ext=ext, n=10, l_max=2, p_f=0.1)
    rng = np.random.default_rng(0)
    counts = np.zeros(ext.Q, dtype=np.int64)
    for _ in range(10_000):
        sid = rng.bytes(int(rng.integers(1, 24)))
        counts[ext.to_int(derive_point(sid, p))] += 1
    assert counts[0] == 0
    assert chisquare(counts[1:]).pvalue > 1e-3


def test_evaluate_examples():
    ext = ExtField(get_field(8), 4)
    rng = np.random.default_rng(1)
    r = ext.random(rng, nonzero=True)
    assert evaluate_side_info(np.zeros(20, dtype=np.int64), r, ext) == ext.zero
    for j in (0, 1, 7, 19):
        v = np.zeros(20, dtype=np.int64)
        v[j] = 1
        assert evaluate_side_info(v, r, ext) == ext.pow(r, j)


def test_evaluate_matches_oracle():
    ext = ExtField(get_field(8), 4)
    ref = oracles.ExtOracle(oracles.Field(8, 0x11D), ext.ext_poly)
    rng = np.random.default_rng(2)
    for _ in range(10):
        v = rng.integers(0, 256, size=30)
        r = ext.random(rng)
        assert evaluate_side_info(v, r, ext) == ref.evaluate(v.tolist(), r)


def test_batched_evaluation_consistent():
    ext = ExtField(get_field(4), 3)
    rng = np.random.default_rng(3)
    V = rng.integers(0, 16, size=(12, 9))
    r = ext.random(rng, nonzero=True)
    many = evaluate_many(V, r, ext)
    for v, got in zip(V, many):
        assert tuple(int(x) for x in got) == evaluate_side_info(v, r, ext)
    R = np.array([ext.random(rng) for _ in range(25)])
    at = evaluate_at_points(V[0], R, ext)
    for rr, got in zip(R, at):
        assert tuple(int(x) for x in got) == evaluate_side_info(V[0], tuple(rr), ext)
    assert point_powers(ext, r, 9).shape == (9, 3)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_side_info_linear(data):
    ext = ExtField(get_field(4), 2)
    gf = ext.base
    n = 12
    u = np.array(data.draw(st.lists(st.integers(0, 15), min_size=n, max_size=n)))
    v = np.array(data.draw(st.lists(st.integers(0, 15), min_size=n, max_size=n)))
    a, b = data.draw(st.integers(0, 15)), data.draw(st.integers(0, 15))
    r = ext.from_int(data.draw(st.integers(1, ext.Q - 1)))
    lhs = evaluate_side_info(gf.vmul(a, u) ^ gf.vmul(b, v), r, ext)
    rhs = ext.add(ext.scale(a, evaluate_side_info(u, r, ext)), ext.scale(b, evaluate_side_info(v, r, ext)))
    assert lhs == rhs


def test_collision_bound_exhaustive_small():
    ext = ExtField(get_field(4), 2)
    n = 10
    rng = np.random.default_rng(4)
    R = np.array(list(ext.elements())[1:])
    bound = (n - 1) / (ext.Q - 1)
    for _ in range(50):
        u = rng.integers(0, 16, size=n)
        v = u.copy()
        while np.array_equal(u, v):
            v = rng.integers(0, 16, size=n)
        agree = np.all(evaluate_at_points(u ^ v, R, ext) == 0, axis=1).sum()
        assert agree / len(R) <= bound


def test_select_singleton_and_no_match():
    ext = ExtField(get_field(8), 4)
    rng = np.random.default_rng(5)
    r = ext.random(rng, nonzero=True)
    v = rng.integers(0, 256, size=16)
    assert np.array_equal(select_candidate([v], evaluate_side_info(v, r, ext), r, ext), v)
    other = v.copy()
    other[0] ^= 1
    with pytest.raises(NoMatch):
        select_candidate([other], evaluate_side_info(v, r, ext), r, ext)
    with pytest.raises(NoMatch):
        select_candidate([], ext.zero, r, ext)


def test_select_reports_ambiguity():
    # c = 1: u and u + (r, 1, 0, ...) agree at r because x + r vanishes there
    ext = ExtField(get_field(4), 1)
    r = (7,)
    u = np.array([3, 9, 1, 0, 5])
    d = np.array([7, 1, 0, 0, 0])
    with pytest.raises(AmbiguousSelection) as exc:
        select_candidate([u, u ^ d], evaluate_side_info(u, r, ext), r, ext)
    assert len(exc.value.matches) == 2


@pytest.mark.slow
def test_selection_monte_carlo_full_scale():
    """n=255, c=4: planted vector among distinct decoys, fresh r per trial."""
    params = SideInfoParams.create(255, 8, l_max=64, p_f=1e-4)
    ext = params.ext
    rng = np.random.default_rng(6)
    true = rng.integers(0, 256, size=255)
    decoys = rng.integers(0, 256, size=(3, 255))
    trials = 100_000
    R = rng.integers(0, 256, size=(trials, 4))
    R[~R.any(axis=1), 0] = 1
    target = evaluate_at_points(true, R, ext)
    wrong = 0
    for d in decoys:
        wrong += int(np.all(evaluate_at_points(d, R, ext) == target, axis=1).sum())
    assert wrong / trials <= params.p_f
