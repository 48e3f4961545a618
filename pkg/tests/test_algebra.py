"""Group-layer contracts: bilinearity, symmetry, counters, ledger,
hashing, randomness, serialization, and backend parity."""

import random

import pytest

from rbe import errors
from rbe.algebra import (
    SUPPORTED_SECURITY_LEVELS,
    available_backends,
    decode_record,
    encode_element,
    encode_scalar,
    setup_pairing,
)


# -- setup ---------------------------------------------------------------------

def test_setup_rejects_unsupported_level():
    with pytest.raises(errors.UnsupportedSecurityLevel):
        setup_pairing(57)


@pytest.mark.parametrize("level", SUPPORTED_SECURITY_LEVELS)
def test_setup_order_is_prime_and_large_enough(level):
    # the reference instantiation used a 160-bit order; BLS12-381 exceeds it
    ctx = setup_pairing(level)
    q = ctx.q
    assert q.bit_length() >= 160
    assert pow(2, q - 1, q) == 1  # Fermat witness; q is a known curve order
    assert q % 2 == 1


def test_setup_deterministic_generator_serialization():
    a = setup_pairing(128)
    b = setup_pairing(128)
    assert a.g.serialize() == b.g.serialize()
    assert a.gt.serialize() == b.gt.serialize()


def test_non_degeneracy(ctx):
    assert ctx.pair(ctx.g, ctx.g) != ctx.one_gt()
    assert ctx.pair(ctx.g, ctx.g) == ctx.gt


def test_context_carries_profile_metadata(ctx):
    assert ctx.security_level == 128
    assert ctx.hash_width is None   # unbounded hash input domain
    assert ctx.scalar_len == 32


# -- group laws ------------------------------------------------------------------

def test_pairing_bilinear_on_small_exponents(ctx):
    two = ctx.exp(ctx.g, 2)
    three = ctx.exp(ctx.g, 3)
    assert ctx.pair(two, three) == ctx.exp(ctx.gt, 6)


def test_pairing_bilinear_random(ctx, rng):
    for _ in range(100):
        a = rng.randrange(1, ctx.q)
        b = rng.randrange(1, ctx.q)
        lhs = ctx.pair(ctx.exp(ctx.g, a), ctx.exp(ctx.g, b))
        assert lhs == ctx.exp(ctx.gt, a * b % ctx.q)


def test_pairing_symmetric(ctx, rng):
    for _ in range(20):
        x = ctx.exp(ctx.g, rng.randrange(1, ctx.q))
        y = ctx.exp(ctx.g, rng.randrange(1, ctx.q))
        assert ctx.pair(x, y) == ctx.pair(y, x)


def test_generator_order(ctx):
    assert ctx.exp(ctx.g, 0) == ctx.identity_g1()
    assert ctx.exp(ctx.g, ctx.q) == ctx.identity_g1()
    assert ctx.exp(ctx.gt, ctx.q) == ctx.one_gt()
    assert ctx.mul(ctx.exp(ctx.g, ctx.q - 1), ctx.g) == ctx.identity_g1()


def test_mul_div_inverse_relations(ctx):
    a = ctx.exp(ctx.g, 11)
    b = ctx.exp(ctx.g, 4)
    assert ctx.mul(a, b) == ctx.exp(ctx.g, 15)
    assert ctx.div(a, b) == ctx.exp(ctx.g, 7)
    ta = ctx.exp(ctx.gt, 11)
    tb = ctx.exp(ctx.gt, 4)
    assert ctx.div(ta, tb) == ctx.exp(ctx.gt, 7)


def test_cross_context_rejected(ctx):
    other = setup_pairing(128)
    with pytest.raises(errors.CrossContextError):
        ctx.mul(ctx.g, other.g)
    with pytest.raises(errors.CrossContextError):
        ctx.pair(ctx.g, other.g)


def test_mixed_group_mul_rejected(ctx):
    with pytest.raises(TypeError):
        ctx.mul(ctx.g, ctx.gt)


# -- counters ----------------------------------------------------------------------

def test_counter_exactness(ctx, rng):
    x = ctx.exp(ctx.g, 5)
    with ctx.measure() as ops:
        for _ in range(7):
            ctx.exp(x, 3)
        ctx.mul(x, x)
        ctx.pair(x, x)
        ctx.exp(ctx.gt, 9)
        ctx.hash_to_scalar(b"zz")
    assert ops.exp_g1 == 7
    assert ops.mul_g1 == 1
    assert ops.pairings == 1
    assert ops.exp_gt == 1
    assert ops.hashes == 1
    assert ops.mul_gt == 0


def test_counter_monotone_and_snapshot(ctx):
    before = ctx.counter.snapshot()
    ctx.exp(ctx.g, 2)
    after = ctx.counter.snapshot()
    diff = after - before
    assert diff.exp_g1 == 1
    assert after.exp_g1 >= before.exp_g1


def test_sampling_is_uncounted(ctx, rng):
    with ctx.measure() as ops:
        ctx.sample_gt(rng)
    assert ops.as_dict() == {k: 0 for k in ops.as_dict()}


# -- exponent ledger -----------------------------------------------------------------

def test_ledger_soundness_over_op_mix(ctx, rng):
    a = ctx.exp(ctx.g, rng.randrange(1, ctx.q))
    b = ctx.exp(ctx.g, rng.randrange(1, ctx.q))
    for el in (a, b, ctx.mul(a, b), ctx.div(a, b), ctx.pair(a, b),
               ctx.exp(ctx.gt, 77), ctx.sample_gt(rng)):
        assert ctx.ledger_check(el)


def test_ledger_registry_collects_elements(rng):
    c = setup_pairing(128, ledger=True)
    c.clear_ledger_registry()
    c.exp(c.g, 3)
    c.pair(c.g, c.g)
    assert len(c.ledger_elements) >= 2
    assert all(c.ledger_check(el) for el in c.ledger_elements)


def test_ledger_absent_when_disabled():
    c = setup_pairing(128)
    el = c.exp(c.g, 3)
    assert el.log is None
    with pytest.raises(ValueError):
        c.ledger_check(el)


# -- hash_to_scalar --------------------------------------------------------------------

def test_hash_deterministic(ctx):
    assert ctx.hash_to_scalar(b"payload") == ctx.hash_to_scalar(b"payload")
    assert ctx.hash_to_scalar("org1:alice") == ctx.hash_to_scalar("org1:alice")


def test_hash_range(ctx):
    for data in (b"x", "org1:alice", b"\x00\x00", "é"):
        n = ctx.hash_to_scalar(data)
        assert 1 <= n <= ctx.q - 1


def test_hash_distinct_inputs_distinct_outputs(ctx):
    # collision at test scale would falsify the collision-resistance contract
    assert ctx.hash_to_scalar("a") != ctx.hash_to_scalar("b")
    seen = {ctx.hash_to_scalar(f"user{i}") for i in range(200)}
    assert len(seen) == 200


def test_hash_rejects_empty(ctx):
    with pytest.raises(ValueError):
        ctx.hash_to_scalar(b"")


# -- rand_nonzero_scalar -----------------------------------------------------------------

def test_rand_scalar_range(ctx):
    r = random.Random(99)
    draws = [ctx.rand_nonzero_scalar(r) for _ in range(10_000)]
    assert all(1 <= d <= ctx.q - 1 for d in draws)


def test_rand_scalar_seed_reproducible(ctx):
    a = [ctx.rand_nonzero_scalar(random.Random(5)) for _ in range(10)]
    b = [ctx.rand_nonzero_scalar(random.Random(5)) for _ in range(10)]
    assert a == b


def test_rand_scalar_mean_near_half_of_q(ctx):
    r = random.Random(7)
    n = 10_000
    mean = sum(ctx.rand_nonzero_scalar(r) for _ in range(n)) / n / ctx.q
    assert abs(mean - 0.5) < 0.05


# -- serialization --------------------------------------------------------------------------

def test_element_round_trip(ctx, rng):
    x = ctx.exp(ctx.g, rng.randrange(1, ctx.q))
    t = ctx.exp(ctx.gt, rng.randrange(1, ctx.q))
    assert ctx.deserialize_g1(x.serialize()) == x
    assert ctx.deserialize_gt(t.serialize()) == t


def test_element_lengths_fixed(ctx, rng):
    lens_g1 = {len(ctx.exp(ctx.g, rng.randrange(ctx.q)).serialize())
               for _ in range(5)}
    lens_g1.add(len(ctx.identity_g1().serialize()))
    assert lens_g1 == {ctx.g1_elem_len}
    assert len(ctx.one_gt().serialize()) == ctx.gt_elem_len


def test_identity_round_trip(ctx):
    assert ctx.deserialize_g1(ctx.identity_g1().serialize()) == ctx.identity_g1()


def test_wire_records(ctx, rng):
    x = ctx.exp(ctx.g, 31337)
    rec = encode_element(x)
    assert rec[0] == 0x01
    assert decode_record(ctx, rec) == x
    t = ctx.exp(ctx.gt, 99)
    rec_t = encode_element(t)
    assert rec_t[0] == 0x02
    assert decode_record(ctx, rec_t) == t
    s = encode_scalar(123456789, ctx)
    assert s[0] == 0x03
    assert decode_record(ctx, s) == 123456789


def test_wire_rejects_garbage(ctx):
    with pytest.raises(errors.EncodingError):
        decode_record(ctx, b"\x01\x00\x05hello")
    rec = encode_element(ctx.exp(ctx.g, 5))
    with pytest.raises(errors.EncodingError):
        decode_record(ctx, rec + b"junk")
    with pytest.raises(errors.EncodingError):
        decode_record(ctx, bytes([0x09]) + rec[1:])


# -- backend parity -----------------------------------------------------------------------------

@pytest.mark.skipif("py_ecc" not in available_backends(),
                    reason="pure-python backend unavailable")
def test_py_ecc_full_scheme_roundtrip(rng):
    import warnings
    from rbe import envelope, so_rbe
    from rbe.hierarchy import build_hierarchy

    c = setup_pairing(128, backend="py_ecc")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        h = build_hierarchy("X", ["a", "b", "s"], [("a", "b")])
    msk, pp, lp = so_rbe.init_org(c, "X", rng)
    _, pks, rsecs = so_rbe.gen_role_params(pp, h, rng)
    cred = so_rbe.gen_user_keys(pp, msk, "u", rng)
    rk = so_rbe.gen_role_key(pp, rsecs[h.role("a")], lp, cred.secret_point, "u")
    key, kem = so_rbe.kem_encrypt(pp, pks[h.role("b")], rng)
    sealed = envelope.seal(b"fallback", key, rng)
    trk, blind = so_rbe.transform_role_key(c, rk, rng)
    pd = so_rbe.cloud_partial_decrypt(c, kem, trk, cred.pub, h.role("a"), h)
    got = so_rbe.finalize_decrypt(c, kem.masked_key, pd, blind, cred.priv)
    assert envelope.open_sealed(sealed, got) == b"fallback"
    data = envelope.pack_ciphertext(kem, sealed)
    kem2, sealed2 = envelope.unpack_ciphertext(c, data)
    assert envelope.pack_ciphertext(kem2, sealed2) == data


@pytest.mark.skipif("py_ecc" not in available_backends(),
                    reason="pure-python backend unavailable")
def test_py_ecc_backend_parity():
    # same curve order, same contracts; small exponents keep it quick
    c = setup_pairing(128, backend="py_ecc", ledger=True)
    fast = setup_pairing(128)
    assert c.q == fast.q
    a = c.exp(c.g, 6)
    b = c.exp(c.g, 7)
    assert c.pair(a, b) == c.exp(c.gt, 42)
    assert c.pair(a, b) == c.pair(b, a)
    assert c.deserialize_g1(a.serialize()) == a
    assert c.ledger_check(c.mul(a, b))
    with c.measure() as ops:
        c.exp(a, 3)
        c.pair(a, b)
    assert (ops.exp_g1, ops.pairings) == (1, 1)
