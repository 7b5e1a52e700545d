"""Blind IBS and CL credential signature behaviour."""

import pytest

from hidm.randomness import RandomSource
from hidm.signatures import (
    CLError,
    CLVariant,
    IbsError,
    cl_keygen,
    cl_sign,
    cl_verify,
    ibs_blind_extract,
    ibs_extract_direct,
    ibs_keygen,
    ibs_sign,
    ibs_verify,
    identity_point,
    key_matches_identity,
)
from hidm.signatures.ibs import ibs_issuer_extract


@pytest.fixture(scope="module")
def master(ctx):
    return ibs_keygen(ctx, RandomSource(seed=b"ibs-master"))


PSEUDONYM = b"pseudonym-serialization-under-test"


class TestBlindIBS:
    def test_extracted_key_passes_pairing_identity(self, master, rng):
        key, _ = ibs_blind_extract(PSEUDONYM, master, rng)
        assert key_matches_identity(key, master.mpk)

    def test_blind_equals_direct_oracle(self, master):
        for i in range(10):
            identity = b"patient-pseudonym-%d" % i
            blind_key, _ = ibs_blind_extract(identity, master, RandomSource(seed=b"ex-%d" % i))
            direct = ibs_extract_direct(identity, master)
            assert blind_key.d == direct.d

    def test_issuer_views_randomized(self, master):
        _, view_a = ibs_blind_extract(PSEUDONYM, master, RandomSource(seed=b"a"))
        _, view_b = ibs_blind_extract(PSEUDONYM, master, RandomSource(seed=b"b"))
        assert view_a["blinded_identity"] != view_b["blinded_identity"]

    def test_issuer_view_hides_identity_point(self, master, ctx, rng):
        _, view = ibs_blind_extract(PSEUDONYM, master, rng)
        q = identity_point(ctx, PSEUDONYM)
        assert view["blinded_identity"] != q.to_bytes().hex()

    def test_issuer_rejects_identity_element(self, master, ctx):
        with pytest.raises(IbsError):
            ibs_issuer_extract(0 * ctx.g1, master)

    def test_sign_verify_roundtrip(self, master, ctx, rng):
        key, _ = ibs_blind_extract(PSEUDONYM, master, rng)
        sig = ibs_sign(b"book me a slot", key, rng)
        assert ibs_verify(b"book me a slot", sig, PSEUDONYM, master.mpk, ctx)

    def test_wrong_identity_rejected(self, master, ctx, rng):
        key, _ = ibs_blind_extract(PSEUDONYM, master, rng)
        sig = ibs_sign(b"msg", key, rng)
        assert not ibs_verify(b"msg", sig, b"different-pseudonym", master.mpk, ctx)

    def test_mutated_signature_rejected(self, master, ctx, rng):
        key, _ = ibs_blind_extract(PSEUDONYM, master, rng)
        u, v = ibs_sign(b"msg", key, rng)
        assert not ibs_verify(b"msg", (u + ctx.g1, v), PSEUDONYM, master.mpk, ctx)
        assert not ibs_verify(b"msg", (u, v + ctx.g1), PSEUDONYM, master.mpk, ctx)
        assert not ibs_verify(b"other", (u, v), PSEUDONYM, master.mpk, ctx)

    def test_malformed_signature_returns_false(self, master, ctx):
        assert not ibs_verify(b"msg", (None, None), PSEUDONYM, master.mpk, ctx)
        assert not ibs_verify(b"msg", "junk", PSEUDONYM, master.mpk, ctx)


ATTRS = [b"cred-id", b"did:hidm:patient", b"patient-id-bytes", b"2026-01-01", b"biohash", b"did:hidm:apc"]


@pytest.fixture(scope="module")
def pairing_keypair():
    return cl_keygen(CLVariant.PAIRING, 6, RandomSource(seed=b"cl-pairing-key"))


@pytest.fixture(scope="module")
def rsa_keypair():
    return cl_keygen(CLVariant.RSA, 6, RandomSource())


class TestCLSignatures:
    @pytest.mark.parametrize("variant", ["pairing", "rsa"])
    def test_six_attribute_roundtrip(self, variant, pairing_keypair, rsa_keypair, rng):
        kp = pairing_keypair if variant == "pairing" else rsa_keypair
        sig = cl_sign(ATTRS, kp, rng)
        assert cl_verify(ATTRS, sig, kp.public)

    @pytest.mark.parametrize("variant", ["pairing", "rsa"])
    def test_single_attribute_change_rejected(self, variant, pairing_keypair, rsa_keypair, rng):
        kp = pairing_keypair if variant == "pairing" else rsa_keypair
        sig = cl_sign(ATTRS, kp, rng)
        for i in range(6):
            mutated = list(ATTRS)
            mutated[i] = mutated[i] + b"!"
            assert not cl_verify(mutated, sig, kp.public)

    def test_attribute_reorder_rejected(self, pairing_keypair, rng):
        sig = cl_sign(ATTRS, pairing_keypair, rng)
        reordered = [ATTRS[1], ATTRS[0]] + ATTRS[2:]
        assert not cl_verify(reordered, sig, pairing_keypair.public)

    def test_pairing_sig_substantially_smaller_than_rsa(self, pairing_keypair, rsa_keypair, rng):
        sp = cl_sign(ATTRS, pairing_keypair, rng)
        sr = cl_sign(ATTRS, rsa_keypair, rng)
        assert len(sp.to_bytes()) * 4 < len(sr.to_bytes())

    def test_cross_variant_verify_rejected(self, pairing_keypair, rsa_keypair, rng):
        sp = cl_sign(ATTRS, pairing_keypair, rng)
        sr = cl_sign(ATTRS, rsa_keypair, rng)
        assert not cl_verify(ATTRS, sp, rsa_keypair.public)
        assert not cl_verify(ATTRS, sr, pairing_keypair.public)

    def test_wrong_slot_count_raises(self, pairing_keypair, rng):
        with pytest.raises(CLError):
            cl_sign(ATTRS[:4], pairing_keypair, rng)

    def test_wrong_slot_count_verify_false(self, pairing_keypair, rng):
        sig = cl_sign(ATTRS, pairing_keypair, rng)
        assert not cl_verify(ATTRS[:4], sig, pairing_keypair.public)

    def test_signatures_randomized(self, pairing_keypair):
        a = cl_sign(ATTRS, pairing_keypair, RandomSource(seed=b"sig-a"))
        b = cl_sign(ATTRS, pairing_keypair, RandomSource(seed=b"sig-b"))
        assert a.to_bytes() != b.to_bytes()

    def test_seeded_rsa_keygen_deterministic(self):
        a = cl_keygen(CLVariant.RSA, 2, RandomSource(seed=b"det"), self_test=False)
        b = cl_keygen(CLVariant.RSA, 2, RandomSource(seed=b"det"), self_test=False)
        assert a.public.n == b.public.n
