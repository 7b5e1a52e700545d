"""Credential possession proofs and the pseudonym binding proof."""

import pytest

from hidm.pre import Pseudonym, identity_hash, patient_keygen, pseudonym_generate, hrr_keygen
from hidm.proofs import (
    PBProof,
    PoKPCred,
    ProofError,
    _pbp_challenge,
    pbp_prove,
    pbp_verify,
    pok_pcred_prove,
    pok_pcred_verify,
)
from hidm.randomness import RandomSource
from hidm.signatures import CLVariant, cl_keygen, cl_sign

ATTRS = [b"cred-id-16bytes!", b"did:hidm:patient:long", b"patient-id-0001",
         b"1755000000", b"biohash-bits", b"did:hidm:apc"]
SLOT_PATIENT_ID = 2
SLOT_BIOHASH = 4


@pytest.fixture(scope="module")
def pairing_kp():
    return cl_keygen(CLVariant.PAIRING, 6, RandomSource(seed=b"pok-pairing"))


@pytest.fixture(scope="module")
def rsa_kp():
    return cl_keygen(CLVariant.RSA, 6, RandomSource())


@pytest.fixture(scope="module")
def pairing_sig(pairing_kp):
    return cl_sign(ATTRS, pairing_kp, RandomSource(seed=b"pok-sig"))


@pytest.fixture(scope="module")
def rsa_sig(rsa_kp):
    return cl_sign(ATTRS, rsa_kp, RandomSource(seed=b"pok-sig-rsa"))


def _kp_sig(variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig):
    if variant == "pairing":
        return pairing_kp, pairing_sig
    return rsa_kp, rsa_sig


@pytest.mark.parametrize("variant", ["pairing", "rsa"])
class TestPoKPCred:
    def test_disclose_patient_id(self, variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig, rng):
        kp, sig = _kp_sig(variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig)
        proof = pok_pcred_prove(ATTRS, sig, kp.public, {SLOT_PATIENT_ID}, b"ctx-1", rng)
        assert proof.disclosed == {SLOT_PATIENT_ID: ATTRS[SLOT_PATIENT_ID]}
        assert pok_pcred_verify(proof, kp.public, b"ctx-1")

    def test_disclose_biohash_reveals_nothing_else(self, variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig, rng):
        kp, sig = _kp_sig(variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig)
        proof = pok_pcred_prove(ATTRS, sig, kp.public, {SLOT_BIOHASH}, b"checkin", rng)
        assert set(proof.disclosed) == {SLOT_BIOHASH}
        serialized = repr(sorted(proof.body.items())).encode()
        for i, attr in enumerate(ATTRS):
            if i != SLOT_BIOHASH:
                assert attr not in serialized
                assert attr.hex().encode() not in serialized
        assert pok_pcred_verify(proof, kp.public, b"checkin")

    def test_context_replay_rejected(self, variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig, rng):
        kp, sig = _kp_sig(variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig)
        proof = pok_pcred_prove(ATTRS, sig, kp.public, {SLOT_PATIENT_ID}, b"session-a", rng)
        assert not pok_pcred_verify(proof, kp.public, b"session-b")

    def test_altered_disclosed_value_rejected(self, variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig, rng):
        kp, sig = _kp_sig(variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig)
        proof = pok_pcred_prove(ATTRS, sig, kp.public, {SLOT_PATIENT_ID}, b"ctx", rng)
        forged = PoKPCred(proof.scheme, {SLOT_PATIENT_ID: b"someone-else"}, proof.body)
        assert not pok_pcred_verify(forged, kp.public, b"ctx")

    def test_wrong_issuer_rejected(self, variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig, rng):
        kp, sig = _kp_sig(variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig)
        other = cl_keygen(
            kp.variant, 6,
            RandomSource(seed=b"other-issuer") if variant == "pairing" else RandomSource(),
        )
        proof = pok_pcred_prove(ATTRS, sig, kp.public, {SLOT_PATIENT_ID}, b"ctx", rng)
        assert not pok_pcred_verify(proof, other.public, b"ctx")

    def test_invalid_credential_refused_before_emission(self, variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig, rng):
        kp, sig = _kp_sig(variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig)
        wrong_attrs = list(ATTRS)
        wrong_attrs[0] = b"tampered"
        with pytest.raises(ProofError, match="invalid credential"):
            pok_pcred_prove(wrong_attrs, sig, kp.public, {SLOT_PATIENT_ID}, b"ctx", rng)

    def test_proofs_pairwise_distinct(self, variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig):
        kp, sig = _kp_sig(variant, pairing_kp, pairing_sig, rsa_kp, rsa_sig)
        bodies = []
        for i in range(4):
            proof = pok_pcred_prove(
                ATTRS, sig, kp.public, {SLOT_PATIENT_ID}, b"ctx",
                RandomSource(seed=b"zk-%d" % i),
            )
            bodies.append(proof.body)
        for key in bodies[0]:
            if key == "s_m":
                values = [tuple(sorted(b[key].items())) for b in bodies]
            else:
                values = [b[key] for b in bodies]
            assert len(set(map(str, values))) == len(bodies), f"field {key} repeats"


class TestPBP:
    def _setup(self, ctx, rng, nonce=None):
        keys = patient_keygen(ctx, rng)
        hrr = hrr_keygen(ctx, rng)
        patient_id = b"patient-under-proof"
        h = identity_hash(ctx, patient_id)
        pai = pseudonym_generate(patient_id, keys, hrr.pk, rng, nonce=nonce)
        return keys, h, pai

    def test_honest_proof_verifies(self, ctx, rng):
        keys, h, pai = self._setup(ctx, rng)
        nonce = None
        # reconstruct nonce-free: generate with explicit nonce instead
        nonce = ctx.random_scalar(rng)
        pai = pseudonym_generate(b"patient-under-proof", keys, (1 * ctx.g1), rng, nonce=nonce)
        proof = pbp_prove(pai.pseudonym, nonce, h, keys.pk, ctx, rng)
        assert pbp_verify(pai.pseudonym, proof, keys.pk, h, ctx)

    def test_degenerate_zero_nonce(self, ctx, rng):
        keys, h, pai = self._setup(ctx, rng, nonce=0)
        proof = pbp_prove(pai.pseudonym, 0, h, keys.pk, ctx, rng)
        assert pbp_verify(pai.pseudonym, proof, keys.pk, h, ctx)

    def test_wrong_identifier_hash_rejected(self, ctx, rng):
        keys, h, pai = self._setup(ctx, rng, nonce=424242)
        proof = pbp_prove(pai.pseudonym, 424242, h, keys.pk, ctx, rng)
        assert not pbp_verify(pai.pseudonym, proof, keys.pk, (h + 1) % ctx.r, ctx)

    def test_field_mutation_sweep(self, ctx, rng):
        keys, h, pai = self._setup(ctx, rng, nonce=99)
        p = pbp_prove(pai.pseudonym, 99, h, keys.pk, ctx, rng)
        mutants = [
            PBProof(p.t1 * ctx.z, p.t2, p.c, p.s1, p.s2),
            PBProof(p.t1, p.t2 + keys.pk, p.c, p.s1, p.s2),
            PBProof(p.t1, p.t2, (p.c + 1) % ctx.r, p.s1, p.s2),
            PBProof(p.t1, p.t2, p.c, (p.s1 + 1) % ctx.r, p.s2),
            PBProof(p.t1, p.t2, p.c, p.s1, (p.s2 + 1) % ctx.r),
        ]
        for m in mutants:
            assert not pbp_verify(pai.pseudonym, m, keys.pk, h, ctx)

    def test_toy_exponent_arithmetic_oracle(self, toy_ctx):
        # recompute both verification equations by direct exponent arithmetic
        rng = RandomSource(seed=b"toy-pbp")
        r_mod = toy_ctx.r
        x = 987654321
        pk = toy_ctx.g2_base_mul(x)
        nonce, h = 1234567, 7654321
        pseudonym = Pseudonym(toy_ctx.z_pow(nonce + h), nonce * pk)
        proof = pbp_prove(pseudonym, nonce, h, pk, toy_ctx, rng)
        assert pbp_verify(pseudonym, proof, pk, h, toy_ctx)
        c = proof.c
        # equation 1 exponents: s1 == log(T1) + c * nonce
        t1_exp = (proof.s1 - c * nonce) % r_mod
        assert toy_ctx.z_pow(t1_exp) == proof.t1
        # equation 2 exponents over the transparent G2: s2*x == t2*x + c*nonce*x
        t2_exp = proof.t2.raw  # equals t2 * x mod r
        assert (proof.s2 * x) % r_mod == (t2_exp + c * nonce * x) % r_mod

    def test_strict_mode_roundtrip(self, ctx, rng):
        keys, h, pai = self._setup(ctx, rng, nonce=31337)
        proof = pbp_prove(pai.pseudonym, 31337, h, keys.pk, ctx, rng, strict=True)
        assert proof.strict
        assert pbp_verify(pai.pseudonym, proof, keys.pk, h, ctx)

    def test_mismatched_nonces_pass_default_but_fail_strict(self, ctx, rng):
        # known looseness of the two-response form: P1 and P2 may use
        # different nonces; the strict single-response mode closes it
        keys = patient_keygen(ctx, rng)
        h = identity_hash(ctx, b"pid")
        r_a, r_b = 1111, 2222
        mixed = Pseudonym(ctx.z_pow((r_a + h) % ctx.r), r_b * keys.pk)
        t1n, t2n = ctx.random_scalar(rng), ctx.random_scalar(rng)
        commit1, commit2 = ctx.z_pow(t1n), t2n * keys.pk
        c = _pbp_challenge(ctx, mixed, commit1, commit2, keys.pk, h)
        forged = PBProof(commit1, commit2, c,
                         (t1n + c * r_a) % ctx.r, (t2n + c * r_b) % ctx.r)
        assert pbp_verify(mixed, forged, keys.pk, h, ctx)  # passes as specified
        strict_attempt = PBProof(commit1, commit2, c, (t1n + c * r_a) % ctx.r, None)
        assert not pbp_verify(mixed, strict_attempt, keys.pk, h, ctx)
