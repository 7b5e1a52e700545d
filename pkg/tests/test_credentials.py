"""Artifact construction, verification, expiry policy, and the biohash."""

import numpy as np
import pytest

from hidm.credentials import (
    APCStore,
    AppointmentToken,
    AtStatus,
    BioHashParams,
    IssuanceError,
    PatientCredential,
    PTAStore,
    SLOT_INDEX,
    at_check,
    at_issue,
    biohash_enroll,
    biohash_match,
    pcred_issue,
    pcred_verify,
    pt_issue,
    pt_verify,
    PseudonymToken,
)
from hidm.pre import hrr_keygen, identity_hash, patient_keygen, pseudonym_generate
from hidm.proofs import pbp_prove, pok_pcred_prove
from hidm.randomness import RandomSource
from hidm.randomness import LogicalClock
from hidm.signatures import CLVariant, PartiallyBlindSig, cl_keygen, schnorr_keygen

PII = {"name": "Avery Example", "address": "12 Elm Street", "gov_id": "ID-0042"}
PARAMS = BioHashParams()


@pytest.fixture(scope="module")
def apc_kp():
    return cl_keygen(CLVariant.PAIRING, 6, RandomSource(seed=b"apc-issuer"))


@pytest.fixture(scope="module")
def features():
    return np.random.default_rng(11).standard_normal(128)


@pytest.fixture()
def issued(apc_kp, features, rng):
    store = APCStore()
    clock = LogicalClock()
    cred = pcred_issue(
        PII, "did:hidm:patient:avery", features, apc_kp, store, PARAMS,
        "did:hidm:apc", rng, clock,
    )
    return cred, store, clock


class TestPatientCredential:
    def test_happy_path_verifies(self, issued, apc_kp):
        cred, _, _ = issued
        assert pcred_verify(cred, apc_kp.public)

    def test_reenrollment_reuses_patient_id(self, issued, apc_kp, features, rng):
        cred, store, clock = issued
        again = pcred_issue(
            PII, "did:hidm:patient:avery", features, apc_kp, store, PARAMS,
            "did:hidm:apc", rng, clock,
        )
        assert again.patient_id == cred.patient_id
        assert again.credential_id != cred.credential_id

    def test_json_roundtrip_still_verifies(self, issued, apc_kp, ctx):
        cred, _, _ = issued
        restored = PatientCredential.from_json(cred.to_json(), ctx)
        assert restored == cred
        assert pcred_verify(restored, apc_kp.public)

    def test_failed_identity_proofing(self, apc_kp, features, rng):
        with pytest.raises(IssuanceError, match="identity proofing failed"):
            pcred_issue(
                {"name": "", "address": "x", "gov_id": "y"},
                "did:x", features, apc_kp, APCStore(), PARAMS, "did:apc",
                rng, LogicalClock(),
            )

    def test_slot_swap_rejected(self, issued, apc_kp):
        cred, _, _ = issued
        swapped = PatientCredential(
            cred.credential_id, cred.did_apc, cred.patient_id, cred.issue_date,
            cred.biohash, cred.did_patient_l, cred.sig,
        )
        assert not pcred_verify(swapped, apc_kp.public)

    def test_audit_callback_carries_patient_id(self, apc_kp, features, rng):
        events = []
        pcred_issue(
            PII, "did:x", features, apc_kp, APCStore(), PARAMS, "did:apc",
            rng, LogicalClock(), audit=lambda **kw: events.append(kw),
        )
        assert len(events) == 1
        assert events[0]["event_type"] == "PatientCredentialIssuance"
        assert "credential_id" in events[0]["event_details"]


class TestPseudonymToken:
    def _make(self, ctx, apc_kp, issued, rng, schnorr_group, wrong_pid=False):
        cred, _, _ = issued
        pta_key = schnorr_keygen(schnorr_group, rng)
        keys = patient_keygen(ctx, rng)
        hrr = hrr_keygen(ctx, rng)
        nonce = ctx.random_scalar(rng)
        pai = pseudonym_generate(cred.patient_id, keys, hrr.pk, rng, nonce=nonce)
        pid_for_proof = b"another-patient!" if wrong_pid else cred.patient_id
        h = identity_hash(ctx, pid_for_proof)
        pbp = pbp_prove(pai.pseudonym, nonce, h, keys.pk, ctx, rng)
        pok = pok_pcred_prove(
            cred.attribute_bytes(), cred.sig, apc_kp.public,
            {SLOT_INDEX["patient_id"]}, b"pt-ctx", rng,
        )
        return cred, pta_key, keys, pai, pbp, pok

    def test_honest_flow_verifies(self, ctx, apc_kp, issued, rng, schnorr_group):
        cred, pta_key, keys, pai, pbp, pok = self._make(ctx, apc_kp, issued, rng, schnorr_group)
        store = PTAStore()
        pt = pt_issue(
            cred.patient_id, pok, pai.pseudonym, pbp, pta_key, apc_kp.public,
            keys.pk, ctx, store, rng, LogicalClock(), b"pt-ctx",
        )
        assert pt_verify(pt, pta_key.y, schnorr_group)
        assert store.patient_for_pseudonym(pai.pseudonym.to_bytes()) == cred.patient_id

    def test_binding_for_other_patient_rejected(self, ctx, apc_kp, issued, rng, schnorr_group):
        cred, pta_key, keys, pai, pbp, pok = self._make(
            ctx, apc_kp, issued, rng, schnorr_group, wrong_pid=True,
        )
        with pytest.raises(IssuanceError, match="pseudonym binding rejected"):
            pt_issue(
                cred.patient_id, pok, pai.pseudonym, pbp, pta_key, apc_kp.public,
                keys.pk, ctx, PTAStore(), rng, LogicalClock(), b"pt-ctx",
            )

    def test_pta_store_schema_has_no_pii(self, ctx, apc_kp, issued, rng, schnorr_group):
        cred, pta_key, keys, pai, pbp, pok = self._make(ctx, apc_kp, issued, rng, schnorr_group)
        store = PTAStore()
        pt_issue(
            cred.patient_id, pok, pai.pseudonym, pbp, pta_key, apc_kp.public,
            keys.pk, ctx, store, rng, LogicalClock(), b"pt-ctx",
        )
        blob = store.serialize().decode()
        for value in PII.values():
            assert value not in blob
        assert set(blob) and "name" not in blob

    def test_pt_json_roundtrip(self, ctx, apc_kp, issued, rng, schnorr_group):
        cred, pta_key, keys, pai, pbp, pok = self._make(ctx, apc_kp, issued, rng, schnorr_group)
        pt = pt_issue(
            cred.patient_id, pok, pai.pseudonym, pbp, pta_key, apc_kp.public,
            keys.pk, ctx, PTAStore(), rng, LogicalClock(), b"pt-ctx",
        )
        restored = PseudonymToken.from_json(pt.to_json(), ctx)
        assert restored == pt
        assert pt_verify(restored, pta_key.y, schnorr_group)


class TestAppointmentToken:
    def _issue(self, apc_kp, issued, schnorr_group, seed=b"at"):
        cred, _, clock = issued
        rng = RandomSource(seed=seed)
        apc_sig_key = schnorr_keygen(schnorr_group, rng.child("apc"))
        pok = pok_pcred_prove(
            cred.attribute_bytes(), cred.sig, apc_kp.public,
            {SLOT_INDEX["patient_id"]}, b"at-ctx", rng,
        )
        at, transcript = at_issue(
            pok, apc_kp.public, apc_sig_key, rng.child("user"), rng.child("apc-rng"),
            clock, b"at-ctx",
        )
        return at, transcript, apc_sig_key, clock

    def test_honest_token_valid_with_policy_window(self, apc_kp, issued, schnorr_group):
        at, _, key, clock = self._issue(apc_kp, issued, schnorr_group)
        now = clock.now()
        assert at.exp > now
        assert at.exp - now <= 24 * 3600
        assert at_check(at, now, key.y, schnorr_group) is AtStatus.VALID

    def test_issuer_log_contains_no_ati(self, apc_kp, issued, schnorr_group):
        at, transcript, _, _ = self._issue(apc_kp, issued, schnorr_group)
        view = repr(sorted(transcript.fields().items())).encode()
        assert at.ati.hex().encode() not in view
        assert at.ati not in view

    def test_distinct_atis(self, apc_kp, issued, schnorr_group):
        seen = set()
        for i in range(10):
            at, _, _, _ = self._issue(apc_kp, issued, schnorr_group, seed=b"at-%d" % i)
            seen.add(at.ati)
        assert len(seen) == 10

    def test_expiry_boundaries(self, apc_kp, issued, schnorr_group):
        at, _, key, _ = self._issue(apc_kp, issued, schnorr_group)
        skew = 120
        assert at_check(at, at.exp - 1, key.y, schnorr_group) is AtStatus.VALID
        assert at_check(at, at.exp + skew, key.y, schnorr_group) is AtStatus.VALID
        assert at_check(at, at.exp + skew + 1, key.y, schnorr_group) is AtStatus.EXPIRED

    def test_mutated_signature_flagged(self, apc_kp, issued, schnorr_group):
        at, _, key, _ = self._issue(apc_kp, issued, schnorr_group)
        bad = AppointmentToken(
            at.ati, at.exp,
            PartiallyBlindSig((at.sig.c + 1) % schnorr_group.q, at.sig.s, at.sig.t),
        )
        assert at_check(bad, at.exp - 10, key.y, schnorr_group) is AtStatus.BAD_SIGNATURE

    def test_json_roundtrip(self, apc_kp, issued, schnorr_group):
        at, _, key, _ = self._issue(apc_kp, issued, schnorr_group)
        restored = AppointmentToken.from_json(at.to_json())
        assert restored == at
        assert at_check(restored, at.exp - 10, key.y, schnorr_group) is AtStatus.VALID


class TestBioHash:
    def test_deterministic(self, features):
        assert biohash_enroll(features, PARAMS) == biohash_enroll(features, PARAMS)

    def test_negation_gives_complement(self, features):
        a = int.from_bytes(biohash_enroll(features, PARAMS), "big")
        b = int.from_bytes(biohash_enroll(-features, PARAMS), "big")
        assert a ^ b == (1 << 256) - 1

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            biohash_enroll(np.zeros(64), PARAMS)

    def test_exact_resample_matches(self, features):
        enrolled = biohash_enroll(features, PARAMS)
        assert biohash_match(enrolled, features, PARAMS)

    def test_genuine_monte_carlo_calibration(self):
        # the tau = 32 threshold must admit sigma = 0.05 noise >= 99% of the time
        gen = np.random.default_rng(2026)
        accepted = 0
        trials = 1000
        for _ in range(trials):
            base = gen.standard_normal(128)
            enrolled = biohash_enroll(base, PARAMS)
            noisy = base + 0.05 * gen.standard_normal(128)
            accepted += biohash_match(enrolled, noisy, PARAMS)
        assert accepted >= 0.99 * trials

    def test_impostor_sweep(self):
        gen = np.random.default_rng(77)
        rejected = 0
        trials = 1000
        for _ in range(trials):
            enrolled = biohash_enroll(gen.standard_normal(128), PARAMS)
            rejected += not biohash_match(enrolled, gen.standard_normal(128), PARAMS)
        assert rejected >= 0.999 * trials
