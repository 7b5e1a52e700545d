"""Channels, episodes, traceability, and world-level privacy properties."""

import json

import numpy as np
import pytest

from hidm.actors import (
    AuthorityAuditRequester,
    ChannelError,
    EpisodeError,
    HPEntity,
    PatientAuditRequester,
    Role,
    ScenarioConfig,
    TraceError,
    Warrant,
    book_appointment,
    consult_authorization,
    episode_appointment_token,
    episode_pcred,
    episode_pseudonym_key,
    episode_pseudonym_token,
    establish_channel,
    inperson_verify,
    lvc_issue,
    record_access,
    run_scenario,
    run_visit,
    setup_world,
    trace_identity,
    transcript_dump,
    verify_lvc,
    warrant_issue,
)
from hidm.actors.entities import make_entity
from hidm.actors.episodes import _canonical
from hidm.ledgers import AccessLevel, DIDDocument
from hidm.pre import pseudonym_generate, patient_keygen
from hidm.randomness import RandomSource
from hidm.signatures import ibs_sign, ibs_verify, schnorr_keygen, schnorr_sign


@pytest.fixture(scope="module")
def world():
    w = setup_world(ScenarioConfig(patients=2, visits=2, seed="actors-test"))
    return w


@pytest.fixture(scope="module")
def visited(world):
    results = [run_visit(world, world.patients[0], 0)]
    return world, results


class TestChannels:
    def test_channel_between_registered_entities(self, world):
        ch = establish_channel(world.patients[0], world.apc, world.did_ledger,
                               world.group, world.channel_log)
        echoed = ch.transfer(world.patients[0].did, b"hello")
        assert echoed == b"hello"

    def test_unregistered_did_refused(self, world):
        ghost = make_entity(
            type(world.patients[0]), Role.PATIENT, "did:hidm:ghost",
            world.group, RandomSource(seed=b"ghost"), pii={},
        )
        with pytest.raises(ChannelError, match="DID resolution failed"):
            establish_channel(ghost, world.apc, world.did_ledger, world.group, [])

    def test_stale_sequence_number_rejected(self, world):
        ch = establish_channel(world.patients[0], world.apc, world.did_ledger,
                               world.group, [])
        frame1 = ch.send(world.patients[0].did, b"one")
        ch.recv(world.apc.did, frame1)
        ch.send(world.patients[0].did, b"two")  # sender advances
        with pytest.raises(ChannelError, match="sequence"):
            ch.recv(world.apc.did, frame1)  # replayed frame


class TestLegitimacy:
    def test_genuine_lvc(self, world):
        assert verify_lvc(world.apc.lvc, "APC", world.gha.rsa_public, world.did_ledger)

    def test_role_confusion_rejected(self, world):
        assert not verify_lvc(world.hos[0].lvc, "APC", world.gha.rsa_public, world.did_ledger)

    def test_forged_signature_sweep(self, world):
        from hidm.actors.entities import LegitimacyCredential

        rng = RandomSource(seed=b"forge-lvc")
        for _ in range(50):
            fake = LegitimacyCredential("did:hidm:apc", "APC", {}, rng.read(384))
            assert not verify_lvc(fake, "APC", world.gha.rsa_public, world.did_ledger)


class TestIssuanceEpisodes:
    def test_wallet_holds_all_artifacts_after_e1_to_e4(self, visited):
        world, _ = visited
        wallet = world.patients[0].wallet
        assert wallet.pcred is not None
        assert wallet.pseudonym_token is not None
        assert wallet.pseudonym_key is not None
        assert wallet.appointment_token is not None

    def test_e2_rejects_unbound_pseudonym(self, world):
        patient = world.patients[1]
        episode_pcred(world, patient)
        episode_pseudonym_token(world, patient)  # builds a bound pseudonym
        # swap in a pseudonym generated for a different identifier
        foreign_keys = patient_keygen(world.ctx, patient.rng)
        pk_hrr = world.resolve_pre_public(world.hrr.did)
        foreign = pseudonym_generate(b"other-patient-id", foreign_keys, pk_hrr, patient.rng)
        patient.wallet.pre_keys = foreign_keys
        patient.wallet.pai = foreign
        patient.wallet.pai_nonce = 1
        # episodes surface the issuing module's own error
        from hidm.credentials import IssuanceError

        with pytest.raises(IssuanceError, match="pseudonym binding rejected"):
            episode_pseudonym_token(world, patient, fresh_pseudonym=False)

    def test_e4_issuer_transcript_contains_no_ati(self, visited):
        world, _ = visited
        token = world.patients[0].wallet.appointment_token
        e4_entries = [e for e in world.episode_log if e["episode"] == "E4"]
        assert e4_entries
        for entry in e4_entries:
            serialized = json.dumps(entry["issuer_transcript"]).encode()
            assert token.ati.hex().encode() not in serialized


class TestBookingAndVerification:
    def test_replayed_token_rejected(self, visited):
        world, _ = visited
        patient = world.patients[0]
        # token already redeemed during the visit fixture
        with pytest.raises(EpisodeError, match="replay rejected"):
            book_appointment(world, patient, world.hos[0])

    def test_inflight_mutation_breaks_signature(self, visited):
        world, _ = visited
        patient = world.patients[0]
        wallet = patient.wallet
        from hidm.pre import pai_to_json

        body = {
            "pai": json.loads(pai_to_json(wallet.pai)),
            "pk_pgen": wallet.pre_keys.pk.to_bytes().hex(),
            "at": json.loads(wallet.appointment_token.to_json()),
            "schedule": {"date": "2026-09-01", "slot": "10:00", "provider": world.hos[0].did},
        }
        sig = ibs_sign(_canonical(body), wallet.pseudonym_key, patient.rng)
        mpk = world.resolve_mpk(world.apc.did)
        pseudonym_bytes = wallet.pai.pseudonym.to_bytes()
        assert ibs_verify(_canonical(body), sig, pseudonym_bytes, mpk, world.ctx)
        body["schedule"]["slot"] = "13:00"  # man-in-the-middle edit
        assert not ibs_verify(_canonical(body), sig, pseudonym_bytes, mpk, world.ctx)

    def test_impostor_features_rejected(self, world):
        patient = world.patients[1]
        episode_pseudonym_token(world, patient)
        episode_pseudonym_key(world, patient)
        episode_appointment_token(world, patient)
        book_appointment(world, patient, world.hos[0])
        impostor = np.random.default_rng(999).standard_normal(128)
        with pytest.raises(EpisodeError, match="biometric verification failed"):
            inperson_verify(world, patient, world.hos[0], ho_capture=impostor)

    def test_pt_signed_by_non_pta_key_rejected(self, world):
        patient = world.patients[1]
        episode_pseudonym_token(world, patient)
        episode_pseudonym_key(world, patient)
        episode_appointment_token(world, patient)
        book_appointment(world, patient, world.hos[0])
        from hidm.credentials import PseudonymToken, pt_signed_bytes

        stranger = schnorr_keygen(world.group, RandomSource(seed=b"not-pta"))
        pt = patient.wallet.pseudonym_token
        forged = PseudonymToken(
            pt.pti, pt.pseudonym,
            schnorr_sign(pt_signed_bytes(pt.pti, pt.pseudonym), stranger, patient.rng),
        )
        patient.wallet.pseudonym_token = forged
        with pytest.raises(EpisodeError, match="pseudonym token invalid"):
            inperson_verify(world, patient, world.hos[0])


class TestConsultationAndAccess:
    def test_two_visit_longitudinal_continuity(self):
        world, summary = run_scenario(ScenarioConfig(patients=1, visits=2, seed="continuity"))
        first, second = summary["visits"]
        assert first["records_seen"] == 0
        assert second["records_seen"] == 1
        assert first["pseudonym"] != second["pseudonym"]

    def test_cross_patient_ciphertext_rejected(self, visited):
        world, _ = visited
        p0 = world.patients[0]
        other_keys = patient_keygen(world.ctx, p0.rng)
        pk_hrr = world.resolve_pre_public(world.hrr.did)
        other_pai = pseudonym_generate(b"someone-else-is-here", other_keys, pk_hrr, p0.rng)
        from hidm.pre import pai_to_json

        handoff = {
            "pai": json.loads(pai_to_json(other_pai)),
            "pk_pgen": other_keys.pk.to_bytes().hex(),
            "pseudonym": other_pai.pseudonym.to_bytes().hex(),
        }
        handoff["pai"]["ct"] = json.loads(pai_to_json(p0.wallet.pai))["ct"]
        with pytest.raises(EpisodeError, match="record reference invalid"):
            record_access(world, world.hps[0], handoff, "read")

    def test_read_only_professional_cannot_write(self, visited):
        world, results = visited
        reader = make_entity(
            HPEntity, Role.HP, "did:hidm:hp-readonly", world.group,
            RandomSource(seed=b"hp-readonly"), access_scope=("read",),
        )
        reader.sign_key = schnorr_keygen(world.group, reader.rng)
        doc = reader.did_document(world.group, [
            ("hp-sign", world.group.element_to_bytes(reader.sign_key.y).hex()),
        ])
        world.did_ledger.register(doc, schnorr_sign(doc.canonical_bytes(), reader.static_key, reader.rng))
        reader.lvc = lvc_issue(world.gha.rsa_key, reader.did, Role.HP.value, {"scope": ["read"]})

        code = results[0]["confirmation_code"]
        handoff = consult_authorization(world, world.hos[0], reader, code)
        assert record_access(world, reader, handoff, "read") is not None
        with pytest.raises(EpisodeError, match="insufficient authorization"):
            record_access(world, reader, handoff, "write", entry={"type": "Note", "content": "x"})


class TestTraceability:
    def test_warranted_trace_returns_exact_pii(self, visited):
        world, results = visited
        pseudonym_bytes = bytes.fromhex(results[0]["pseudonym"])
        before = len(world.auditor_ledger.records)
        warrant = warrant_issue(world.auditor, pseudonym_bytes, "court order 17")
        pii = trace_identity(world, warrant)
        assert pii == world.patients[0].pii
        assert len(world.auditor_ledger.records) == before + 2

    def test_forged_warrant_refused(self, visited):
        world, results = visited
        pseudonym_bytes = bytes.fromhex(results[0]["pseudonym"])
        stranger = make_entity(
            type(world.auditor), Role.AUDITOR, "did:hidm:fake-auditor",
            world.group, RandomSource(seed=b"fake-auth"),
        )
        unsigned = Warrant(b"\x00" * 16, pseudonym_bytes, "forged", None)
        forged = Warrant(
            unsigned.warrant_id, pseudonym_bytes, "forged",
            schnorr_sign(unsigned.signed_bytes(), stranger.static_key, stranger.rng),
        )
        with pytest.raises(TraceError, match="trace refused"):
            trace_identity(world, forged)

    def test_store_disjointness(self, visited):
        world, _ = visited
        apc_blob = world.apc.store.serialize()
        pta_blob = world.pta.store.serialize()
        for patient in world.patients:
            if patient.wallet.pai is not None:
                pseudonym_hex = patient.wallet.pai.pseudonym.to_bytes().hex().encode()
                assert pseudonym_hex not in apc_blob
            for value in patient.pii.values():
                assert value.encode() not in pta_blob


class TestWorldInvariants:
    def test_deterministic_transcripts(self):
        dumps = []
        for _ in range(2):
            w, s = run_scenario(ScenarioConfig(patients=1, visits=1, seed="determinism"))
            dumps.append(json.dumps(transcript_dump(w), sort_keys=True))
        assert dumps[0] == dumps[1]

    def test_eavesdropper_sees_no_identifiers(self, visited):
        world, _ = visited
        wire = b"".join(f.ciphertext for f in world.channel_log)
        for patient in world.patients:
            if patient.wallet.pcred is not None:
                pid = patient.wallet.pcred.patient_id
                assert pid not in wire
                assert pid.hex().encode() not in wire
        for booking in world.hos[0].bookings.values():
            ati = bytes.fromhex(booking["ati"])
            assert ati not in wire
            assert ati.hex().encode() not in wire

    def test_rotated_bookings_share_no_identifier_fields(self):
        world, summary = run_scenario(ScenarioConfig(patients=1, visits=2, seed="unlink"))
        bookings = list(world.hos[0].bookings.values())
        assert len(bookings) == 2
        a, b = bookings
        assert a["pseudonym"] != b["pseudonym"]
        assert a["pk_pgen"] != b["pk_pgen"]
        assert a["ati"] != b["ati"]
        for field in ("p1", "p2", "rk", "ct"):
            assert a["pai"][field] != b["pai"][field]

    def test_pseudonym_reuse_when_rotation_disabled(self):
        world, summary = run_scenario(
            ScenarioConfig(patients=1, visits=2, seed="reuse", rotate_pseudonyms=False)
        )
        first, second = summary["visits"]
        assert first["pseudonym"] == second["pseudonym"]

    def test_audit_tiers_and_reconciliation(self):
        world, summary = run_scenario(ScenarioConfig(patients=2, visits=1, seed="audit"))
        authority = world.auditor_ledger.query(
            AuthorityAuditRequester("authority", world.auditor.lvc)
        )
        assert not authority.auth_error
        issuance = [r for r in authority.records if "Issuance" in r.event_type]
        # four issuance events per visit: credential, token, key, appointment
        assert len(issuance) == 2 * 4
        access = [r for r in authority.records if r.event_type.startswith("HealthRecord")]
        assert len(access) == 2 * 2  # one read + one write per visit

    def test_patient_audit_query_scoped_to_own_events(self):
        world, summary = run_scenario(ScenarioConfig(patients=2, visits=1, seed="pat-query"))
        patient = world.patients[0]
        challenge = patient.rng.read(16)
        pok = __import__("hidm.proofs", fromlist=["pok_pcred_prove"]).pok_pcred_prove(
            patient.wallet.pcred.attribute_bytes(), patient.wallet.pcred.sig,
            world.resolve_cl_public(world.apc.did),
            {__import__("hidm.credentials", fromlist=["SLOT_INDEX"]).SLOT_INDEX["patient_id"]},
            challenge, patient.rng,
        )
        claim_sig = ibs_sign(challenge, patient.wallet.pseudonym_key, patient.rng)
        requester = PatientAuditRequester(
            "patient", pok, challenge,
            [(patient.wallet.pseudonym_token, claim_sig)],
        )
        result = world.auditor_ledger.query(requester)
        assert not result.auth_error
        own_pseudonym = patient.wallet.pai.pseudonym.to_bytes().hex()
        assert result.records
        assert all(r.access_level is AccessLevel.PATIENT for r in result.records)
        assert all(r.patient_identifier == own_pseudonym for r in result.records)
        other_pseudonym = world.patients[1].wallet.pai.pseudonym.to_bytes().hex()
        assert all(r.patient_identifier != other_pseudonym for r in result.records)
