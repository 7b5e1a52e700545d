"""The eight protocol episodes.

E1-E4 are issuance flows (credential, pseudonym token, pseudonym-specific
key, appointment token), E5-E6 are the booking and in-person checks at a
healthcare organization, E7 hands the visit context to a professional,
and E8 reads or extends the longitudinal record at the repository.  Every
message crosses a freshly established mutually authenticated channel, and
every episode appends its audit records; a failed check aborts with a
named reason and logs nothing as issued.
"""

from __future__ import annotations

import json

import numpy as np

from ..credentials import (
    AtStatus,
    AppointmentToken,
    PatientCredential,
    PseudonymToken,
    SLOT_INDEX,
    at_check,
    biohash_enroll,
    biohash_match,
    pcred_issue,
    pcred_verify,
    pt_issue,
    pt_verify,
)
from ..ledgers import ATIStatus, AccessLevel
from ..pre import (
    PREError,
    HRRPseudonym,
    hrr_recover,
    identity_hash,
    pai_from_json,
    pai_to_json,
    patient_keygen,
    pseudonym_generate,
    rk_check,
    transform_to_hrr,
)
from ..proofs import (
    pbp_prove,
    pbp_from_dict,
    pbp_to_dict,
    pok_from_dict,
    pok_pcred_prove,
    pok_pcred_verify,
    pok_to_dict,
)
from ..signatures import (
    ibs_blind_extract,
    ibs_sign,
    ibs_verify,
    identity_point,
    key_matches_identity,
    pbs_verify,
    schnorr_sign,
    schnorr_verify,
)
from ..signatures.ibs import IBSUserKey, ibs_issuer_extract
from ..signatures.pbs import PbsSignerSession, PbsUserSession
from ..signatures.schnorr import SchnorrSig
from .channel import establish_channel
from .entities import LegitimacyCredential, Role, verify_lvc


class EpisodeError(Exception):
    """Episode abort with the failing check's named reason."""


def _require(ok, reason):
    if not ok:
        raise EpisodeError(reason)


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True).encode()


def _xfer(channel, sender_did: str, obj) -> dict:
    return json.loads(channel.transfer(sender_did, _canonical(obj)))


def _open(world, a, b):
    return establish_channel(a, b, world.did_ledger, world.group, world.channel_log)


def _audit_fn(world, entity):
    def append(event_type, access_level, patient_identifier, event_details,
               healthcare_professional_identifier=None):
        world.auditor_ledger.append(
            origin_module=entity.role.value,
            origin_credential=entity.lvc,
            event_type=event_type,
            access_level=AccessLevel(access_level),
            patient_identifier=patient_identifier,
            event_details=event_details,
            healthcare_professional_identifier=healthcare_professional_identifier,
        )

    return append


def _pok_context(tag: str, verifier_did: str, nonce_hex: str) -> bytes:
    return tag.encode() + b"|" + verifier_did.encode() + b"|" + bytes.fromhex(nonce_hex)


def _log(world, episode, subject, **extra):
    world.episode_log.append({"episode": episode, "subject": subject, **extra})


# ---------------------------------------------------------------------------
# E1: Patient Credential issuance

def episode_pcred(world, patient) -> PatientCredential:
    apc = world.apc
    _require(
        verify_lvc(apc.lvc, Role.APC.value, world.gha.rsa_public, world.did_ledger),
        "issuer legitimacy verification failed",
    )
    channel = _open(world, patient, apc)
    msg = _xfer(channel, patient.did, {
        "episode": "E1",
        "did": patient.did,
        "pii": patient.pii,
        "features": [float(x) for x in patient.wallet.features],
    })
    cred = pcred_issue(
        msg["pii"], msg["did"], np.array(msg["features"]), apc.cl_keypair,
        apc.store, apc.biohash_params, apc.did, apc.rng, world.clock,
        audit=_audit_fn(world, apc),
    )
    reply = _xfer(channel, apc.did, {"credential": cred.to_json()})
    received = PatientCredential.from_json(reply["credential"], world.ctx)
    _require(
        pcred_verify(received, world.resolve_cl_public(apc.did)),
        "issued credential failed verification",
    )
    patient.wallet.pcred = received
    _log(world, "E1", patient.did)
    return received


# ---------------------------------------------------------------------------
# E2: Pseudonym Token issuance (includes patient-side pseudonym generation)

def episode_pseudonym_token(world, patient, fresh_pseudonym=True) -> PseudonymToken:
    pta, ctx = world.pta, world.ctx
    wallet = patient.wallet
    _require(
        verify_lvc(pta.lvc, Role.PTA.value, world.gha.rsa_public, world.did_ledger),
        "issuer legitimacy verification failed",
    )
    if fresh_pseudonym or wallet.pai is None:
        wallet.pre_keys = patient_keygen(ctx, patient.rng)
        pk_hrr = world.resolve_pre_public(world.hrr.did)
        _require(pk_hrr is not None, "repository key not resolvable")
        nonce = ctx.random_scalar(patient.rng)
        wallet.pai = pseudonym_generate(
            wallet.pcred.patient_id, wallet.pre_keys, pk_hrr, patient.rng, nonce=nonce
        )
        wallet.pai_nonce = nonce

    channel = _open(world, patient, pta)
    hello = _xfer(channel, patient.did, {"episode": "E2"})
    nonce_msg = _xfer(channel, pta.did, {"nonce": pta.rng.read(16).hex()})
    context = _pok_context("E2", pta.did, nonce_msg["nonce"])

    pok = pok_pcred_prove(
        wallet.pcred.attribute_bytes(), wallet.pcred.sig,
        world.resolve_cl_public(world.apc.did),
        {SLOT_INDEX["patient_id"]}, context, patient.rng,
    )
    h = identity_hash(ctx, wallet.pcred.patient_id)
    pbp = pbp_prove(wallet.pai.pseudonym, wallet.pai_nonce, h, wallet.pre_keys.pk, ctx, patient.rng)
    request = _xfer(channel, patient.did, {
        "patient_id": wallet.pcred.patient_id.hex(),
        "pok": pok_to_dict(pok),
        "p1": wallet.pai.pseudonym.p1.to_bytes().hex(),
        "p2": wallet.pai.pseudonym.p2.to_bytes().hex(),
        "pk_pgen": wallet.pre_keys.pk.to_bytes().hex(),
        "pbp": pbp_to_dict(pbp),
    })

    from ..pre import Pseudonym

    pseudonym = Pseudonym(
        ctx.gt_from_bytes(bytes.fromhex(request["p1"])),
        ctx.g2_from_bytes(bytes.fromhex(request["p2"])),
    )
    pt = pt_issue(
        bytes.fromhex(request["patient_id"]),
        pok_from_dict(request["pok"]),
        pseudonym,
        pbp_from_dict(request["pbp"], ctx),
        pta.pt_key,
        world.resolve_cl_public(world.apc.did),
        ctx.g2_from_bytes(bytes.fromhex(request["pk_pgen"])),
        ctx,
        pta.store,
        pta.rng,
        world.clock,
        context,
        audit=_audit_fn(world, pta),
    )
    reply = _xfer(channel, pta.did, {"pt": pt.to_json()})
    received = PseudonymToken.from_json(reply["pt"], ctx)
    y_pta = world.resolve_schnorr_public(pta.did, "pt-sign")
    _require(pt_verify(received, y_pta, world.group), "pseudonym token failed verification")
    wallet.pseudonym_token = received
    _log(world, "E2", patient.did)
    return received


# ---------------------------------------------------------------------------
# E3: pseudonym-specific private key via blind extraction

def episode_pseudonym_key(world, patient) -> IBSUserKey:
    apc, ctx = world.apc, world.ctx
    wallet = patient.wallet
    if world.config.reverify_lvc:
        _require(
            verify_lvc(apc.lvc, Role.APC.value, world.gha.rsa_public, world.did_ledger),
            "issuer legitimacy verification failed",
        )
    channel = _open(world, patient, apc)
    _xfer(channel, patient.did, {"episode": "E3"})
    nonce_msg = _xfer(channel, apc.did, {"nonce": apc.rng.read(16).hex()})
    context = _pok_context("E3", apc.did, nonce_msg["nonce"])

    pok = pok_pcred_prove(
        wallet.pcred.attribute_bytes(), wallet.pcred.sig,
        world.resolve_cl_public(apc.did),
        {SLOT_INDEX["patient_id"]}, context, patient.rng,
    )
    pseudonym_bytes = wallet.pai.pseudonym.to_bytes()
    q = identity_point(ctx, pseudonym_bytes)
    blinder = ctx.random_scalar(patient.rng)
    blinded = blinder * q
    request = _xfer(channel, patient.did, {
        "patient_id": wallet.pcred.patient_id.hex(),
        "pok": pok_to_dict(pok),
        "blinded_identity": blinded.to_bytes().hex(),
    })

    _require(
        pok_pcred_verify(pok_from_dict(request["pok"]), world.resolve_cl_public(apc.did), context),
        "credential proof rejected",
    )
    blinded_point = ctx.g1_from_bytes(bytes.fromhex(request["blinded_identity"]))
    d_blind = ibs_issuer_extract(blinded_point, apc.ibs_master)
    _audit_fn(world, apc)(
        event_type="PseudonymKeyIssuance",
        access_level=AccessLevel.AUTHORITY,
        patient_identifier=request["blinded_identity"],  # blinded; true pseudonym unknown here
        event_details={"issued_at": world.clock.now()},
    )
    reply = _xfer(channel, apc.did, {"blinded_key": d_blind.to_bytes().hex()})

    from gmpy2 import invert

    d = int(invert(blinder, ctx.r)) * ctx.g1_from_bytes(bytes.fromhex(reply["blinded_key"]))
    key = IBSUserKey(ctx, pseudonym_bytes, d)
    mpk = world.resolve_mpk(apc.did)
    _require(key_matches_identity(key, mpk), "extracted key failed the pairing identity")
    wallet.pseudonym_key = key
    _log(world, "E3", patient.did)
    return key


# ---------------------------------------------------------------------------
# E4: Appointment Token via the partially blind flow

def episode_appointment_token(world, patient) -> AppointmentToken:
    apc, group = world.apc, world.group
    wallet = patient.wallet
    if world.config.reverify_lvc:
        _require(
            verify_lvc(apc.lvc, Role.APC.value, world.gha.rsa_public, world.did_ledger),
            "issuer legitimacy verification failed",
        )
    channel = _open(world, patient, apc)
    _xfer(channel, patient.did, {"episode": "E4"})

    signer = PbsSignerSession(apc.at_key, apc.rng)
    init = _xfer(channel, apc.did, {
        "nonce": apc.rng.read(16).hex(),
        "commitment": signer.commitment(),
    })
    context = _pok_context("E4", apc.did, init["nonce"])

    user = PbsUserSession(apc.at_key.y, group, patient.rng)
    ati = patient.rng.uuid4()
    cu = user.challenge(init["commitment"], ati)
    pok = pok_pcred_prove(
        wallet.pcred.attribute_bytes(), wallet.pcred.sig,
        world.resolve_cl_public(apc.did),
        {SLOT_INDEX["patient_id"]}, context, patient.rng,
    )
    request = _xfer(channel, patient.did, {
        "patient_id": wallet.pcred.patient_id.hex(),
        "pok": pok_to_dict(pok),
        "blinded_challenge": cu,
    })

    _require(
        pok_pcred_verify(pok_from_dict(request["pok"]), world.resolve_cl_public(apc.did), context),
        "credential proof rejected",
    )
    exp = world.clock.now() + world.config.at_validity_seconds
    s_prime = signer.respond(request["blinded_challenge"], exp)
    _audit_fn(world, apc)(
        event_type="AppointmentTokenIssuance",
        access_level=AccessLevel.AUTHORITY,
        patient_identifier=request["patient_id"],  # token identifier stays blinded
        event_details={"exp": exp, "issued_at": world.clock.now()},
    )
    reply = _xfer(channel, apc.did, {"s_prime": s_prime, "exp": exp})

    sig = user.finalize(reply["s_prime"], reply["exp"])
    token = AppointmentToken(ati, reply["exp"], sig)
    _require(
        pbs_verify(token.ati, token.exp, token.sig, apc.at_key.y, group),
        "appointment token failed verification",
    )
    wallet.appointment_token = token
    _log(world, "E4", patient.did, issuer_transcript=signer.transcript.fields())
    return token


# ---------------------------------------------------------------------------
# E5: appointment booking

def book_appointment(world, patient, ho, schedule=None) -> str:
    ctx, group = world.ctx, world.group
    wallet = patient.wallet
    _require(
        verify_lvc(ho.lvc, Role.HO.value, world.gha.rsa_public, world.did_ledger),
        "healthcare organization legitimacy verification failed",
    )
    channel = _open(world, patient, ho)
    schedule = schedule or {"date": "2026-09-01", "slot": "09:30", "provider": ho.did}
    body = {
        "pai": json.loads(pai_to_json(wallet.pai)),
        "pk_pgen": wallet.pre_keys.pk.to_bytes().hex(),
        "at": json.loads(wallet.appointment_token.to_json()),
        "schedule": schedule,
    }
    u, v = ibs_sign(_canonical(body), wallet.pseudonym_key, patient.rng)
    request = _xfer(channel, patient.did, {
        "body": body, "sig": {"u": u.to_bytes().hex(), "v": v.to_bytes().hex()},
    })

    # healthcare organization checks, in protocol order
    rbody = request["body"]
    pai = pai_from_json(json.dumps(rbody["pai"]), ctx)
    pseudonym_bytes = pai.pseudonym.to_bytes()
    sig = (
        ctx.g1_from_bytes(bytes.fromhex(request["sig"]["u"])),
        ctx.g1_from_bytes(bytes.fromhex(request["sig"]["v"])),
    )
    mpk = world.resolve_mpk(world.apc.did)
    _require(
        ibs_verify(_canonical(rbody), sig, pseudonym_bytes, mpk, ctx),
        "requester not bound to pseudonym",
    )
    token = AppointmentToken.from_json(json.dumps(rbody["at"]))
    y_apc = world.resolve_schnorr_public(world.apc.did, "at-sign")
    status = at_check(token, world.clock.now(), y_apc, group, world.config.clock_skew_seconds)
    _require(status is not AtStatus.BAD_SIGNATURE, "appointment token signature invalid")
    _require(status is not AtStatus.EXPIRED, "token expired")
    _require(
        all(k in rbody["schedule"] for k in ("date", "slot", "provider")),
        "invalid schedule",
    )
    _require(
        world.ati_ledger.check_and_mark(token.ati) is ATIStatus.FRESH,
        "replay rejected",
    )
    pk_pgen = ctx.g2_from_bytes(bytes.fromhex(rbody["pk_pgen"]))
    pk_hrr = world.resolve_pre_public(world.hrr.did)
    _require(rk_check(pai.rk, pk_pgen, pk_hrr, ctx), "malformed PAI")

    code = ho.rng.read(8).hex()
    ho.bookings[code] = {
        "pseudonym": pseudonym_bytes.hex(),
        "pai": rbody["pai"],
        "pk_pgen": rbody["pk_pgen"],
        "schedule": rbody["schedule"],
        "ati": token.ati.hex(),
        "admitted": False,
    }
    _audit_fn(world, ho)(
        event_type="AppointmentBooked",
        access_level=AccessLevel.PATIENT,
        patient_identifier=pseudonym_bytes.hex(),
        event_details={"confirmation_code": code, "ati": token.ati.hex()},
    )
    reply = _xfer(channel, ho.did, {"confirmation_code": code})
    wallet.confirmation_code = reply["confirmation_code"]
    _log(world, "E5", patient.did, ho=ho.did)
    return wallet.confirmation_code


# ---------------------------------------------------------------------------
# E6: in-person identity verification

def inperson_verify(world, patient, ho, live_features=None, ho_capture=None) -> bool:
    ctx, group = world.ctx, world.group
    wallet = patient.wallet
    params = world.apc.biohash_params
    if world.config.reverify_lvc:
        _require(
            verify_lvc(ho.lvc, Role.HO.value, world.gha.rsa_public, world.did_ledger),
            "healthcare organization legitimacy verification failed",
        )
    channel = _open(world, patient, ho)
    _xfer(channel, patient.did, {"episode": "E6"})
    nonce_msg = _xfer(channel, ho.did, {"nonce": ho.rng.read(16).hex()})
    context = _pok_context("E6", ho.did, nonce_msg["nonce"])

    if live_features is None:
        jitter = np.random.default_rng(int.from_bytes(patient.rng.read(8), "big"))
        live_features = wallet.features + 0.03 * jitter.standard_normal(params.dimension)
    checkin_hash = biohash_enroll(live_features, params)
    pok = pok_pcred_prove(
        wallet.pcred.attribute_bytes(), wallet.pcred.sig,
        world.resolve_cl_public(world.apc.did),
        {SLOT_INDEX["biohash"]}, context, patient.rng,
    )
    body = {
        "confirmation_code": wallet.confirmation_code,
        "biohash": checkin_hash.hex(),
        "pok": pok_to_dict(pok),
        "pt": json.loads(wallet.pseudonym_token.to_json()),
    }
    u, v = ibs_sign(_canonical(body), wallet.pseudonym_key, patient.rng)
    request = _xfer(channel, patient.did, {
        "body": body, "sig": {"u": u.to_bytes().hex(), "v": v.to_bytes().hex()},
    })

    rbody = request["body"]
    booking = ho.bookings.get(rbody["confirmation_code"])
    _require(booking is not None, "invalid confirmation code")
    sig = (
        ctx.g1_from_bytes(bytes.fromhex(request["sig"]["u"])),
        ctx.g1_from_bytes(bytes.fromhex(request["sig"]["v"])),
    )
    mpk = world.resolve_mpk(world.apc.did)
    _require(
        ibs_verify(_canonical(rbody), sig, bytes.fromhex(booking["pseudonym"]), mpk, ctx),
        "requester not bound to pseudonym",
    )
    pt = PseudonymToken.from_json(json.dumps(rbody["pt"]), ctx)
    _require(pt.pseudonym.to_bytes().hex() == booking["pseudonym"], "pseudonym token mismatch")
    _require(
        pok_pcred_verify(pok_from_dict(rbody["pok"]), world.resolve_cl_public(world.apc.did), context),
        "credential proof rejected",
    )
    disclosed_biohash = pok_from_dict(rbody["pok"]).disclosed[SLOT_INDEX["biohash"]]
    if ho_capture is None:
        capture_rng = np.random.default_rng(int.from_bytes(ho.rng.read(8), "big"))
        ho_capture = live_features + 0.02 * capture_rng.standard_normal(params.dimension)
    _require(
        biohash_match(disclosed_biohash, ho_capture, params),
        "biometric verification failed",
    )
    y_pta = world.resolve_schnorr_public(world.pta.did, "pt-sign")
    _require(pt_verify(pt, y_pta, group), "pseudonym token invalid")

    booking["admitted"] = True
    outcome = "biometric match successful"
    ho.verifications.append({"confirmation_code": rbody["confirmation_code"], "outcome": outcome})
    _audit_fn(world, ho)(
        event_type="IdentityVerification",
        access_level=AccessLevel.PATIENT,
        patient_identifier=booking["pseudonym"],
        event_details={"confirmation_code": rbody["confirmation_code"], "outcome": outcome},
    )
    _xfer(channel, ho.did, {"admitted": True})
    _log(world, "E6", patient.did, ho=ho.did)
    return True


# ---------------------------------------------------------------------------
# E7: authorization of the consultation (PAI handoff to the professional)

def consult_authorization(world, ho, hp, code: str) -> dict:
    _require(code in ho.bookings, "invalid confirmation code")
    booking = ho.bookings[code]
    _require(booking["admitted"], "patient not admitted")
    channel = _open(world, ho, hp)
    _require(
        verify_lvc(hp.lvc, Role.HP.value, world.gha.rsa_public, world.did_ledger),
        "professional legitimacy verification failed",
    )
    _require(
        verify_lvc(ho.lvc, Role.HO.value, world.gha.rsa_public, world.did_ledger),
        "organization legitimacy verification failed",
    )
    handoff = _xfer(channel, ho.did, {
        "pai": booking["pai"],
        "pk_pgen": booking["pk_pgen"],
        "pseudonym": booking["pseudonym"],
    })
    _audit_fn(world, ho)(
        event_type="ConsultationAuthorized",
        access_level=AccessLevel.PATIENT,
        patient_identifier=booking["pseudonym"],
        event_details={"professional": hp.did},
    )
    _log(world, "E7", ho.did, hp=hp.did)
    return handoff


# ---------------------------------------------------------------------------
# E8: health record access at the repository

def record_access(world, hp, handoff: dict, access_type: str, entry: dict | None = None):
    ctx, group, hrr = world.ctx, world.group, world.hrr
    channel = _open(world, hp, hrr)
    _require(
        verify_lvc(hrr.lvc, Role.HRR.value, world.gha.rsa_public, world.did_ledger),
        "repository legitimacy verification failed",
    )

    pai = pai_from_json(json.dumps(handoff["pai"]), ctx)
    pk_pgen = ctx.g2_from_bytes(bytes.fromhex(handoff["pk_pgen"]))
    pk_hrr = world.resolve_pre_public(hrr.did)
    hrr_pseudonym = transform_to_hrr(pai, pk_pgen, pk_hrr, ctx)

    body = {
        "hp_cred": {
            "subject": hp.lvc.subject_did,
            "role": hp.lvc.role_claim,
            "claims": hp.lvc.claims,
            "signature": hp.lvc.signature.hex(),
        },
        "access_type": access_type,
        "p_hrr": {
            "q1": hrr_pseudonym.q1.to_bytes().hex(),
            "q2": hrr_pseudonym.q2.to_bytes().hex(),
        },
        "ct": pai.ct.hex(),
        "visit_pseudonym": handoff["pseudonym"],  # audit identifier only
        "entry": entry,
    }
    sig = schnorr_sign(_canonical(body), hp.sign_key, hp.rng)
    request = _xfer(channel, hp.did, {
        "body": body, "sig": {"c": sig.c, "s": sig.s},
    })

    rbody = request["body"]
    hp_cred = LegitimacyCredential(
        rbody["hp_cred"]["subject"], rbody["hp_cred"]["role"],
        rbody["hp_cred"]["claims"], bytes.fromhex(rbody["hp_cred"]["signature"]),
    )
    _require(
        verify_lvc(hp_cred, Role.HP.value, world.gha.rsa_public, world.did_ledger),
        "professional credential rejected",
    )
    _require(
        rbody["access_type"] in hp_cred.claims.get("scope", ()),
        "insufficient authorization",
    )
    y_hp = world.resolve_schnorr_public(hp_cred.subject_did, "hp-sign")
    _require(
        schnorr_verify(_canonical(rbody), SchnorrSig(request["sig"]["c"], request["sig"]["s"]), y_hp, group),
        "request signature invalid",
    )
    received_hp = HRRPseudonym(
        ctx.gt_from_bytes(bytes.fromhex(rbody["p_hrr"]["q1"])),
        ctx.gt_from_bytes(bytes.fromhex(rbody["p_hrr"]["q2"])),
    )
    try:
        patient_id = hrr_recover(received_hp, bytes.fromhex(rbody["ct"]), hrr.pre_keys)
    except PREError as exc:
        raise EpisodeError("record reference invalid") from exc

    if rbody["access_type"] == "read":
        result = list(hrr.records.get(patient_id, []))
        event_type = "HealthRecordRead"
    elif rbody["access_type"] == "write":
        stored = {
            "timestamp": world.clock.now(),
            "professional": hp_cred.subject_did,
            "entry_type": rbody["entry"]["type"],
            "content": rbody["entry"]["content"],
        }
        hrr.records.setdefault(patient_id, []).append(stored)
        result = stored
        event_type = "HealthRecordWrite"
    else:
        raise EpisodeError("insufficient authorization")

    details = {
        "access_type": rbody["access_type"],
        "professional": hp_cred.subject_did,
        "accessed_at": world.clock.now(),
    }
    for tier in (AccessLevel.PATIENT, AccessLevel.AUTHORITY):
        world.auditor_ledger.append(
            origin_module=hrr.role.value,
            origin_credential=hrr.lvc,
            event_type=event_type,
            access_level=tier,
            patient_identifier=rbody["visit_pseudonym"],
            event_details=details,
            healthcare_professional_identifier=hp_cred.subject_did,
        )
    _xfer(channel, hrr.did, {"result": "ok"})
    _log(world, "E8", hp.did, access=rbody["access_type"])
    return result


# ---------------------------------------------------------------------------
# Visit orchestration

def run_visit(world, patient, visit_index: int) -> dict:
    ho, hp = world.hos[0], world.hps[0]
    episode_pcred(world, patient)
    rotate = world.config.rotate_pseudonyms or patient.wallet.pai is None
    episode_pseudonym_token(world, patient, fresh_pseudonym=rotate)
    if rotate or patient.wallet.pseudonym_key is None:
        episode_pseudonym_key(world, patient)
    episode_appointment_token(world, patient)
    code = book_appointment(world, patient, ho)
    inperson_verify(world, patient, ho)
    handoff = consult_authorization(world, ho, hp, code)
    history = record_access(world, hp, handoff, "read")
    note = {
        "type": "Note",
        "content": f"visit {visit_index} consultation for {patient.did}",
    }
    written = record_access(world, hp, handoff, "write", entry=note)
    return {
        "confirmation_code": code,
        "pseudonym": patient.wallet.pai.pseudonym.to_bytes().hex(),
        "history": history,
        "written": written,
    }
