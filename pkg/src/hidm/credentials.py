"""Issuer-signed artifacts: Patient Credential, Pseudonym Token,
Appointment Token, plus the locality-sensitive biometric hash and the
issuance-side entity stores.

Slot order of the Patient Credential is fixed and load-bearing:
(credential_id, did_patient_l, patient_id, issue_date, biohash, did_apc).
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .pre import Pseudonym
from .proofs import PBProof, PoKPCred, pbp_verify, pok_pcred_verify
from .signatures import (
    CLVariant,
    SchnorrKeypair,
    SchnorrSig,
    cl_sign,
    cl_verify,
    pbs_issue,
    pbs_verify,
    schnorr_sign,
    schnorr_verify,
)
from .signatures.cl import CLPairingSignature, CLRSASignature

SCHEMA_VERSION = "hidm/v1"

PCRED_SLOTS = ("credential_id", "did_patient_l", "patient_id", "issue_date", "biohash", "did_apc")
SLOT_INDEX = {name: i for i, name in enumerate(PCRED_SLOTS)}

AT_VALIDITY_SECONDS = 24 * 3600  # default policy window
CLOCK_SKEW_SECONDS = 120

PT_SIGN_TAG = b"HIDM/pt/"


class IssuanceError(Exception):
    pass


# ---------------------------------------------------------------------------
# Patient Credential

@dataclass(frozen=True)
class PatientCredential:
    credential_id: bytes  # 16 bytes
    did_patient_l: str
    patient_id: bytes
    issue_date: int
    biohash: bytes  # 32 bytes (256 bits)
    did_apc: str
    sig: object  # CLSignature (either variant)

    def attribute_bytes(self) -> list:
        return [
            self.credential_id,
            self.did_patient_l.encode(),
            self.patient_id,
            int(self.issue_date).to_bytes(8, "big"),
            self.biohash,
            self.did_apc.encode(),
        ]

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": SCHEMA_VERSION,
                "type": "patient-credential",
                "credential_id": self.credential_id.hex(),
                "did_patient_l": self.did_patient_l,
                "patient_id": self.patient_id.hex(),
                "issue_date": self.issue_date,
                "biohash": self.biohash.hex(),
                "did_apc": self.did_apc,
                "sig": _sig_to_dict(self.sig),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, data: str, ctx) -> "PatientCredential":
        obj = json.loads(data)
        if obj.get("schema") != SCHEMA_VERSION or obj.get("type") != "patient-credential":
            raise IssuanceError("unknown credential schema")
        return cls(
            credential_id=bytes.fromhex(obj["credential_id"]),
            did_patient_l=obj["did_patient_l"],
            patient_id=bytes.fromhex(obj["patient_id"]),
            issue_date=int(obj["issue_date"]),
            biohash=bytes.fromhex(obj["biohash"]),
            did_apc=obj["did_apc"],
            sig=_sig_from_dict(obj["sig"], ctx),
        )


def _sig_to_dict(sig) -> dict:
    if sig.variant == CLVariant.PAIRING:
        return {
            "scheme": sig.variant.value,
            "sigma1": sig.sigma1.to_bytes().hex(),
            "sigma2": sig.sigma2.to_bytes().hex(),
        }
    return {
        "scheme": sig.variant.value,
        "a": hex(sig.a),
        "e": hex(sig.e),
        "v": hex(sig.v),
    }


def _sig_from_dict(obj: dict, ctx):
    if obj["scheme"] == CLVariant.PAIRING.value:
        return CLPairingSignature(
            ctx.g1_from_bytes(bytes.fromhex(obj["sigma1"])),
            ctx.g1_from_bytes(bytes.fromhex(obj["sigma2"])),
        )
    if obj["scheme"] == CLVariant.RSA.value:
        return CLRSASignature(int(obj["a"], 16), int(obj["e"], 16), int(obj["v"], 16))
    raise IssuanceError("unknown signature scheme")


def pcred_verify(cred: PatientCredential, issuer_public) -> bool:
    """cl_verify over the six slots in the fixed order."""
    try:
        return cl_verify(cred.attribute_bytes(), cred.sig, issuer_public)
    except (TypeError, ValueError, AttributeError):
        return False


# ---------------------------------------------------------------------------
# Entity stores for issuance (schemas enforce separation of duties)

class APCStore:
    """PII <-> patient_id associations; knows nothing about pseudonyms."""

    def __init__(self):
        self.by_fingerprint: dict = {}
        self.records: dict = {}  # patient_id -> pii bundle

    @staticmethod
    def pii_fingerprint(pii: dict) -> bytes:
        canon = json.dumps(pii, sort_keys=True).encode()
        return hashlib.sha256(b"HIDM/pii-fingerprint" + canon).digest()

    def find_patient(self, pii: dict):
        return self.by_fingerprint.get(self.pii_fingerprint(pii))

    def enroll(self, pii: dict, patient_id: bytes) -> None:
        self.by_fingerprint[self.pii_fingerprint(pii)] = patient_id
        self.records[patient_id] = dict(pii)

    def lookup_pii(self, patient_id: bytes):
        return self.records.get(patient_id)

    def serialize(self) -> bytes:
        rows = [
            {"patient_id": pid.hex(), "pii": self.records[pid]}
            for pid in sorted(self.records)
        ]
        return json.dumps(rows, sort_keys=True).encode()


class PTAStore:
    """pseudonym <-> patient_id <-> PTI associations; holds no PII."""

    def __init__(self):
        self.rows: list = []  # (pseudonym_bytes, patient_id, pti)

    def record(self, pseudonym_bytes: bytes, patient_id: bytes, pti: bytes) -> None:
        self.rows.append((pseudonym_bytes, patient_id, pti))

    def patient_for_pseudonym(self, pseudonym_bytes: bytes):
        for stored, patient_id, _ in self.rows:
            if stored == pseudonym_bytes:
                return patient_id
        return None

    def serialize(self) -> bytes:
        rows = [
            {"pseudonym": p.hex(), "patient_id": pid.hex(), "pti": pti.hex()}
            for p, pid, pti in self.rows
        ]
        return json.dumps(rows, sort_keys=True).encode()


def default_pii_predicate(pii: dict) -> bool:
    required = ("name", "address", "gov_id")
    return all(isinstance(pii.get(k), str) and pii.get(k) for k in required)


def pcred_issue(
    pii: dict,
    patient_did: str,
    biometric_features,
    apc_keypair,
    store: APCStore,
    biohash_params: "BioHashParams",
    did_apc: str,
    rng,
    clock,
    audit=None,
    verify_pii=default_pii_predicate,
) -> PatientCredential:
    """Verify identity, mint identifiers, sign, record, and log.

    Re-enrolling the same PII reuses the existing patient_id but still
    issues a fresh credential.
    """
    if not verify_pii(pii):
        raise IssuanceError("identity proofing failed")
    patient_id = store.find_patient(pii)
    if patient_id is None:
        patient_id = rng.read(16)
        store.enroll(pii, patient_id)
    credential_id = rng.read(16)
    issue_date = clock.now()
    biohash = biohash_enroll(biometric_features, biohash_params)
    attrs = [
        credential_id,
        patient_did.encode(),
        patient_id,
        issue_date.to_bytes(8, "big"),
        biohash,
        did_apc.encode(),
    ]
    sig = cl_sign(attrs, apc_keypair, rng)
    cred = PatientCredential(
        credential_id, patient_did, patient_id, issue_date, biohash, did_apc, sig
    )
    if audit is not None:
        audit(
            event_type="PatientCredentialIssuance",
            access_level="AuditorAuthorityAccessible",
            patient_identifier=patient_id.hex(),
            event_details={"credential_id": credential_id.hex(), "issued_at": issue_date},
        )
    return cred


# ---------------------------------------------------------------------------
# Pseudonym Token

@dataclass(frozen=True)
class PseudonymToken:
    pti: bytes  # 16 bytes
    pseudonym: Pseudonym
    sig: SchnorrSig

    def signed_bytes(self) -> bytes:
        return pt_signed_bytes(self.pti, self.pseudonym)

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": SCHEMA_VERSION,
                "type": "pseudonym-token",
                "pti": self.pti.hex(),
                "p1": self.pseudonym.p1.to_bytes().hex(),
                "p2": self.pseudonym.p2.to_bytes().hex(),
                "sig": {"c": hex(self.sig.c), "s": hex(self.sig.s)},
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, data: str, ctx) -> "PseudonymToken":
        obj = json.loads(data)
        if obj.get("schema") != SCHEMA_VERSION or obj.get("type") != "pseudonym-token":
            raise IssuanceError("unknown token schema")
        return cls(
            pti=bytes.fromhex(obj["pti"]),
            pseudonym=Pseudonym(
                ctx.gt_from_bytes(bytes.fromhex(obj["p1"])),
                ctx.g2_from_bytes(bytes.fromhex(obj["p2"])),
            ),
            sig=SchnorrSig(int(obj["sig"]["c"], 16), int(obj["sig"]["s"], 16)),
        )


def pt_signed_bytes(pti: bytes, pseudonym: Pseudonym) -> bytes:
    return PT_SIGN_TAG + pti + pseudonym.to_bytes()


def pt_verify(pt: PseudonymToken, y_pta: int, group) -> bool:
    return schnorr_verify(pt.signed_bytes(), pt.sig, y_pta, group)


def pt_issue(
    patient_id: bytes,
    pok: PoKPCred,
    pseudonym: Pseudonym,
    pbp: PBProof,
    pta_key: SchnorrKeypair,
    apc_public,
    pk_patient,
    ctx,
    store: PTAStore,
    rng,
    clock,
    context: bytes,
    audit=None,
) -> PseudonymToken:
    """Check the credential proof and the binding proof, then sign.

    The disclosed PatientID slot of the proof must match patient_id, and
    the binding proof is checked against h = hash(patient_id) computed
    here, not by the requester.
    """
    disclosed = pok.disclosed.get(SLOT_INDEX["patient_id"])
    if disclosed != patient_id or not pok_pcred_verify(pok, apc_public, context):
        raise IssuanceError("credential proof rejected")
    from .pre import identity_hash

    h = identity_hash(ctx, patient_id)
    if not pbp_verify(pseudonym, pbp, pk_patient, h, ctx):
        raise IssuanceError("pseudonym binding rejected")
    pti = rng.read(16)
    pt = PseudonymToken(
        pti, pseudonym, schnorr_sign(pt_signed_bytes(pti, pseudonym), pta_key, rng)
    )
    store.record(pseudonym.to_bytes(), patient_id, pti)
    if audit is not None:
        audit(
            event_type="PseudonymTokenIssuance",
            access_level="AuditorAuthorityAccessible",
            patient_identifier=pseudonym.to_bytes().hex(),
            event_details={"pti": pti.hex(), "issued_at": clock.now()},
        )
    return pt


# ---------------------------------------------------------------------------
# Appointment Token

@dataclass(frozen=True)
class AppointmentToken:
    ati: bytes  # 16-byte UUIDv4
    exp: int
    sig: object  # PartiallyBlindSig

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": SCHEMA_VERSION,
                "type": "appointment-token",
                "ati": self.ati.hex(),
                "exp": self.exp,
                "sig": {"c": hex(self.sig.c), "s": hex(self.sig.s), "t": self.sig.t.hex()},
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, data: str) -> "AppointmentToken":
        from .signatures import PartiallyBlindSig

        obj = json.loads(data)
        if obj.get("schema") != SCHEMA_VERSION or obj.get("type") != "appointment-token":
            raise IssuanceError("unknown token schema")
        return cls(
            ati=bytes.fromhex(obj["ati"]),
            exp=int(obj["exp"]),
            sig=PartiallyBlindSig(
                int(obj["sig"]["c"], 16), int(obj["sig"]["s"], 16),
                bytes.fromhex(obj["sig"]["t"]),
            ),
        )


class AtStatus(str, enum.Enum):
    VALID = "valid"
    EXPIRED = "expired"
    BAD_SIGNATURE = "bad-signature"


def at_issue(
    pok: PoKPCred,
    apc_public,
    apc_schnorr_key: SchnorrKeypair,
    user_rng,
    signer_rng,
    clock,
    context: bytes,
    validity_seconds: int = AT_VALIDITY_SECONDS,
    audit=None,
):
    """Issue a single-use token via the partially blind flow.

    Returns (token, signer transcript).  The token identifier is minted
    by the requesting side and never crosses to the issuer: the issuer
    transcript carries only blinded values.
    """
    if not pok_pcred_verify(pok, apc_public, context):
        raise IssuanceError("credential proof rejected")
    ati = user_rng.uuid4()
    exp = clock.now() + validity_seconds
    sig, transcript = pbs_issue(exp, ati, apc_schnorr_key, user_rng, signer_rng)
    if audit is not None:
        audit(
            event_type="AppointmentTokenIssuance",
            access_level="AuditorAuthorityAccessible",
            patient_identifier=pok.disclosed.get(SLOT_INDEX["patient_id"], b"").hex(),
            event_details={"exp": exp, "issued_at": clock.now()},
        )
    return AppointmentToken(ati, exp, sig), transcript


def at_check(
    at: AppointmentToken,
    now: int,
    y_apc: int,
    group,
    skew_seconds: int = CLOCK_SKEW_SECONDS,
) -> AtStatus:
    if not pbs_verify(at.ati, at.exp, at.sig, y_apc, group):
        return AtStatus.BAD_SIGNATURE
    if now > at.exp + skew_seconds:
        return AtStatus.EXPIRED
    return AtStatus.VALID


# ---------------------------------------------------------------------------
# BioHash (random-hyperplane locality-sensitive hash)

@dataclass(frozen=True)
class BioHashParams:
    dimension: int = 128
    hyperplanes: int = 256
    threshold: int = 32  # max Hamming distance for a match
    seed: int = 0x48494D42  # hyperplane generator seed

    def planes(self) -> np.ndarray:
        gen = np.random.default_rng(self.seed)
        return gen.standard_normal((self.hyperplanes, self.dimension))


def biohash_enroll(features, params: BioHashParams) -> bytes:
    vec = np.asarray(features, dtype=np.float64)
    if vec.shape != (params.dimension,):
        raise ValueError(f"feature vector must have dimension {params.dimension}")
    bits = params.planes() @ vec > 0
    return np.packbits(bits).tobytes()


def biohash_match(enrolled: bytes, live_features, params: BioHashParams) -> bool:
    live = biohash_enroll(live_features, params)
    distance = (int.from_bytes(enrolled, "big") ^ int.from_bytes(live, "big")).bit_count()
    return distance <= params.threshold
