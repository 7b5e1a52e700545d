"""Entity state: roles, keys, stores, and legitimacy credentials.

Every participant owns a long-lived control key registered in its DID
document; role entities additionally hold their scheme keys (credential
issuer keys, token-signing keys, the identity-key master secret, the
repository re-encryption secret) and the role-specific store whose schema
enforces the separation of duties.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import padding, rsa
from gmpy2 import invert, mpz, next_prime

from ..credentials import APCStore, BioHashParams, PTAStore
from ..ledgers import DIDDocument
from ..signatures import SchnorrKeypair, ibs_keygen, schnorr_keygen, schnorr_sign, schnorr_verify
from ..signatures.cl import CLVariant, cl_keygen


class Role(str, enum.Enum):
    PATIENT = "Patient"
    GHA = "GHA"
    APC = "APC"
    PTA = "PTA"
    HO = "HO"
    HP = "HP"
    HRR = "HRR"
    AUDITOR = "Auditor"


# ---------------------------------------------------------------------------
# Legitimacy Verifiable Credentials (RSA-signed by the GHA)

@dataclass(frozen=True)
class LegitimacyCredential:
    subject_did: str
    role_claim: str
    claims: dict
    signature: bytes

    def signed_bytes(self) -> bytes:
        return _lvc_signed_bytes(self.subject_did, self.role_claim, self.claims)


def _lvc_signed_bytes(subject_did: str, role_claim: str, claims: dict) -> bytes:
    return json.dumps(
        {"subject": subject_did, "role": role_claim, "claims": claims},
        sort_keys=True,
    ).encode()


def _deterministic_rsa_key(rng, bits=3072):
    """RSA keypair from the injected randomness stream (seeded runs must
    produce byte-identical credentials)."""
    half = bits // 2
    primes = []
    while len(primes) < 2:
        cand = int.from_bytes(rng.read(half // 8), "big") | (3 << (half - 2)) | 1
        p = next_prime(mpz(cand))
        if p.bit_length() == half and p % 65537 != 1 and p not in primes:
            primes.append(p)
    p, q = primes
    n, e = p * q, 65537
    d = int(invert(e, (p - 1) * (q - 1)))
    pub = rsa.RSAPublicNumbers(e, int(n))
    priv = rsa.RSAPrivateNumbers(
        p=int(p), q=int(q), d=d,
        dmp1=d % (int(p) - 1), dmq1=d % (int(q) - 1),
        iqmp=int(invert(q, p)),
        public_numbers=pub,
    )
    return priv.private_key()


def rsa_keygen(rng, bits=3072):
    if rng.deterministic:
        return _deterministic_rsa_key(rng, bits)
    return rsa.generate_private_key(public_exponent=65537, key_size=bits)


_LVC_PADDING = padding.PKCS1v15()  # deterministic signatures keep transcripts reproducible


def lvc_issue(gha_key, subject_did: str, role_claim: str, claims: dict | None = None) -> LegitimacyCredential:
    claims = claims or {}
    sig = gha_key.sign(_lvc_signed_bytes(subject_did, role_claim, claims), _LVC_PADDING, hashes.SHA256())
    return LegitimacyCredential(subject_did, role_claim, claims, sig)


def verify_lvc(credential, expected_role: str, gha_public, did_ledger=None) -> bool:
    """Signature + role-claim check, plus the ledger revocation flag."""
    try:
        if not isinstance(credential, LegitimacyCredential):
            return False
        if credential.role_claim != expected_role:
            return False
        gha_public.verify(
            credential.signature, credential.signed_bytes(), _LVC_PADDING, hashes.SHA256()
        )
    except Exception:
        return False
    if did_ledger is not None:
        doc = did_ledger.resolve(credential.subject_did)
        if doc is None or doc.revoked:
            return False
    return True


# ---------------------------------------------------------------------------
# Warrants (authority-signed trace mandates)

WARRANT_TAG = b"HIDM/warrant/"


@dataclass(frozen=True)
class Warrant:
    warrant_id: bytes
    target_pseudonym: bytes
    scope: str
    signature: object  # SchnorrSig by the auditor authority

    def signed_bytes(self) -> bytes:
        return WARRANT_TAG + self.warrant_id + self.target_pseudonym + self.scope.encode()


def warrant_issue(auditor: "AuditorEntity", target_pseudonym: bytes, scope: str) -> Warrant:
    warrant_id = auditor.rng.read(16)
    unsigned = Warrant(warrant_id, target_pseudonym, scope, None)
    sig = schnorr_sign(unsigned.signed_bytes(), auditor.static_key, auditor.rng)
    return Warrant(warrant_id, target_pseudonym, scope, sig)


def warrant_verify(warrant: Warrant, authority_y: int, group) -> bool:
    try:
        return schnorr_verify(warrant.signed_bytes(), warrant.signature, authority_y, group)
    except (TypeError, AttributeError):
        return False


# ---------------------------------------------------------------------------
# Entities

@dataclass
class Entity:
    role: Role
    did: str
    static_key: SchnorrKeypair
    rng: object
    lvc: LegitimacyCredential | None = None

    def did_document(self, group, extra_keys=()) -> DIDDocument:
        keys = [("control", group.element_to_bytes(self.static_key.y).hex())]
        keys.extend(extra_keys)
        return DIDDocument(did=self.did, public_keys=keys)


@dataclass
class PatientWallet:
    """Everything the patient accumulates across the episodes."""

    pcred: object = None
    pre_keys: object = None
    pai: object = None
    pseudonym_token: object = None
    pseudonym_key: object = None  # IBS user key for the current pseudonym
    appointment_token: object = None
    confirmation_code: str | None = None
    features: object = None  # enrolled biometric feature vector


@dataclass
class PatientEntity(Entity):
    pii: dict = field(default_factory=dict)
    wallet: PatientWallet = field(default_factory=PatientWallet)


@dataclass
class APCEntity(Entity):
    cl_keypair: object = None
    at_key: SchnorrKeypair = None  # partially blind token signing key
    ibs_master: object = None
    store: APCStore = field(default_factory=APCStore)
    biohash_params: BioHashParams = field(default_factory=BioHashParams)


@dataclass
class PTAEntity(Entity):
    pt_key: SchnorrKeypair = None
    store: PTAStore = field(default_factory=PTAStore)


@dataclass
class HOEntity(Entity):
    bookings: dict = field(default_factory=dict)  # code -> booking state
    verifications: list = field(default_factory=list)


@dataclass
class HPEntity(Entity):
    sign_key: SchnorrKeypair = None
    access_scope: tuple = ("read", "write")


@dataclass
class HRREntity(Entity):
    pre_keys: object = None  # PREHRRKeys
    records: dict = field(default_factory=dict)  # patient_id -> [entries]


@dataclass
class GHAEntity(Entity):
    rsa_key: object = None

    @property
    def rsa_public(self):
        return self.rsa_key.public_key()


@dataclass
class AuditorEntity(Entity):
    pass


def make_entity(cls, role: Role, did: str, group, rng, **kwargs):
    static = schnorr_keygen(group, rng)
    return cls(role=role, did=did, static_key=static, rng=rng, **kwargs)
