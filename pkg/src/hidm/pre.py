"""Pairing-based proxy re-encryption for patient pseudonyms.

A patient encodes their identifier in GT, blinds it with a fresh nonce
into a two-part pseudonym, and hands healthcare organizations a one-way
re-encryption key toward the record repository.  The repository can peel
the blinding and decrypt the identifier; nobody in between can.  The
transformation is single-hop by construction: its output type is accepted
by no further transformation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF
from gmpy2 import invert

from .algebra import G1Element, G2Element, GTElement

ID_HASH_TAG = b"HIDM/pre/patient-id"
HKDF_INFO = b"HIDM-PRE-PatientID-Derivation-v1"

# Fixed system-wide salt; deployment-specific, one per ecosystem.
SYSTEM_SALT = bytes.fromhex(
    "9f3b5cde014a7788c2b16f40d58e92a31c6745fa08bd93ef72a01b5d44c8e671"
)

AEAD_NONCE_LEN = 12
AEAD_TAG_LEN = 16


class PREError(Exception):
    pass


@dataclass(frozen=True)
class PREPatientKeys:
    """Pseudonym-generation keypair: secret x, public x*g2."""

    ctx: object
    x: int
    pk: G2Element


@dataclass(frozen=True)
class PREHRRKeys:
    """Repository keypair: secret y, public y*g1."""

    ctx: object
    y: int
    pk: G1Element


@dataclass(frozen=True)
class Pseudonym:
    p1: GTElement  # z^(r + h)
    p2: G2Element  # r * pk_patient

    def to_bytes(self) -> bytes:
        return self.p1.to_bytes() + self.p2.to_bytes()


@dataclass(frozen=True)
class PseudonymAccessInfo:
    """The (pseudonym, re-encryption key, encrypted identifier) triple."""

    pseudonym: Pseudonym
    rk: G1Element
    ct: bytes  # nonce || body || tag

    def to_bytes(self) -> bytes:
        return self.pseudonym.to_bytes() + self.rk.to_bytes() + self.ct


@dataclass(frozen=True)
class HRRPseudonym:
    """Repository-domain pseudonym; terminal, not re-transformable."""

    q1: GTElement  # z^(r + h)
    q2: GTElement  # z^(r * y)


def patient_keygen(ctx, rng) -> PREPatientKeys:
    x = ctx.random_scalar(rng)
    return PREPatientKeys(ctx, x, ctx.g2_base_mul(x))


def hrr_keygen(ctx, rng) -> PREHRRKeys:
    y = ctx.random_scalar(rng)
    return PREHRRKeys(ctx, y, ctx.g1_base_mul(y))


def derive_key(id_gt: GTElement, salt: bytes, info: bytes = HKDF_INFO) -> bytes:
    """32-byte symmetric key from the canonical encoding of a GT value."""
    hkdf = HKDF(algorithm=SHA256(), length=32, salt=salt, info=info)
    return hkdf.derive(id_gt.to_bytes())


def identity_hash(ctx, patient_id: bytes) -> int:
    return ctx.hash_to_scalar(ID_HASH_TAG, patient_id)


def encrypt_patient_id(ctx, patient_id: bytes, rng, salt: bytes = SYSTEM_SALT) -> bytes:
    """AEAD-encrypt the identifier under the key derived from z^h."""
    h = identity_hash(ctx, patient_id)
    key = derive_key(ctx.z_pow(h), salt)
    nonce = rng.read(AEAD_NONCE_LEN)
    return nonce + AESGCM(key).encrypt(nonce, patient_id, None)


def pseudonym_generate(
    patient_id: bytes,
    keys: PREPatientKeys,
    pk_hrr: G1Element,
    rng,
    nonce: int | None = None,
    salt: bytes = SYSTEM_SALT,
) -> PseudonymAccessInfo:
    """Build a fresh PAI for one visit.

    The nonce argument exists for test-vector mode (including the
    degenerate nonce 0); normal callers let the rng choose.
    """
    ctx = keys.ctx
    h = identity_hash(ctx, patient_id)
    r = ctx.random_scalar(rng) if nonce is None else nonce % ctx.r
    p1 = ctx.z_pow((r + h) % ctx.r)
    p2 = r * keys.pk
    rk = int(invert(keys.x, ctx.r)) * pk_hrr
    ct = encrypt_patient_id(ctx, patient_id, rng, salt)
    return PseudonymAccessInfo(Pseudonym(p1, p2), rk, ct)


def rk_check(rk: G1Element, pk_patient: G2Element, pk_hrr: G1Element, ctx) -> bool:
    """pairing(rk, pk_patient) == pairing(pk_hrr, g2)."""
    try:
        if rk.is_identity:
            return False
        lhs = ctx.pair(rk, pk_patient)
        rhs = ctx.pair_cached(pk_hrr, ctx.g2)
        return lhs == rhs
    except (TypeError, ValueError, AttributeError):
        return False


def transform_to_hrr(
    pai: PseudonymAccessInfo,
    pk_patient: G2Element,
    pk_hrr: G1Element,
    ctx,
) -> HRRPseudonym:
    """Re-encrypt the pseudonym into the repository domain.

    Re-checks the re-encryption key; the transforming party never touches
    the identifier hash or plaintext.
    """
    if not rk_check(pai.rk, pk_patient, pk_hrr, ctx):
        raise PREError("invalid re-encryption key")
    q2 = ctx.pair(pai.rk, pai.pseudonym.p2)
    return HRRPseudonym(pai.pseudonym.p1, q2)


def pai_to_json(pai: PseudonymAccessInfo) -> str:
    return json.dumps(
        {
            "p1": pai.pseudonym.p1.to_bytes().hex(),
            "p2": pai.pseudonym.p2.to_bytes().hex(),
            "rk": pai.rk.to_bytes().hex(),
            "ct": pai.ct.hex(),
        },
        sort_keys=True,
    )


def pai_from_json(data: str, ctx) -> PseudonymAccessInfo:
    obj = json.loads(data)
    return PseudonymAccessInfo(
        Pseudonym(
            ctx.gt_from_bytes(bytes.fromhex(obj["p1"])),
            ctx.g2_from_bytes(bytes.fromhex(obj["p2"])),
        ),
        ctx.g1_from_bytes(bytes.fromhex(obj["rk"])),
        bytes.fromhex(obj["ct"]),
    )


def hrr_recover(
    hp: HRRPseudonym,
    ct: bytes,
    keys: PREHRRKeys,
    salt: bytes = SYSTEM_SALT,
) -> bytes:
    """Recover the patient identifier: id_gt = Q1 / Q2^(1/y), then decrypt."""
    ctx = keys.ctx
    y_inv = int(invert(keys.y, ctx.r))
    id_gt = hp.q1 / (hp.q2 ** y_inv)
    key = derive_key(id_gt, salt)
    if len(ct) < AEAD_NONCE_LEN + AEAD_TAG_LEN:
        raise PREError("ciphertext/pseudonym mismatch")
    try:
        return AESGCM(key).decrypt(ct[:AEAD_NONCE_LEN], ct[AEAD_NONCE_LEN:], None)
    except InvalidTag as exc:
        raise PREError("ciphertext/pseudonym mismatch") from exc
