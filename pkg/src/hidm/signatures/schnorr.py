"""Schnorr signatures over a prime-order modular subgroup."""

from __future__ import annotations

from dataclasses import dataclass

from ..algebra import SchnorrGroup, hash_to_field

CHALLENGE_TAG = b"HIDM/schnorr"


@dataclass(frozen=True)
class SchnorrKeypair:
    group: SchnorrGroup
    x: int
    y: int  # g^x mod p

    @property
    def public(self) -> int:
        return self.y


@dataclass(frozen=True)
class SchnorrSig:
    c: int
    s: int


def schnorr_keygen(group: SchnorrGroup, rng) -> SchnorrKeypair:
    x = group.random_scalar(rng)
    return SchnorrKeypair(group, x, group.exp_g(x))


def schnorr_challenge(commitment: int, msg: bytes, group: SchnorrGroup) -> int:
    return hash_to_field(CHALLENGE_TAG, group.element_to_bytes(commitment) + msg, group.q)


def schnorr_response(nonce: int, challenge: int, x: int, q: int) -> int:
    return (nonce + challenge * x) % q


def schnorr_recover_commitment(sig: SchnorrSig, y: int, group: SchnorrGroup) -> int:
    """g^s * y^(-c) mod p; equals the signing commitment for a valid sig."""
    return group.exp(group.g, sig.s) * group.exp(y, (-sig.c) % group.q) % group.p


def schnorr_sign(msg: bytes, key: SchnorrKeypair, rng) -> SchnorrSig:
    group = key.group
    nonce = group.random_scalar(rng)
    commitment = group.exp_g(nonce)
    c = schnorr_challenge(commitment, msg, group)
    return SchnorrSig(c, schnorr_response(nonce, c, key.x, group.q))


def schnorr_verify(msg: bytes, sig: SchnorrSig, y: int, group: SchnorrGroup) -> bool:
    try:
        if not (0 <= sig.c < group.q and 0 <= sig.s < group.q):
            return False
        if not group.in_subgroup(y):
            return False
        commitment = schnorr_recover_commitment(sig, y, group)
        return sig.c == schnorr_challenge(commitment, msg, group)
    except (TypeError, ValueError, AttributeError):
        return False
