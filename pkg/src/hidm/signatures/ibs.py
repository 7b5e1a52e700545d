"""Blind identity-based signatures over the pairing groups.

Identities hash into G1 and user keys are extracted from a blinded
identity point, so the issuer never learns which identity it keyed.
Signing follows the classic two-element (U, V) identity-based scheme:
U = a*Q_id, V = (a + h)*d with h bound to the message and U.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..algebra import G1Element, G2Element

IDENTITY_TAG = b"HIDM/ibs/identity"
CHALLENGE_TAG = b"HIDM/ibs"


class IbsError(Exception):
    pass


@dataclass(frozen=True)
class IBSMasterKey:
    ctx: object
    s: int
    mpk: G2Element  # s * g2


@dataclass(frozen=True)
class IBSUserKey:
    ctx: object
    identity: bytes  # canonical pseudonym serialization
    d: G1Element  # s * Q_id


def ibs_keygen(ctx, rng) -> IBSMasterKey:
    s = ctx.random_scalar(rng)
    return IBSMasterKey(ctx, s, ctx.g2_base_mul(s))


def identity_point(ctx, identity: bytes) -> G1Element:
    return ctx.hash_to_g1(IDENTITY_TAG, identity)


def ibs_extract_direct(identity: bytes, master: IBSMasterKey) -> IBSUserKey:
    """Non-blind extraction; the reference the blind path must agree with."""
    q = identity_point(master.ctx, identity)
    return IBSUserKey(master.ctx, identity, master.s * q)


def ibs_issuer_extract(blinded: G1Element, master: IBSMasterKey) -> G1Element:
    """Issuer side of blind extraction: d' = s * Q' (rejects identity Q')."""
    if blinded.is_identity:
        raise IbsError("blinded identity point is the identity element")
    return master.s * blinded


def ibs_blind_extract(identity: bytes, master: IBSMasterKey, user_rng):
    """Two-message blind extraction; returns (user key, issuer view).

    The user blinds Q_id with a random scalar, the issuer multiplies by
    the master secret, and the user strips the blinder.  The issuer view
    contains only the blinded point.
    """
    ctx = master.ctx
    q = identity_point(ctx, identity)
    b = ctx.random_scalar(user_rng)
    blinded = b * q
    d_blind = ibs_issuer_extract(blinded, master)
    from gmpy2 import invert

    d = int(invert(b, ctx.r)) * d_blind
    key = IBSUserKey(ctx, identity, d)
    issuer_view = {"blinded_identity": blinded.to_bytes().hex()}
    return key, issuer_view


def key_matches_identity(key: IBSUserKey, mpk: G2Element) -> bool:
    """pairing(d, g2) == pairing(Q_id, mpk)."""
    ctx = key.ctx
    q = identity_point(ctx, key.identity)
    return ctx.multi_pair([(key.d, ctx.g2), (-q, mpk)]).is_identity


def ibs_sign(msg: bytes, key: IBSUserKey, rng):
    ctx = key.ctx
    q = identity_point(ctx, key.identity)
    a = ctx.random_scalar(rng)
    u = a * q
    h = ctx.hash_to_scalar(CHALLENGE_TAG, msg + u.to_bytes())
    v = ((a + h) % ctx.r) * key.d
    return (u, v)


def ibs_verify(msg: bytes, sig, identity: bytes, mpk: G2Element, ctx) -> bool:
    """Accept iff pairing(V, g2) == pairing(U + h*Q_id, mpk)."""
    try:
        u, v = sig
        if not isinstance(u, G1Element) or not isinstance(v, G1Element):
            return False
        h = ctx.hash_to_scalar(CHALLENGE_TAG, msg + u.to_bytes())
        q = identity_point(ctx, identity)
        target = u + h * q
        return ctx.multi_pair([(v, ctx.g2), (-target, mpk)]).is_identity
    except (TypeError, ValueError, AttributeError):
        return False
