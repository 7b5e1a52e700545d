"""Partially blind Schnorr signatures.

Signs a hidden 16-byte token identifier together with a signer-chosen
expiry that both parties can see.  The four-message flow keeps the
identifier, its commitment nonce, and the blinding scalars away from the
signer; the signer transcript records exactly what it saw, which the
attack simulator and the blindness tests inspect.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..algebra import SchnorrGroup, hash_to_field
from .schnorr import SchnorrKeypair

COMMIT_TAG = b"HIDM/pbs/commit"
CHALLENGE_TAG = b"HIDM/pbs/challenge"
COMMON_TAG = b"HIDM/pbs/common"


class PbsError(Exception):
    pass


@dataclass(frozen=True)
class PartiallyBlindSig:
    c: int
    s: int
    t: bytes  # commitment nonce for the blinded message


@dataclass
class SignerTranscript:
    """Everything the signer saw or produced during one issuance."""

    commitment: int = 0  # R = g^r
    blinded_challenge: int = 0  # cu
    blinded_response: int = 0  # s'
    common_challenge: int = 0  # cs
    exp: int = 0

    def fields(self) -> dict:
        return {
            "commitment": self.commitment,
            "blinded_challenge": self.blinded_challenge,
            "blinded_response": self.blinded_response,
            "common_challenge": self.common_challenge,
            "exp": self.exp,
        }


def _encode_exp(exp: int) -> bytes:
    return int(exp).to_bytes(8, "big")


def _commit(ati: bytes, t: bytes, group: SchnorrGroup) -> bytes:
    v = hash_to_field(COMMIT_TAG, ati + t, group.q)
    return group.scalar_to_bytes(v)


def _common_challenge(y: int, exp: int, group: SchnorrGroup) -> int:
    return hash_to_field(COMMON_TAG, group.element_to_bytes(y) + _encode_exp(exp), group.q)


def _blinded_challenge_base(r_prime: int, commit: bytes, group: SchnorrGroup) -> int:
    return hash_to_field(CHALLENGE_TAG, group.element_to_bytes(r_prime) + commit, group.q)


class PbsSignerSession:
    """Issuer half of the four-message flow."""

    def __init__(self, key: SchnorrKeypair, rng):
        self.key = key
        self._rng = rng
        self._nonce = None
        self.transcript = SignerTranscript()

    def commitment(self) -> int:
        """(1) fresh nonce commitment R = g^r."""
        self._nonce = self.key.group.random_scalar(self._rng)
        big_r = self.key.group.exp_g(self._nonce)
        self.transcript.commitment = big_r
        return big_r

    def respond(self, blinded_challenge: int, exp: int) -> int:
        """(3) s' = r + (cu + cs) * x with cs binding the expiry."""
        if self._nonce is None:
            raise PbsError("respond() before commitment()")
        group = self.key.group
        cs = _common_challenge(self.key.y, exp, group)
        c_combined = (blinded_challenge + cs) % group.q
        s_prime = (self._nonce + c_combined * self.key.x) % group.q
        self._nonce = None  # single-use
        self.transcript.blinded_challenge = blinded_challenge
        self.transcript.blinded_response = s_prime
        self.transcript.common_challenge = cs
        self.transcript.exp = exp
        return s_prime


class PbsUserSession:
    """Requester half; holds the token identifier and blinding scalars."""

    def __init__(self, y: int, group, rng):
        self.y = y
        self.group = group
        self._rng = rng
        self._state = None

    def challenge(self, big_r: int, ati: bytes) -> int:
        """(2) blind the signer commitment and the token identifier."""
        if len(ati) != 16:
            raise PbsError("ATI must be 16 bytes")
        group = self.group
        if not group.in_subgroup(big_r):
            raise PbsError("signer commitment not in the subgroup")
        alpha = group.random_scalar(self._rng)
        beta = group.random_scalar(self._rng)
        t = self._rng.read(32)
        commit = _commit(ati, t, group)
        r_prime = big_r * group.exp_g(alpha) % group.p * group.exp(self.y, beta) % group.p
        cu_prime = _blinded_challenge_base(r_prime, commit, group)
        cu = (cu_prime + beta) % group.q
        self._state = (alpha, t, cu_prime)
        return cu

    def finalize(self, s_prime: int, exp: int) -> PartiallyBlindSig:
        """(4) unblind into the final (c, s, t)."""
        if self._state is None:
            raise PbsError("finalize() before challenge()")
        alpha, t, cu_prime = self._state
        self._state = None
        group = self.group
        cs = _common_challenge(self.y, exp, group)
        s = (s_prime + alpha) % group.q
        c = (cu_prime + cs) % group.q
        return PartiallyBlindSig(c, s, t)


def pbs_issue(exp: int, ati: bytes, signer: SchnorrKeypair, user_rng, signer_rng):
    """Run the four-message issuance in one call.

    Message order: (1) signer commitment R; (2) user's blinded challenge
    cu = H(R * g^alpha * y^beta || H(ATI || t)) + beta; (3) signer response
    s' = r + (cu + cs) * x with cs = H(y || exp); (4) user unblinds to
    (c, s, t) = (cu' + cs, s' + alpha, t).  Returns (sig, signer
    transcript); the transcript records exactly what the signer saw.
    """
    signer_session = PbsSignerSession(signer, signer_rng)
    user_session = PbsUserSession(signer.y, signer.group, user_rng)
    big_r = signer_session.commitment()
    cu = user_session.challenge(big_r, ati)
    s_prime = signer_session.respond(cu, exp)
    sig = user_session.finalize(s_prime, exp)
    return sig, signer_session.transcript


def pbs_verify(ati: bytes, exp: int, sig: PartiallyBlindSig, y: int, group: SchnorrGroup) -> bool:
    """Signature check only; expiry policy is the caller's concern."""
    try:
        if len(ati) != 16 or len(sig.t) != 32:
            return False
        if not (0 <= sig.c < group.q and 0 <= sig.s < group.q):
            return False
        if not group.in_subgroup(y):
            return False
        commit = _commit(ati, sig.t, group)
        cs = _common_challenge(y, exp, group)
        r_hat = group.exp_g(sig.s) * group.exp(y, (-sig.c) % group.q) % group.p
        expected = (_blinded_challenge_base(r_hat, commit, group) + cs) % group.q
        return sig.c == expected
    except (TypeError, ValueError, AttributeError):
        return False
