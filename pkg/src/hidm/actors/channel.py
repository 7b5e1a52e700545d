"""Mutually authenticated secure channels.

A channel is an ephemeral Diffie-Hellman exchange over the Schnorr group,
authenticated by each side signing the handshake transcript with the
static key published in its DID document.  Application messages travel in
sequence-numbered AEAD frames; a world-level log keeps every ciphertext
so the eavesdropper scan can inspect exactly what a wire observer sees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ..signatures import schnorr_sign, schnorr_verify

HANDSHAKE_TAG = b"HIDM/channel/handshake"
KEY_INFO = b"HIDM/channel/key/v1"


class ChannelError(Exception):
    pass


@dataclass(frozen=True)
class Frame:
    sender_did: str
    receiver_did: str
    seq: int
    ciphertext: bytes


@dataclass
class SecureChannel:
    local_did: str
    peer_did: str
    key: bytes
    log: list  # shared frame log (world-level, append-only)
    _send_seq: dict = field(default_factory=dict)
    _recv_seq: dict = field(default_factory=dict)
    transcript: list = field(default_factory=list)

    def _nonce(self, sender_did: str, seq: int) -> bytes:
        # direction byte disambiguates the two senders under one key
        direction = b"\x01" if sender_did == min(self.local_did, self.peer_did) else b"\x02"
        return direction + b"\x00" * 3 + seq.to_bytes(8, "big")

    def send(self, sender_did: str, plaintext: bytes) -> Frame:
        if sender_did not in (self.local_did, self.peer_did):
            raise ChannelError("sender not a channel endpoint")
        receiver = self.peer_did if sender_did == self.local_did else self.local_did
        seq = self._send_seq.get(sender_did, 0)
        self._send_seq[sender_did] = seq + 1
        aad = sender_did.encode() + b"->" + receiver.encode() + seq.to_bytes(8, "big")
        ct = AESGCM(self.key).encrypt(self._nonce(sender_did, seq), plaintext, aad)
        frame = Frame(sender_did, receiver, seq, ct)
        self.log.append(frame)
        self.transcript.append(frame)
        return frame

    def recv(self, receiver_did: str, frame: Frame) -> bytes:
        if frame.receiver_did != receiver_did:
            raise ChannelError("frame addressed to a different endpoint")
        expected = self._recv_seq.get(frame.sender_did, 0)
        if frame.seq != expected:
            raise ChannelError("stale or out-of-order sequence number")
        aad = frame.sender_did.encode() + b"->" + frame.receiver_did.encode() + frame.seq.to_bytes(8, "big")
        try:
            plaintext = AESGCM(self.key).decrypt(
                self._nonce(frame.sender_did, frame.seq), frame.ciphertext, aad
            )
        except Exception as exc:
            raise ChannelError("frame authentication failed") from exc
        self._recv_seq[frame.sender_did] = expected + 1
        return plaintext

    def transfer(self, sender_did: str, plaintext: bytes) -> bytes:
        """send + recv in one step for in-process episode flow."""
        frame = self.send(sender_did, plaintext)
        return self.recv(frame.receiver_did, frame)


def establish_channel(a, b, did_ledger, group, log) -> SecureChannel:
    """Fresh mutually authenticated channel between two entities.

    Refused when either DID does not resolve or a handshake signature
    fails under the ledger-published static key.
    """
    doc_a = did_ledger.resolve(a.did)
    doc_b = did_ledger.resolve(b.did)
    if doc_a is None or doc_b is None:
        raise ChannelError("DID resolution failed")

    eph_a = group.random_scalar(a.rng)
    eph_b = group.random_scalar(b.rng)
    pub_a = group.exp_g(eph_a)
    pub_b = group.exp_g(eph_b)
    transcript = (
        HANDSHAKE_TAG
        + a.did.encode() + b"|" + b.did.encode()
        + group.element_to_bytes(pub_a) + group.element_to_bytes(pub_b)
    )
    sig_a = schnorr_sign(transcript, a.static_key, a.rng)
    sig_b = schnorr_sign(transcript, b.static_key, b.rng)

    for doc, sig in ((doc_a, sig_a), (doc_b, sig_b)):
        key_hex = doc.key_for("control")
        if key_hex is None:
            raise ChannelError("no control key in DID document")
        y = int.from_bytes(bytes.fromhex(key_hex), "big")
        if not schnorr_verify(transcript, sig, y, group):
            raise ChannelError("handshake key proof failed")

    shared = group.exp(pub_b, eph_a)
    assert shared == group.exp(pub_a, eph_b)
    key = HKDF(algorithm=SHA256(), length=32, salt=None, info=KEY_INFO + transcript[:64]).derive(
        group.element_to_bytes(shared)
    )
    return SecureChannel(local_did=a.did, peer_did=b.did, key=key, log=log)
