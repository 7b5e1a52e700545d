"""Zero-knowledge machinery.

Two proof systems live here:

* PoKPCred — proof of possession of a CL-signed credential with selective
  attribute disclosure, made non-interactive over a caller-supplied
  context string so a proof minted for one session is dead in any other.
* PBProof — the pseudonym binding proof: the pseudonym pair (P1, P2)
  encodes the same nonce over z and over the patient public key, tied to
  the identifier hash h the verifier computes independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import invert, mpz, powmod

from .algebra import G2Element, GTElement, hash_to_field
from .pre import Pseudonym
from .signatures.cl import (
    CHALLENGE_BITS,
    E_BITS,
    E_INTERVAL_BITS,
    MSG_MODULUS,
    RSA_MODULUS_BITS,
    STAT_BITS,
    V_BITS,
    CLVariant,
    attrs_to_scalars,
    cl_verify,
)

POK_TAG = b"HIDM/cl-pok"
PBP_TAG = b"HIDM/pbp"

_MSG_BITS = 255


class ProofError(Exception):
    pass


@dataclass(frozen=True)
class PoKPCred:
    """Selective-disclosure possession proof for a Patient Credential."""

    scheme: CLVariant
    disclosed: dict  # slot index -> attribute bytes
    body: dict  # scheme-specific transcript fields


def _encode_disclosed(disclosed: dict) -> bytes:
    out = b""
    for slot in sorted(disclosed):
        attr = disclosed[slot]
        out += int(slot).to_bytes(2, "big") + len(attr).to_bytes(4, "big") + attr
    return out


# ---------------------------------------------------------------------------
# Pairing-variant PoK: randomize the signature, commit to the hidden
# messages in G2, prove the representation, and close with one pairing
# product check e(sigma1', kappa + disclosed part) == e(sigma2', g2).

def _pairing_challenge(public, s1b, s2b, kb, tb, context, disclosed, r):
    data = public.to_bytes() + s1b + s2b + kb + tb + context + _encode_disclosed(disclosed)
    return hash_to_field(POK_TAG, data, r)


def _pok_prove_pairing(attrs, sig, public, disclose, context, rng):
    ctx = public.ctx
    r = ctx.r
    msgs = attrs_to_scalars(attrs, r)
    hidden = [i for i in range(len(attrs)) if i not in disclose]
    disclosed = {i: attrs[i] for i in disclose}

    w = ctx.random_scalar(rng)
    t = ctx.random_scalar(rng)
    sigma1p = w * sig.sigma1
    sigma2p = w * (sig.sigma2 + t * sig.sigma1)

    # kappa commits to the hidden messages and the fresh blinder t
    kappa = public.x_tilde + public.hidden_point({i: msgs[i] for i in hidden}, t)
    k = {i: ctx.random_scalar(rng) for i in hidden}
    k_t = ctx.random_scalar(rng)
    commit = public.hidden_point(k, k_t)

    c = _pairing_challenge(
        public, sigma1p.to_bytes(), sigma2p.to_bytes(),
        kappa.to_bytes(), commit.to_bytes(), context, disclosed, r,
    )
    s_m = {i: (k[i] + c * msgs[i]) % r for i in hidden}
    s_t = (k_t + c * t) % r
    body = {
        "sigma1": sigma1p.to_bytes().hex(),
        "sigma2": sigma2p.to_bytes().hex(),
        "kappa": kappa.to_bytes().hex(),
        "commit": commit.to_bytes().hex(),
        "c": c,
        "s_m": {int(i): int(v) for i, v in s_m.items()},
        "s_t": int(s_t),
    }
    return PoKPCred(CLVariant.PAIRING, disclosed, body)


def _pok_verify_pairing(proof, public, context) -> bool:
    ctx = public.ctx
    r = ctx.r
    try:
        sigma1p = ctx.g1_from_bytes(bytes.fromhex(proof.body["sigma1"]))
        sigma2p = ctx.g1_from_bytes(bytes.fromhex(proof.body["sigma2"]))
        kappa = ctx.g2_from_bytes(bytes.fromhex(proof.body["kappa"]))
        commit = ctx.g2_from_bytes(bytes.fromhex(proof.body["commit"]))
        c = int(proof.body["c"])
        s_m = {int(i): int(v) for i, v in proof.body["s_m"].items()}
        s_t = int(proof.body["s_t"])
    except (KeyError, ValueError, TypeError):
        return False
    if sigma1p.is_identity:
        return False
    slots = set(range(public.n_slots))
    if set(proof.disclosed) | set(s_m) != slots or set(proof.disclosed) & set(s_m):
        return False
    if not all(0 <= v < r for v in list(s_m.values()) + [s_t, c]):
        return False
    expected_c = _pairing_challenge(
        public, sigma1p.to_bytes(), sigma2p.to_bytes(),
        kappa.to_bytes(), commit.to_bytes(), context, proof.disclosed, r,
    )
    if c != expected_c:
        return False
    # representation check over G2: sum s_i Y_i + s_t g2 == commit + c (kappa - X)
    lhs = public.hidden_point(s_m, s_t)
    if lhs != commit + c * (kappa - public.x_tilde):
        return False
    # signature check: e(sigma1', kappa + sum disclosed m_j Y_j) == e(sigma2', g2)
    target = kappa
    for j, attr in proof.disclosed.items():
        m_j = hash_to_field(b"HIDM/cl/attr", attr, r)
        target = target + public.base_mul(j, m_j)
    return ctx.multi_pair(
        [(sigma1p, target), (-sigma2p, public.prepared["g2"])]
    ).is_identity


# ---------------------------------------------------------------------------
# RSA-variant PoK (randomize A, prove the strong-RSA relation in the exponent)

_E_OFFSET = 1 << (E_BITS - 1)
_K_E_BITS = E_INTERVAL_BITS + STAT_BITS + CHALLENGE_BITS
_RA_BITS = RSA_MODULUS_BITS + STAT_BITS
_K_V_BITS = V_BITS + E_BITS + STAT_BITS * 2 + CHALLENGE_BITS + 2
_K_M_BITS = _MSG_BITS + STAT_BITS + CHALLENGE_BITS


def _rsa_challenge(public, a_prime, t_commit, context, disclosed):
    data = (
        public.to_bytes()
        + int(a_prime).to_bytes(RSA_MODULUS_BITS // 8, "big")
        + int(t_commit).to_bytes(RSA_MODULUS_BITS // 8, "big")
        + context
        + _encode_disclosed(disclosed)
    )
    return hash_to_field(POK_TAG, data, MSG_MODULUS)


def _powmod_signed(base, e, n):
    if e >= 0:
        return powmod(base, e, n)
    return powmod(invert(base, n), -e, n)


def _pok_prove_rsa(attrs, sig, public, disclose, context, rng):
    n = public.n
    msgs = attrs_to_scalars(attrs, MSG_MODULUS)
    hidden = [i for i in range(len(attrs)) if i not in disclose]
    disclosed = {i: attrs[i] for i in disclose}

    r_a = int.from_bytes(rng.read(_RA_BITS // 8), "big")
    a_prime = mpz(sig.a) * powmod(public.s, r_a, n) % n
    v_prime = sig.v - sig.e * r_a
    e_prime = sig.e - _E_OFFSET

    k_e = int.from_bytes(rng.read(_K_E_BITS // 8), "big")
    k_v = int.from_bytes(rng.read(_K_V_BITS // 8), "big")
    k_m = {i: int.from_bytes(rng.read(_K_M_BITS // 8), "big") for i in hidden}
    t_commit = powmod(a_prime, k_e, n) * powmod(public.s, k_v, n) % n
    for i in hidden:
        t_commit = t_commit * powmod(public.rs[i], k_m[i], n) % n

    c = _rsa_challenge(public, a_prime, t_commit, context, disclosed)
    body = {
        "a_prime": int(a_prime),
        "t": int(t_commit),
        "c": int(c),
        "s_e": int(k_e + c * e_prime),
        "s_v": int(k_v + c * v_prime),
        "s_m": {int(i): int(k_m[i] + c * msgs[i]) for i in hidden},
    }
    return PoKPCred(CLVariant.RSA, disclosed, body)


def _pok_verify_rsa(proof, public, context) -> bool:
    n = public.n
    try:
        a_prime = mpz(proof.body["a_prime"])
        t_commit = mpz(proof.body["t"])
        c = int(proof.body["c"])
        s_e = int(proof.body["s_e"])
        s_v = int(proof.body["s_v"])
        s_m = {int(i): int(v) for i, v in proof.body["s_m"].items()}
    except (KeyError, ValueError, TypeError):
        return False
    if not (1 < a_prime < n) or not (0 < t_commit < n):
        return False
    slots = set(range(public.n_slots))
    if set(proof.disclosed) | set(s_m) != slots or set(proof.disclosed) & set(s_m):
        return False
    if not (0 <= s_e < (1 << (_K_E_BITS + 1))):
        return False
    if _rsa_challenge(public, a_prime, t_commit, context, proof.disclosed) != c:
        return False
    z_hat = public.z
    for j, attr in proof.disclosed.items():
        m_j = hash_to_field(b"HIDM/cl/attr", attr, MSG_MODULUS)
        z_hat = z_hat * invert(powmod(public.rs[j], m_j, n), n) % n
    # statement base: Z_hat * A'^(-2^(l_e - 1))
    base = z_hat * invert(powmod(a_prime, _E_OFFSET, n), n) % n
    lhs = powmod(a_prime, s_e, n) * _powmod_signed(public.s, s_v, n) % n
    for i, s in s_m.items():
        if not 0 <= i < public.n_slots:
            return False
        lhs = lhs * powmod(public.rs[i], s, n) % n
    rhs = t_commit * powmod(base, c, n) % n
    return lhs == rhs


# ---------------------------------------------------------------------------
# Public PoK entry points

def pok_pcred_prove(attrs, sig, public, disclose, context: bytes, rng) -> PoKPCred:
    """Prove possession of a credential, revealing only `disclose` slots.

    Refuses to emit anything when the credential itself does not verify.
    """
    if not disclose <= set(range(len(attrs))):
        raise ProofError("disclosed slots out of range")
    if not cl_verify(attrs, sig, public):
        raise ProofError("invalid credential")
    if public.variant == CLVariant.PAIRING:
        return _pok_prove_pairing(attrs, sig, public, disclose, context, rng)
    return _pok_prove_rsa(attrs, sig, public, disclose, context, rng)


def pok_pcred_verify(proof: PoKPCred, public, context: bytes) -> bool:
    try:
        if proof.scheme != public.variant:
            return False
        if proof.scheme == CLVariant.PAIRING:
            return _pok_verify_pairing(proof, public, context)
        return _pok_verify_rsa(proof, public, context)
    except (TypeError, ValueError, AttributeError):
        return False


def pok_to_dict(proof: PoKPCred) -> dict:
    return {
        "scheme": proof.scheme.value,
        "disclosed": {str(i): v.hex() for i, v in proof.disclosed.items()},
        "body": proof.body,
    }


def pok_from_dict(obj: dict) -> PoKPCred:
    return PoKPCred(
        CLVariant(obj["scheme"]),
        {int(i): bytes.fromhex(v) for i, v in obj["disclosed"].items()},
        obj["body"],
    )


def pbp_to_dict(proof: PBProof) -> dict:
    return {
        "t1": proof.t1.to_bytes().hex(),
        "t2": proof.t2.to_bytes().hex(),
        "c": int(proof.c),
        "s1": int(proof.s1),
        "s2": None if proof.s2 is None else int(proof.s2),
    }


def pbp_from_dict(obj: dict, ctx) -> PBProof:
    return PBProof(
        ctx.gt_from_bytes(bytes.fromhex(obj["t1"])),
        ctx.g2_from_bytes(bytes.fromhex(obj["t2"])),
        int(obj["c"]),
        int(obj["s1"]),
        None if obj["s2"] is None else int(obj["s2"]),
    )


# ---------------------------------------------------------------------------
# Pseudonym Binding Proof

@dataclass(frozen=True)
class PBProof:
    t1: GTElement
    t2: G2Element
    c: int
    s1: int
    s2: int | None = None  # None in strict single-response mode

    @property
    def strict(self) -> bool:
        return self.s2 is None


def _pbp_challenge(ctx, pseudonym: Pseudonym, t1, t2, pk_patient, h: int) -> int:
    data = (
        pseudonym.to_bytes()
        + t1.to_bytes()
        + t2.to_bytes()
        + pk_patient.to_bytes()
        + ctx.scalar_to_bytes(h)
    )
    return ctx.hash_to_scalar(PBP_TAG, data)


def pbp_prove(
    pseudonym: Pseudonym,
    nonce: int,
    h: int,
    pk_patient: G2Element,
    ctx,
    rng,
    strict: bool = False,
) -> PBProof:
    """Prove the pseudonym was formed from nonce and identifier hash h.

    Default mode uses independent commitment nonces (t1, t2) and two
    responses; strict mode shares one nonce so a single response covers
    both verification equations.
    """
    t1 = ctx.random_scalar(rng)
    t2 = t1 if strict else ctx.random_scalar(rng)
    commit1 = ctx.z_pow(t1)
    commit2 = t2 * pk_patient
    c = _pbp_challenge(ctx, pseudonym, commit1, commit2, pk_patient, h)
    s1 = (t1 + c * nonce) % ctx.r
    if strict:
        return PBProof(commit1, commit2, c, s1, None)
    s2 = (t2 + c * nonce) % ctx.r
    return PBProof(commit1, commit2, c, s1, s2)


def pbp_verify(
    pseudonym: Pseudonym,
    proof: PBProof,
    pk_patient: G2Element,
    h: int,
    ctx,
) -> bool:
    """Check z^s1 = T1 * (P1 / z^h)^c and s2 * pk = T2 + c * P2."""
    try:
        c_prime = _pbp_challenge(ctx, pseudonym, proof.t1, proof.t2, pk_patient, h)
        if c_prime != proof.c:
            return False
        s1 = int(proof.s1)
        s2 = s1 if proof.strict else int(proof.s2)
        if not (0 <= s1 < ctx.r and 0 <= s2 < ctx.r):
            return False
        blinded = pseudonym.p1 / ctx.z_pow(h)
        if ctx.z_pow(s1) != proof.t1 * (blinded ** c_prime):
            return False
        return s2 * pk_patient == proof.t2 + c_prime * pseudonym.p2
    except (TypeError, ValueError, AttributeError):
        return False
