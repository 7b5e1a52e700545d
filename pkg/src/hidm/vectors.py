"""Deterministic test vectors for cross-language implementations."""

from __future__ import annotations

from .algebra import PairingContext, SchnorrGroup, hash_to_field
from .pre import (
    HKDF_INFO,
    SYSTEM_SALT,
    derive_key,
    hrr_keygen,
    identity_hash,
    patient_keygen,
    pseudonym_generate,
    transform_to_hrr,
)
from .proofs import pbp_prove, pbp_to_dict
from .randomness import RandomSource
from .signatures import pbs_issue, schnorr_keygen, schnorr_sign


def emit_vectors(seed: str) -> dict:
    ctx = PairingContext.default()
    group = SchnorrGroup.default()
    rng = RandomSource(seed=seed.encode())

    h2f = [
        {
            "tag": "HIDM/test",
            "input": f"input-{i}",
            "modulus": str(ctx.r),
            "output": str(hash_to_field(b"HIDM/test", f"input-{i}".encode(), ctx.r)),
        }
        for i in range(3)
    ]

    hkdf = []
    for i in range(3):
        el = ctx.z_pow(i + 1)
        hkdf.append({
            "ikm_gt_exponent": i + 1,
            "salt": SYSTEM_SALT.hex(),
            "info": HKDF_INFO.decode(),
            "okm": derive_key(el, SYSTEM_SALT).hex(),
        })

    schnorr_key = schnorr_keygen(group, rng.child("schnorr"))
    sig = schnorr_sign(b"vector message", schnorr_key, rng.child("schnorr-sig"))
    schnorr_vec = {
        "public": hex(schnorr_key.y),
        "message": "vector message",
        "c": hex(sig.c),
        "s": hex(sig.s),
    }

    pbs_rng = rng.child("pbs")
    ati = pbs_rng.uuid4()
    pbs_sig, transcript = pbs_issue(2_000_000_000, ati, schnorr_key,
                                    pbs_rng.child("user"), pbs_rng.child("signer"))
    pbs_vec = {
        "ati": ati.hex(),
        "exp": 2_000_000_000,
        "c": hex(pbs_sig.c),
        "s": hex(pbs_sig.s),
        "t": pbs_sig.t.hex(),
        "signer_view": {k: (hex(v) if isinstance(v, int) else v)
                        for k, v in transcript.fields().items()},
    }

    pre_rng = rng.child("pre")
    patient_keys = patient_keygen(ctx, pre_rng)
    hrr_keys = hrr_keygen(ctx, pre_rng)
    nonce = ctx.random_scalar(pre_rng)
    pai = pseudonym_generate(b"vector-patient", patient_keys, hrr_keys.pk, pre_rng, nonce=nonce)
    hp = transform_to_hrr(pai, patient_keys.pk, hrr_keys.pk, ctx)
    h = identity_hash(ctx, b"vector-patient")
    pbp = pbp_prove(pai.pseudonym, nonce, h, patient_keys.pk, ctx, pre_rng)
    pre_vec = {
        "patient_id": b"vector-patient".hex(),
        "p1": pai.pseudonym.p1.to_bytes().hex(),
        "p2": pai.pseudonym.p2.to_bytes().hex(),
        "rk": pai.rk.to_bytes().hex(),
        "ct": pai.ct.hex(),
        "pk_patient": patient_keys.pk.to_bytes().hex(),
        "pk_hrr": hrr_keys.pk.to_bytes().hex(),
        "q2": hp.q2.to_bytes().hex(),
        "pbp": pbp_to_dict(pbp),
    }

    return {
        "seed": seed,
        "curve": ctx.curve_id,
        "generators": {
            "g1": ctx.g1.to_bytes().hex(),
            "g2": ctx.g2.to_bytes().hex(),
            "z": ctx.z.to_bytes().hex(),
        },
        "hash_to_field": h2f,
        "hkdf": hkdf,
        "schnorr": schnorr_vec,
        "partially_blind_schnorr": pbs_vec,
        "pseudonym": pre_vec,
    }
