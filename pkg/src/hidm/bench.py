"""Benchmark harness for the six protocol scenarios.

Each scenario is timed twelve times; the fastest and slowest runs are
dropped and the remaining ten averaged.  The plain-RSA baseline applies
only to credential issuance.  Reported sizes are the serialized byte
lengths of the artifacts each scenario exchanges.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import PairingContext, SchnorrGroup
from .credentials import BioHashParams, SLOT_INDEX, biohash_enroll, pt_signed_bytes
from .pre import Pseudonym, hrr_keygen, patient_keygen, pseudonym_generate, pai_to_json
from .proofs import pok_pcred_prove, pok_pcred_verify, pok_to_dict
from .randomness import LogicalClock, RandomSource
from .signatures import (
    CLVariant,
    cl_keygen,
    cl_sign,
    cl_verify,
    ibs_blind_extract,
    ibs_keygen,
    ibs_sign,
    ibs_verify,
    identity_point,
    pbs_verify,
    schnorr_keygen,
    schnorr_sign,
    schnorr_verify,
)
from .signatures.ibs import ibs_extract_direct
from .signatures.pbs import PbsSignerSession, PbsUserSession

RUNS = 12
SCHEMES = ("rsa", "cl-rsa", "cl-pairing")

SCENARIOS = {
    1: "credential-issuance",
    2: "pseudonym-token-issuance",
    3: "pseudonym-key-issuance",
    4: "appointment-token-issuance",
    5: "appointment-booking",
    6: "in-person-verification",
}


class BenchError(Exception):
    pass


@dataclass
class BenchRow:
    scheme: str
    scenario: int
    scenario_name: str
    payload_presignature_bytes: int
    full_request_bytes: int
    response_bytes: int
    signature_payload_bytes: int
    avg_time_ms: float
    samples_ms: list


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"methodology": {"runs": RUNS, "trim": "drop min and max, average 10"},
             "rows": [vars(r) for r in self.rows]},
            indent=2, sort_keys=True,
        )


def trimmed_mean_ms(samples: list) -> float:
    if len(samples) != RUNS:
        raise BenchError(f"expected {RUNS} samples")
    kept = sorted(samples)[1:-1]
    return sum(kept) / len(kept)


class _Workbench:
    """Keys and artifacts shared by the scenario closures."""

    def __init__(self, scheme: str, rng: RandomSource):
        self.ctx = PairingContext.default()
        self.group = SchnorrGroup.default()
        self.rng = rng
        self.clock = LogicalClock()
        self.attrs = None
        self.scheme = scheme
        features = np.random.default_rng(5).standard_normal(128)
        biohash = biohash_enroll(features, BioHashParams())
        self.attrs = [
            rng.read(16), b"did:hidm:patient:bench", rng.read(16),
            self.clock.now().to_bytes(8, "big"), biohash, b"did:hidm:apc",
        ]
        if scheme in ("cl-rsa", "cl-pairing"):
            variant = CLVariant.RSA if scheme == "cl-rsa" else CLVariant.PAIRING
            self.cl = cl_keygen(variant, 6, rng, ctx=self.ctx, self_test=False)
            self.cred_sig = cl_sign(self.attrs, self.cl, rng)
        else:
            from cryptography.hazmat.primitives.asymmetric import rsa

            self.rsa_key = rsa.generate_private_key(public_exponent=65537, key_size=3072)
        self.schnorr = schnorr_keygen(self.group, rng)
        self.ibs_master = ibs_keygen(self.ctx, rng)
        # a pseudonym context for scenarios 3, 5, 6
        self.patient_keys = patient_keygen(self.ctx, rng)
        hrr = hrr_keygen(self.ctx, rng)
        self.pai = pseudonym_generate(b"bench-patient-id", self.patient_keys, hrr.pk, rng)
        self.pseudonym_bytes = self.pai.pseudonym.to_bytes()
        self.ibs_key = ibs_extract_direct(self.pseudonym_bytes, self.ibs_master)


def _scenario_credential(bench: _Workbench):
    payload = b"".join(bench.attrs)
    if bench.scheme == "rsa":
        from cryptography.hazmat.primitives import hashes
        from cryptography.hazmat.primitives.asymmetric import padding

        def run():
            sig = bench.rsa_key.sign(payload, padding.PKCS1v15(), hashes.SHA256())
            bench.rsa_key.public_key().verify(sig, payload, padding.PKCS1v15(), hashes.SHA256())
            return sig

        sig = run()
        sizes = (len(payload), 0, len(payload) + len(sig), len(sig))
        return run, sizes

    def run():
        sig = cl_sign(bench.attrs, bench.cl, bench.rng)
        assert cl_verify(bench.attrs, sig, bench.cl.public)
        return sig

    sig = run()
    sizes = (len(payload), len(payload), len(payload) + len(sig.to_bytes()), len(sig.to_bytes()))
    return run, sizes


def _scenario_pt(bench: _Workbench):
    context = b"bench-pt"
    pt_body = pt_signed_bytes(bench.rng.read(16), bench.pai.pseudonym)

    def run():
        pok = pok_pcred_prove(bench.attrs, bench.cred_sig, bench.cl.public,
                              {SLOT_INDEX["patient_id"]}, context, bench.rng)
        assert pok_pcred_verify(pok, bench.cl.public, context)
        return schnorr_sign(pt_body, bench.schnorr, bench.rng)

    pok = pok_pcred_prove(bench.attrs, bench.cred_sig, bench.cl.public,
                          {SLOT_INDEX["patient_id"]}, context, bench.rng)
    request = json.dumps(pok_to_dict(pok)).encode() + pt_body
    sig = run()
    sig_len = len(bench.group.scalar_to_bytes(sig.c)) * 2
    sizes = (len(pt_body), len(request), len(pt_body) + sig_len, sig_len)
    return run, sizes


def _scenario_key_issuance(bench: _Workbench):
    context = b"bench-key"

    def run():
        pok = pok_pcred_prove(bench.attrs, bench.cred_sig, bench.cl.public,
                              {SLOT_INDEX["patient_id"]}, context, bench.rng)
        assert pok_pcred_verify(pok, bench.cl.public, context)
        key, _ = ibs_blind_extract(bench.pseudonym_bytes, bench.ibs_master, bench.rng)
        return key

    pok = pok_pcred_prove(bench.attrs, bench.cred_sig, bench.cl.public,
                          {SLOT_INDEX["patient_id"]}, context, bench.rng)
    blinded = identity_point(bench.ctx, bench.pseudonym_bytes)
    request = json.dumps(pok_to_dict(pok)).encode() + blinded.to_bytes()
    key_len = len(blinded.to_bytes())
    sizes = (len(blinded.to_bytes()), len(request), key_len, key_len)
    return run, sizes


def _scenario_at(bench: _Workbench):
    context = b"bench-at"
    exp = bench.clock.now() + 3600

    def run():
        pok = pok_pcred_prove(bench.attrs, bench.cred_sig, bench.cl.public,
                              {SLOT_INDEX["patient_id"]}, context, bench.rng)
        assert pok_pcred_verify(pok, bench.cl.public, context)
        signer = PbsSignerSession(bench.schnorr, bench.rng)
        user = PbsUserSession(bench.schnorr.y, bench.group, bench.rng)
        ati = bench.rng.uuid4()
        cu = user.challenge(signer.commitment(), ati)
        sig = user.finalize(signer.respond(cu, exp), exp)
        return ati, sig

    pok = pok_pcred_prove(bench.attrs, bench.cred_sig, bench.cl.public,
                          {SLOT_INDEX["patient_id"]}, context, bench.rng)
    ati, sig = run()
    sig_len = len(bench.group.scalar_to_bytes(sig.c)) * 2 + len(sig.t)
    request = json.dumps(pok_to_dict(pok)).encode() + bench.group.scalar_to_bytes(1) * 2
    sizes = (16 + 8, len(request), sig_len + 8, sig_len)
    return run, sizes


def _booking_body(bench: _Workbench, exp: int, at_sig) -> bytes:
    return json.dumps({
        "pai": json.loads(pai_to_json(bench.pai)),
        "at": {"ati": "00" * 16, "exp": exp,
               "sig": {"c": hex(at_sig.c), "s": hex(at_sig.s), "t": at_sig.t.hex()}},
        "schedule": {"date": "2026-09-01", "slot": "09:00", "provider": "did:hidm:ho-0"},
    }, sort_keys=True).encode()


def _scenario_booking(bench: _Workbench):
    exp = bench.clock.now() + 3600
    signer = PbsSignerSession(bench.schnorr, bench.rng)
    user = PbsUserSession(bench.schnorr.y, bench.group, bench.rng)
    ati = bench.rng.uuid4()
    cu = user.challenge(signer.commitment(), ati)
    at_sig = user.finalize(signer.respond(cu, exp), exp)
    body = _booking_body(bench, exp, at_sig)

    def run():
        sig = ibs_sign(body, bench.ibs_key, bench.rng)
        assert ibs_verify(body, sig, bench.pseudonym_bytes, bench.ibs_master.mpk, bench.ctx)
        assert pbs_verify(ati, exp, at_sig, bench.schnorr.y, bench.group)
        return sig

    sig = run()
    sig_len = len(sig[0].to_bytes()) * 2
    sizes = (len(body), len(body) + sig_len, 16, sig_len)
    return run, sizes


def _scenario_inperson(bench: _Workbench):
    context = b"bench-e6"
    pti = bench.rng.read(16)
    pt_body = pt_signed_bytes(pti, bench.pai.pseudonym)
    pt_sig = schnorr_sign(pt_body, bench.schnorr, bench.rng)
    body = json.dumps({"confirmation_code": "c0ffee", "biohash": "00" * 32}).encode()

    def run():
        sig = ibs_sign(body, bench.ibs_key, bench.rng)
        assert ibs_verify(body, sig, bench.pseudonym_bytes, bench.ibs_master.mpk, bench.ctx)
        pok = pok_pcred_prove(bench.attrs, bench.cred_sig, bench.cl.public,
                              {SLOT_INDEX["biohash"]}, context, bench.rng)
        assert pok_pcred_verify(pok, bench.cl.public, context)
        assert schnorr_verify(pt_body, pt_sig, bench.schnorr.y, bench.group)
        return sig

    pok = pok_pcred_prove(bench.attrs, bench.cred_sig, bench.cl.public,
                          {SLOT_INDEX["biohash"]}, context, bench.rng)
    sig = run()
    sig_len = len(sig[0].to_bytes()) * 2
    request = body + json.dumps(pok_to_dict(pok)).encode() + pt_body
    sizes = (len(body), len(request), 8, sig_len)
    return run, sizes


_BUILDERS = {
    1: _scenario_credential,
    2: _scenario_pt,
    3: _scenario_key_issuance,
    4: _scenario_at,
    5: _scenario_booking,
    6: _scenario_inperson,
}


def bench_scenario(scheme: str, scenario: int, rng: RandomSource | None = None) -> BenchRow:
    """Twelve timed runs of one (scheme, scenario) pair, trimmed-mean averaged."""
    if scheme not in SCHEMES:
        raise BenchError(f"unknown scheme {scheme!r}")
    if scenario not in SCENARIOS:
        raise BenchError(f"unknown scenario {scenario!r}")
    if scheme == "rsa" and scenario != 1:
        raise BenchError("the plain-RSA baseline applies only to credential issuance")
    rng = rng or RandomSource()
    bench = _Workbench(scheme, rng)
    run, sizes = _BUILDERS[scenario](bench)
    samples = []
    for _ in range(RUNS):
        t0 = time.perf_counter()
        run()
        samples.append((time.perf_counter() - t0) * 1000.0)
    return BenchRow(
        scheme=scheme,
        scenario=scenario,
        scenario_name=SCENARIOS[scenario],
        payload_presignature_bytes=sizes[0],
        full_request_bytes=sizes[1],
        response_bytes=sizes[2],
        signature_payload_bytes=sizes[3],
        avg_time_ms=trimmed_mean_ms(samples),
        samples_ms=samples,
    )


def bench_all(schemes=None, scenarios=None) -> BenchReport:
    report = BenchReport()
    for scenario in scenarios or sorted(SCENARIOS):
        for scheme in schemes or SCHEMES:
            if scheme == "rsa" and scenario != 1:
                continue
            report.rows.append(bench_scenario(scheme, scenario))
    return report
