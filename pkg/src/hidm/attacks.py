"""Attack simulator: mounts canned adversarial behaviours against a fresh
scenario run and reports expected versus observed outcomes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actors import (
    EpisodeError,
    Role,
    ScenarioConfig,
    TraceError,
    Warrant,
    book_appointment,
    episode_appointment_token,
    episode_pcred,
    episode_pseudonym_key,
    episode_pseudonym_token,
    run_visit,
    setup_world,
    trace_identity,
)
from .actors.entities import HOEntity, lvc_issue, make_entity, rsa_keygen
from .credentials import pt_signed_bytes
from .ledgers import DIDDocument
from .pre import hrr_keygen, patient_keygen, pseudonym_generate
from .randomness import RandomSource
from .signatures import (
    CLVariant,
    PartiallyBlindSig,
    SchnorrSig,
    cl_keygen,
    cl_sign,
    cl_verify,
    ibs_keygen,
    ibs_verify,
    pbs_verify,
    schnorr_keygen,
    schnorr_sign,
    schnorr_verify,
)
from .signatures.ibs import ibs_extract_direct

ATTACK_KINDS = (
    "replay-ati",
    "expired-at",
    "forge-sig",
    "eavesdrop-scan",
    "impersonate-ho",
    "unwarranted-trace",
)


@dataclass(frozen=True)
class AttackOutcome:
    attack_kind: str
    expected_result: str
    observed_result: str

    @property
    def passed(self) -> bool:
        return self.expected_result == self.observed_result

    def to_dict(self) -> dict:
        return {
            "attack_kind": self.attack_kind,
            "expected_result": self.expected_result,
            "observed_result": self.observed_result,
            "pass": self.passed,
        }


def _baseline_world(seed: str):
    world = setup_world(ScenarioConfig(patients=1, visits=1, seed=seed))
    patient = world.patients[0]
    return world, patient


def attack_replay_ati(seed: str = "attack-replay") -> AttackOutcome:
    world, patient = _baseline_world(seed)
    run_visit(world, patient, 0)  # consumes the token
    try:
        book_appointment(world, patient, world.hos[0])
        observed = "accepted"
    except EpisodeError as exc:
        observed = "rejected" if "replay" in str(exc) else f"error: {exc}"
    return AttackOutcome("replay-ati", "rejected", observed)


def attack_expired_at(seed: str = "attack-expired") -> AttackOutcome:
    world, patient = _baseline_world(seed)
    episode_pcred(world, patient)
    episode_pseudonym_token(world, patient)
    episode_pseudonym_key(world, patient)
    episode_appointment_token(world, patient)
    world.clock.advance(world.config.at_validity_seconds + world.config.clock_skew_seconds + 1)
    try:
        book_appointment(world, patient, world.hos[0])
        observed = "accepted"
    except EpisodeError as exc:
        observed = "rejected" if "expired" in str(exc) else f"error: {exc}"
    return AttackOutcome("expired-at", "rejected", observed)


def forgery_sweep(trials_per_scheme: int = 1000, seed: bytes = b"forge-sweep") -> dict:
    """Random/mutated signatures against all five schemes; returns counts."""
    from .algebra import PairingContext, SchnorrGroup

    ctx = PairingContext.default()
    group = SchnorrGroup.default()
    rng = RandomSource(seed=seed)
    acceptances = {}

    schnorr_key = schnorr_keygen(group, rng)
    hits = 0
    for i in range(trials_per_scheme):
        sig = SchnorrSig(rng.scalar(group.q), rng.scalar(group.q))
        hits += schnorr_verify(b"forge-%d" % i, sig, schnorr_key.y, group)
    acceptances["schnorr"] = hits

    hits = 0
    for i in range(trials_per_scheme):
        sig = PartiallyBlindSig(rng.scalar(group.q), rng.scalar(group.q), rng.read(32))
        hits += pbs_verify(rng.uuid4(), 2_000_000_000, sig, schnorr_key.y, group)
    acceptances["pbs"] = hits

    attrs = [b"a%d" % i for i in range(6)]
    kp_pair = cl_keygen(CLVariant.PAIRING, 6, rng, ctx=ctx, self_test=False)
    genuine = cl_sign(attrs, kp_pair, rng)
    hits = 0
    for i in range(trials_per_scheme):
        from .signatures.cl import CLPairingSignature

        fake = CLPairingSignature(
            ctx.random_scalar(rng) * genuine.sigma1,
            ctx.random_scalar(rng) * genuine.sigma2,
        )
        hits += cl_verify(attrs, fake, kp_pair.public)
    acceptances["cl-pairing"] = hits

    kp_rsa = cl_keygen(CLVariant.RSA, 6, RandomSource(), self_test=False)
    genuine_rsa = cl_sign(attrs, kp_rsa, rng)
    hits = 0
    for i in range(trials_per_scheme):
        from .signatures.cl import CLRSASignature

        fake = CLRSASignature(
            int.from_bytes(rng.read(384), "big") % kp_rsa.public.n,
            genuine_rsa.e + 2 * (i + 1),
            genuine_rsa.v,
        )
        hits += cl_verify(attrs, fake, kp_rsa.public)
    acceptances["cl-rsa"] = hits

    master = ibs_keygen(ctx, rng)
    key = ibs_extract_direct(b"forge-target-pseudonym", master)
    hits = 0
    for i in range(trials_per_scheme):
        fake = (ctx.random_scalar(rng) * ctx.g1, ctx.random_scalar(rng) * ctx.g1)
        hits += ibs_verify(b"forge-%d" % i, fake, key.identity, master.mpk, ctx)
    acceptances["ibs"] = hits
    return acceptances


def attack_forge_sig(trials_per_scheme: int = 1000) -> AttackOutcome:
    counts = forgery_sweep(trials_per_scheme)
    total = sum(counts.values())
    observed = "rejected" if total == 0 else f"{total} forgeries accepted"
    return AttackOutcome("forge-sig", "rejected", observed)


def attack_eavesdrop_scan(seed: str = "attack-eavesdrop") -> AttackOutcome:
    world, patient = _baseline_world(seed)
    run_visit(world, patient, 0)
    wire = b"".join(f.ciphertext for f in world.channel_log)
    secrets = [patient.wallet.pcred.patient_id]
    secrets += [bytes.fromhex(b["ati"]) for b in world.hos[0].bookings.values()]
    hits = sum(wire.count(s) + wire.count(s.hex().encode()) for s in secrets)
    observed = "no secret bytes on the wire" if hits == 0 else f"{hits} leaks"
    return AttackOutcome("eavesdrop-scan", "no secret bytes on the wire", observed)


def attack_impersonate_ho(seed: str = "attack-impersonate") -> AttackOutcome:
    world, patient = _baseline_world(seed)
    episode_pcred(world, patient)
    episode_pseudonym_token(world, patient)
    episode_pseudonym_key(world, patient)
    episode_appointment_token(world, patient)
    # a registered entity whose legitimacy credential is self-signed
    fake = make_entity(HOEntity, Role.HO, "did:hidm:fake-clinic", world.group,
                       RandomSource(seed=b"fake-clinic"))
    doc = fake.did_document(world.group)
    world.did_ledger.register(doc, schnorr_sign(doc.canonical_bytes(), fake.static_key, fake.rng))
    own_root = rsa_keygen(RandomSource(seed=b"rogue-root"))
    fake.lvc = lvc_issue(own_root, fake.did, Role.HO.value)
    try:
        book_appointment(world, patient, fake)
        observed = "accepted"
    except EpisodeError as exc:
        observed = "patient refused" if "legitimacy" in str(exc) else f"error: {exc}"
    return AttackOutcome("impersonate-ho", "patient refused", observed)


def attack_unwarranted_trace(seed: str = "attack-trace") -> AttackOutcome:
    world, patient = _baseline_world(seed)
    run_visit(world, patient, 0)
    pseudonym = patient.wallet.pai.pseudonym.to_bytes()
    rogue = schnorr_keygen(world.group, RandomSource(seed=b"rogue-authority"))
    unsigned = Warrant(b"\x11" * 16, pseudonym, "no mandate", None)
    forged = Warrant(unsigned.warrant_id, pseudonym, "no mandate",
                     schnorr_sign(unsigned.signed_bytes(), rogue, world.rng))
    try:
        trace_identity(world, forged)
        observed = "identity revealed"
    except TraceError:
        observed = "refused"
    return AttackOutcome("unwarranted-trace", "refused", observed)


_ATTACKS = {
    "replay-ati": attack_replay_ati,
    "expired-at": attack_expired_at,
    "forge-sig": attack_forge_sig,
    "eavesdrop-scan": attack_eavesdrop_scan,
    "impersonate-ho": attack_impersonate_ho,
    "unwarranted-trace": attack_unwarranted_trace,
}


def run_attack(kind: str, **kwargs) -> AttackOutcome:
    if kind not in _ATTACKS:
        raise ValueError(f"unknown attack kind {kind!r}; choose from {ATTACK_KINDS}")
    return _ATTACKS[kind](**kwargs)
