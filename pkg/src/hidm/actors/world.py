"""Scenario world: entity roster, ledgers, and audit authentication glue.

setup_world wires every entity with its keys, registers DID documents,
has the trust root issue legitimacy credentials, and constructs the
auditor ledger whose read/write gates actually verify credentials rather
than trusting role strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..algebra import PairingContext, SchnorrGroup
from ..credentials import SLOT_INDEX, pt_verify
from ..ledgers import ATILedger, AuditorLedger, DIDLedger
from ..pre import hrr_keygen
from ..proofs import pok_pcred_verify
from ..randomness import LogicalClock, RandomSource
from ..signatures import ibs_keygen, ibs_verify, schnorr_keygen
from ..signatures.cl import CLVariant, cl_keygen
from ..signatures.cl import CLPairingPublic, CLRSAPublic
from .entities import (
    APCEntity,
    AuditorEntity,
    GHAEntity,
    HOEntity,
    HPEntity,
    HRREntity,
    PatientEntity,
    PTAEntity,
    Role,
    lvc_issue,
    make_entity,
    rsa_keygen,
    verify_lvc,
)
from ..signatures import schnorr_sign


@dataclass
class ScenarioConfig:
    patients: int = 3
    visits: int = 2
    rotate_pseudonyms: bool = True
    cl_variant: str = CLVariant.PAIRING.value
    seed: str | None = None
    reverify_lvc: bool = True  # optional issuer re-verification before E3/E4/E6
    at_validity_seconds: int = 24 * 3600
    clock_skew_seconds: int = 120
    out_dir: str | None = None

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        obj = json.loads(text)
        allowed = set(cls.__dataclass_fields__)
        unknown = set(obj) - allowed
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)


@dataclass
class PatientAuditRequester:
    """Patient-tier query auth: credential proof plus pseudonym control."""

    kind: str
    pok: object  # PoKPCred disclosing the patient_id slot
    challenge: bytes
    pseudonym_claims: list  # [(PseudonymToken, ibs signature over challenge)]


@dataclass
class AuthorityAuditRequester:
    kind: str
    lvc: object


class World:
    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.ctx = PairingContext.default()
        self.group = SchnorrGroup.default()
        self.clock = LogicalClock()
        seed = config.seed.encode() if config.seed is not None else None
        self.rng = RandomSource(seed=seed)
        self.channel_log: list = []
        self.episode_log: list = []
        self._cl_public_cache: dict = {}
        self.did_ledger = DIDLedger(self.group)
        self.ati_ledger = ATILedger()
        self.auditor_ledger = None  # wired in setup_world
        self.gha = None
        self.apc = None
        self.pta = None
        self.hrr = None
        self.auditor = None
        self.hos: list = []
        self.hps: list = []
        self.patients: list = []

    # -- ledger-published key lookups ---------------------------------------
    def resolve_key(self, did: str, purpose: str):
        doc = self.did_ledger.resolve(did)
        if doc is None:
            return None
        return doc.key_for(purpose)

    def resolve_schnorr_public(self, did: str, purpose: str):
        key_hex = self.resolve_key(did, purpose)
        return None if key_hex is None else int.from_bytes(bytes.fromhex(key_hex), "big")

    def resolve_mpk(self, did: str):
        key_hex = self.resolve_key(did, "ibs-mpk")
        return None if key_hex is None else self.ctx.g2_from_bytes(bytes.fromhex(key_hex))

    def resolve_pre_public(self, did: str):
        key_hex = self.resolve_key(did, "pre-pk")
        return None if key_hex is None else self.ctx.g1_from_bytes(bytes.fromhex(key_hex))

    def resolve_cl_public(self, did: str):
        key_hex = self.resolve_key(did, "cl-public")
        if key_hex is None:
            return None
        cached = self._cl_public_cache.get(key_hex)
        if cached is None:
            variant, blob = key_hex.split(":", 1)
            if variant == CLVariant.PAIRING.value:
                cached = CLPairingPublic.from_bytes(bytes.fromhex(blob), self.ctx)
            else:
                cached = CLRSAPublic.from_bytes(bytes.fromhex(blob))
            self._cl_public_cache[key_hex] = cached
        return cached

    # -- audit gate callbacks -------------------------------------------------
    def _authenticate_origin(self, credential, origin_module: str) -> bool:
        role = origin_module.split("-")[0]
        return verify_lvc(credential, role, self.gha.rsa_public, self.did_ledger)

    def _authenticate_requester(self, requester):
        if isinstance(requester, AuthorityAuditRequester) and requester.kind == "authority":
            if verify_lvc(requester.lvc, Role.AUDITOR.value, self.gha.rsa_public, self.did_ledger):
                return ("authority",)
            return None
        if isinstance(requester, PatientAuditRequester) and requester.kind == "patient":
            if not pok_pcred_verify(requester.pok, self.resolve_cl_public(self.apc.did), requester.challenge):
                return None
            allowed = set()
            disclosed = requester.pok.disclosed.get(SLOT_INDEX["patient_id"])
            if disclosed is not None:
                allowed.add(disclosed.hex())
            y_pta = self.resolve_schnorr_public(self.pta.did, "pt-sign")
            mpk = self.resolve_mpk(self.apc.did)
            for pt, sig in requester.pseudonym_claims:
                if not pt_verify(pt, y_pta, self.group):
                    return None
                if not ibs_verify(requester.challenge, sig, pt.pseudonym.to_bytes(), mpk, self.ctx):
                    return None
                allowed.add(pt.pseudonym.to_bytes().hex())
            return ("patient", allowed)
        return None


def setup_world(config: ScenarioConfig) -> World:
    world = World(config)
    ctx, group = world.ctx, world.group

    # trust root
    gha_rng = world.rng.child("gha")
    world.gha = make_entity(GHAEntity, Role.GHA, "did:hidm:gha", group, gha_rng)
    world.gha.rsa_key = rsa_keygen(gha_rng)

    apc_rng = world.rng.child("apc")
    world.apc = make_entity(APCEntity, Role.APC, "did:hidm:apc", group, apc_rng)
    world.apc.cl_keypair = cl_keygen(
        CLVariant(config.cl_variant), 6, apc_rng, ctx=ctx, self_test=False
    )
    world.apc.at_key = schnorr_keygen(group, apc_rng)
    world.apc.ibs_master = ibs_keygen(ctx, apc_rng)

    pta_rng = world.rng.child("pta")
    world.pta = make_entity(PTAEntity, Role.PTA, "did:hidm:pta", group, pta_rng)
    world.pta.pt_key = schnorr_keygen(group, pta_rng)

    hrr_rng = world.rng.child("hrr")
    world.hrr = make_entity(HRREntity, Role.HRR, "did:hidm:hrr", group, hrr_rng)
    world.hrr.pre_keys = hrr_keygen(ctx, hrr_rng)

    world.auditor = make_entity(
        AuditorEntity, Role.AUDITOR, "did:hidm:auditor", group, world.rng.child("auditor")
    )
    world.hos = [
        make_entity(HOEntity, Role.HO, "did:hidm:ho-0", group, world.rng.child("ho-0"))
    ]
    hp = make_entity(HPEntity, Role.HP, "did:hidm:hp-0", group, world.rng.child("hp-0"))
    hp.sign_key = schnorr_keygen(group, hp.rng)
    world.hps = [hp]

    # DID documents with ledger-published scheme keys
    def register(entity, extra=()):
        doc = entity.did_document(group, extra)
        proof = schnorr_sign(doc.canonical_bytes(), entity.static_key, entity.rng)
        world.did_ledger.register(doc, proof)

    register(world.gha)
    cl_pub = world.apc.cl_keypair.public
    cl_hex = f"{cl_pub.variant.value}:{cl_pub.to_bytes().hex()}"
    register(world.apc, extra=[
        ("at-sign", group.element_to_bytes(world.apc.at_key.y).hex()),
        ("ibs-mpk", world.apc.ibs_master.mpk.to_bytes().hex()),
        ("cl-public", cl_hex),
    ])
    register(world.pta, extra=[("pt-sign", group.element_to_bytes(world.pta.pt_key.y).hex())])
    register(world.hrr, extra=[("pre-pk", world.hrr.pre_keys.pk.to_bytes().hex())])
    register(world.auditor)
    for ho in world.hos:
        register(ho)
    for hp in world.hps:
        register(hp, extra=[("hp-sign", group.element_to_bytes(hp.sign_key.y).hex())])

    # legitimacy credentials from the trust root
    world.apc.lvc = lvc_issue(world.gha.rsa_key, world.apc.did, Role.APC.value)
    world.pta.lvc = lvc_issue(world.gha.rsa_key, world.pta.did, Role.PTA.value)
    world.hrr.lvc = lvc_issue(world.gha.rsa_key, world.hrr.did, Role.HRR.value)
    world.auditor.lvc = lvc_issue(world.gha.rsa_key, world.auditor.did, Role.AUDITOR.value)
    for ho in world.hos:
        ho.lvc = lvc_issue(world.gha.rsa_key, ho.did, Role.HO.value)
    for hp in world.hps:
        hp.lvc = lvc_issue(
            world.gha.rsa_key, hp.did, Role.HP.value, {"scope": list(hp.access_scope)}
        )

    world.auditor_ledger = AuditorLedger(
        world._authenticate_origin, world._authenticate_requester, world.clock
    )

    # patients
    for i in range(config.patients):
        prng = world.rng.child(f"patient-{i}")
        patient = make_entity(
            PatientEntity, Role.PATIENT, f"did:hidm:patient-{i}", group, prng,
            pii={
                "name": f"Patient {i}",
                "address": f"{i} Care Street",
                "gov_id": f"GOV-{i:06d}",
            },
        )
        register(patient)
        feature_seed = int.from_bytes(prng.read(8), "big")
        patient.wallet.features = np.random.default_rng(feature_seed).standard_normal(128)
        world.patients.append(patient)
    return world
