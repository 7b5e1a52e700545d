"""Warrant-gated conditional traceability.

Neither authority can walk from a pseudonym to a person alone: the
pseudonym authority maps pseudonym -> patient identifier, the enrollment
authority maps patient identifier -> PII, and each reveal operation
demands a verifying warrant.  Both disclosures land in the auditor ledger.
"""

from __future__ import annotations

from ..ledgers import AccessLevel
from .entities import Warrant, warrant_verify


class TraceError(Exception):
    pass


def _check_warrant(world, warrant: Warrant) -> None:
    authority_y = world.resolve_schnorr_public(world.auditor.did, "control")
    if authority_y is None or not warrant_verify(warrant, authority_y, world.group):
        raise TraceError("trace refused")


def pta_reveal(world, pseudonym_bytes: bytes, warrant: Warrant) -> bytes:
    """Pseudonym -> patient identifier, only under a verifying warrant."""
    _check_warrant(world, warrant)
    if warrant.target_pseudonym != pseudonym_bytes:
        raise TraceError("trace refused")
    patient_id = world.pta.store.patient_for_pseudonym(pseudonym_bytes)
    if patient_id is None:
        raise TraceError("pseudonym unknown to the token authority")
    world.auditor_ledger.append(
        origin_module=world.pta.role.value,
        origin_credential=world.pta.lvc,
        event_type="TraceDisclosure",
        access_level=AccessLevel.AUTHORITY,
        patient_identifier=pseudonym_bytes.hex(),
        event_details={"warrant_id": warrant.warrant_id.hex(), "revealed": "patient_id"},
    )
    return patient_id


def apc_reveal(world, patient_id: bytes, warrant: Warrant) -> dict:
    """Patient identifier -> PII, only under a verifying warrant."""
    _check_warrant(world, warrant)
    pii = world.apc.store.lookup_pii(patient_id)
    if pii is None:
        raise TraceError("patient identifier unknown to the enrollment authority")
    world.auditor_ledger.append(
        origin_module=world.apc.role.value,
        origin_credential=world.apc.lvc,
        event_type="TraceDisclosure",
        access_level=AccessLevel.AUTHORITY,
        patient_identifier=patient_id.hex(),
        event_details={"warrant_id": warrant.warrant_id.hex(), "revealed": "pii"},
    )
    return pii


def trace_identity(world, warrant: Warrant) -> dict:
    """Two-step reconstruction: pseudonym -> patient_id -> PII."""
    patient_id = pta_reveal(world, warrant.target_pseudonym, warrant)
    return apc_reveal(world, patient_id, warrant)
