"""Entity state machines, secure channels, episodes, and traceability."""

from .channel import ChannelError, Frame, SecureChannel, establish_channel
from .entities import (
    APCEntity,
    AuditorEntity,
    Entity,
    GHAEntity,
    HOEntity,
    HPEntity,
    HRREntity,
    LegitimacyCredential,
    PatientEntity,
    PTAEntity,
    Role,
    Warrant,
    lvc_issue,
    verify_lvc,
    warrant_issue,
    warrant_verify,
)
from .episodes import (
    EpisodeError,
    book_appointment,
    consult_authorization,
    episode_appointment_token,
    episode_pcred,
    episode_pseudonym_key,
    episode_pseudonym_token,
    inperson_verify,
    record_access,
    run_visit,
)
from .scenario import run_scenario, transcript_dump, write_outputs
from .trace import TraceError, apc_reveal, pta_reveal, trace_identity
from .world import (
    AuthorityAuditRequester,
    PatientAuditRequester,
    ScenarioConfig,
    World,
    setup_world,
)

__all__ = [
    "APCEntity",
    "AuditorEntity",
    "AuthorityAuditRequester",
    "ChannelError",
    "Entity",
    "EpisodeError",
    "Frame",
    "GHAEntity",
    "HOEntity",
    "HPEntity",
    "HRREntity",
    "LegitimacyCredential",
    "PatientAuditRequester",
    "PatientEntity",
    "PTAEntity",
    "Role",
    "ScenarioConfig",
    "SecureChannel",
    "TraceError",
    "Warrant",
    "World",
    "apc_reveal",
    "book_appointment",
    "consult_authorization",
    "episode_appointment_token",
    "episode_pcred",
    "episode_pseudonym_key",
    "episode_pseudonym_token",
    "establish_channel",
    "inperson_verify",
    "lvc_issue",
    "pta_reveal",
    "record_access",
    "run_scenario",
    "run_visit",
    "setup_world",
    "trace_identity",
    "transcript_dump",
    "verify_lvc",
    "warrant_issue",
    "warrant_verify",
    "write_outputs",
]
