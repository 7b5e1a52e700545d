"""Scenario runner: drive all episodes for a configured patient roster."""

from __future__ import annotations

import json
from pathlib import Path

from .episodes import run_visit
from .world import ScenarioConfig, World, setup_world


def run_scenario(config: ScenarioConfig) -> tuple:
    """Execute every episode for every configured patient and visit.

    Returns (world, summary).  Raises EpisodeError on the first failing
    episode; nothing is swallowed.
    """
    world = setup_world(config)
    visits = []
    for patient in world.patients:
        for visit_index in range(config.visits):
            outcome = run_visit(world, patient, visit_index)
            visits.append({
                "patient": patient.did,
                "visit": visit_index,
                "confirmation_code": outcome["confirmation_code"],
                "pseudonym": outcome["pseudonym"],
                "records_seen": len(outcome["history"]),
            })
    summary = {
        "patients": config.patients,
        "visits_per_patient": config.visits,
        "episodes": len(world.episode_log),
        "channel_frames": len(world.channel_log),
        "audit_records": len(world.auditor_ledger.records),
        "ledgers_verified": bool(
            world.auditor_ledger.verify()
            and world.ati_ledger.verify()
            and world.did_ledger.verify()
        ),
        "visits": visits,
    }
    return world, summary


def transcript_dump(world: World) -> dict:
    """Ordered channel frames with role annotations, plus episode log."""
    return {
        "frames": [
            {
                "sender": f.sender_did,
                "receiver": f.receiver_did,
                "seq": f.seq,
                "ciphertext": f.ciphertext.hex(),
            }
            for f in world.channel_log
        ],
        "episodes": world.episode_log,
    }


def write_outputs(world: World, summary: dict, out_dir: str) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    transcript_path = out / "transcript.json"
    transcript_path.write_text(json.dumps(transcript_dump(world), indent=2, sort_keys=True))
    paths["transcript"] = str(transcript_path)
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True))
    paths["summary"] = str(summary_path)
    audit_path = out / "auditor-ledger.jsonl"
    world.auditor_ledger.chain.dump(str(audit_path))
    paths["auditor_ledger"] = str(audit_path)
    ati_path = out / "ati-ledger.jsonl"
    world.ati_ledger.chain.dump(str(ati_path))
    paths["ati_ledger"] = str(ati_path)
    return paths
