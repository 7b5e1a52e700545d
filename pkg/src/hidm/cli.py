"""Command-line interface.

Exit codes: 0 success, 1 protocol failure, 2 configuration error.
"""

from __future__ import annotations

import json
import os
import sys

import click

from .actors import EpisodeError, ScenarioConfig, run_scenario, write_outputs
from .attacks import ATTACK_KINDS, run_attack
from .bench import SCENARIOS, SCHEMES, BenchError, bench_scenario
from .credentials import IssuanceError
from .ledgers import HashChainLedger
from .proofs import ProofError

PROTOCOL_FAILURES = (EpisodeError, IssuanceError, ProofError)


@click.group()
def main():
    """Healthcare identity-management protocol simulator."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Scenario config JSON; defaults are used when omitted.")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Directory for transcript, summary, and ledger files.")
def run(config_path, out_dir):
    """Run the end-to-end scenario (all episodes for every patient)."""
    try:
        if config_path:
            config = ScenarioConfig.from_json(open(config_path).read())
        else:
            config = ScenarioConfig()
        if config.seed is None and os.environ.get("HIDM_SEED"):
            config.seed = os.environ["HIDM_SEED"]
        if out_dir:
            config.out_dir = out_dir
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    try:
        world, summary = run_scenario(config)
    except PROTOCOL_FAILURES as exc:
        click.echo(f"protocol failure: {exc}", err=True)
        sys.exit(1)
    if config.out_dir:
        paths = write_outputs(world, summary, config.out_dir)
        for name, path in paths.items():
            click.echo(f"{name}: {path}")
    click.echo(json.dumps({k: v for k, v in summary.items() if k != "visits"}, indent=2))
    sys.exit(0)


@main.command()
@click.option("--scheme", type=click.Choice(list(SCHEMES)), required=True)
@click.option("--scenario", type=int, required=True,
              help=f"Scenario number {min(SCENARIOS)}-{max(SCENARIOS)}.")
@click.option("--out", "out_path", type=click.Path(), default=None)
def bench(scheme, scenario, out_path):
    """Benchmark one (scheme, scenario) pair: 12 runs, trimmed mean of 10."""
    try:
        row = bench_scenario(scheme, scenario)
    except BenchError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    payload = json.dumps(vars(row), indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as f:
            f.write(payload)
    click.echo(payload)
    sys.exit(0)


@main.command()
@click.option("--kind", type=click.Choice(list(ATTACK_KINDS)), required=True)
def attack(kind):
    """Mount one attack against a fresh run and report the outcome."""
    outcome = run_attack(kind)
    click.echo(json.dumps(outcome.to_dict(), indent=2))
    sys.exit(0 if outcome.passed else 1)


@main.group()
def ledger():
    """Ledger file utilities."""


@ledger.command("verify")
@click.argument("path", type=click.Path(exists=True))
def ledger_verify(path):
    """Verify the hash chain (and head pointer) of a persisted ledger."""
    ok = HashChainLedger.verify_file(path)
    click.echo("chain OK" if ok else "chain BROKEN")
    sys.exit(0 if ok else 1)


@main.group()
def vectors():
    """Deterministic test vectors for cross-implementation exchange."""


@vectors.command("emit")
@click.option("--seed", default=None, help="Vector seed (HIDM_SEED respected).")
@click.option("--out", "out_path", type=click.Path(), default=None)
def vectors_emit(seed, out_path):
    """Emit hashing, key-derivation, and protocol vectors as JSON."""
    from .vectors import emit_vectors

    seed = seed or os.environ.get("HIDM_SEED", "hidm-test-vectors")
    payload = json.dumps(emit_vectors(seed), indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as f:
            f.write(payload)
    click.echo(payload)
    sys.exit(0)


if __name__ == "__main__":
    main()
