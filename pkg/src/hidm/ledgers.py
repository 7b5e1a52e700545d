"""Simulated permissioned immutable ledgers.

Three ledgers back the framework: a DID document ledger for public-key
discovery, a single-use token ledger whose check-and-mark is atomic, and
a tiered-access auditor ledger.  All of them append into SHA-256 hash
chains; flipping any persisted byte breaks every later entry hash, and a
sidecar head pointer makes tail truncation detectable.
"""

from __future__ import annotations

import enum
import hashlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

GENESIS = b"\x00" * 32


class LedgerError(Exception):
    pass


@dataclass(frozen=True)
class LedgerEntry:
    payload: bytes
    prev_hash: bytes
    entry_hash: bytes

    @classmethod
    def chained(cls, payload: bytes, prev_hash: bytes) -> "LedgerEntry":
        return cls(payload, prev_hash, hashlib.sha256(prev_hash + payload).digest())


class HashChainLedger:
    """Append-only list of hash-chained payloads with optional persistence."""

    def __init__(self, path: str | None = None):
        self.entries: list[LedgerEntry] = []
        self._lock = threading.Lock()
        self.path = Path(path) if path else None
        if self.path and self.path.exists():
            self._load()

    def append(self, payload: bytes) -> int:
        with self._lock:
            prev = self.entries[-1].entry_hash if self.entries else GENESIS
            entry = LedgerEntry.chained(payload, prev)
            self.entries.append(entry)
            if self.path:
                self._persist(entry)
            return len(self.entries) - 1

    @property
    def head(self) -> tuple:
        last = self.entries[-1].entry_hash if self.entries else GENESIS
        return (len(self.entries), last.hex())

    def verify(self, expected_head: tuple | None = None) -> bool:
        prev = GENESIS
        for entry in self.entries:
            if entry.prev_hash != prev:
                return False
            if hashlib.sha256(entry.prev_hash + entry.payload).digest() != entry.entry_hash:
                return False
            prev = entry.entry_hash
        if expected_head is not None and tuple(expected_head) != self.head:
            return False
        return True

    # -- persistence (JSON lines, one entry per line; head in a sidecar) ----
    def _persist(self, entry: LedgerEntry) -> None:
        with self.path.open("a") as f:
            f.write(json.dumps({
                "payload": entry.payload.hex(),
                "prev_hash": entry.prev_hash.hex(),
                "entry_hash": entry.entry_hash.hex(),
            }) + "\n")
        head_path = self.path.with_suffix(self.path.suffix + ".head")
        head_path.write_text(json.dumps({"count": len(self.entries), "hash": self.head[1]}))

    def _load(self) -> None:
        for line in self.path.read_text().splitlines():
            obj = json.loads(line)
            self.entries.append(LedgerEntry(
                bytes.fromhex(obj["payload"]),
                bytes.fromhex(obj["prev_hash"]),
                bytes.fromhex(obj["entry_hash"]),
            ))

    def dump(self, path: str) -> None:
        """Write all entries (and the head sidecar) to a fresh file."""
        target = Path(path)
        with target.open("w") as f:
            for entry in self.entries:
                f.write(json.dumps({
                    "payload": entry.payload.hex(),
                    "prev_hash": entry.prev_hash.hex(),
                    "entry_hash": entry.entry_hash.hex(),
                }) + "\n")
        head_path = target.with_suffix(target.suffix + ".head")
        head_path.write_text(json.dumps({"count": len(self.entries), "hash": self.head[1]}))

    @classmethod
    def verify_file(cls, path: str) -> bool:
        ledger = cls()
        try:
            ledger.path = Path(path)
            ledger._load()
        except (ValueError, KeyError, json.JSONDecodeError):
            return False
        ledger.path = None
        head_path = Path(path).with_suffix(Path(path).suffix + ".head")
        expected = None
        if head_path.exists():
            obj = json.loads(head_path.read_text())
            expected = (obj["count"], obj["hash"])
        return ledger.verify(expected_head=expected)


def chain_verify(ledger) -> bool:
    return ledger.verify()


# ---------------------------------------------------------------------------
# DID document ledger

@dataclass
class DIDDocument:
    did: str
    public_keys: list  # [(purpose, key bytes hex)]
    service_endpoints: list = field(default_factory=list)
    version: int = 1
    revoked: bool = False

    def canonical_bytes(self) -> bytes:
        return json.dumps({
            "did": self.did,
            "public_keys": [[p, k] for p, k in self.public_keys],
            "service_endpoints": list(self.service_endpoints),
            "version": self.version,
            "revoked": self.revoked,
        }, sort_keys=True).encode()

    def key_for(self, purpose: str):
        for p, k in self.public_keys:
            if p == purpose:
                return k
        return None


class DIDLedger:
    """Resolvable DID documents; updates must be signed by a prior key."""

    def __init__(self, group, path: str | None = None):
        self.group = group
        self.chain = HashChainLedger(path)
        self._docs: dict = {}
        self._lock = threading.Lock()

    def register(self, doc: DIDDocument, proof) -> None:
        from .signatures import schnorr_verify

        with self._lock:
            current = self._docs.get(doc.did)
            if current is None:
                if doc.version != 1:
                    raise LedgerError("first registration must be version 1")
                authorizing = doc
            else:
                if doc.version != current.version + 1:
                    raise LedgerError("version must increment by one")
                authorizing = current
            verified = False
            for purpose, key_hex in authorizing.public_keys:
                if purpose != "control":
                    continue
                y = int.from_bytes(bytes.fromhex(key_hex), "big")
                if schnorr_verify(doc.canonical_bytes(), proof, y, self.group):
                    verified = True
                    break
            if not verified:
                raise LedgerError("proof of control failed")
            self._docs[doc.did] = doc
            self.chain.append(doc.canonical_bytes())

    def resolve(self, did: str):
        """Latest document, or None (not-found is a result, not an error)."""
        return self._docs.get(did)

    def verify(self) -> bool:
        return self.chain.verify()


# ---------------------------------------------------------------------------
# Single-use token ledger

class ATIStatus(str, enum.Enum):
    FRESH = "fresh"
    REPLAYED = "replayed"


class ATILedger:
    """Atomic first-use marking; answers membership only, never enumerates."""

    def __init__(self, path: str | None = None):
        self.chain = HashChainLedger(path)
        self._seen: set = set()
        self._lock = threading.Lock()

    def check_and_mark(self, ati: bytes) -> ATIStatus:
        with self._lock:
            if ati in self._seen:
                return ATIStatus.REPLAYED
            self._seen.add(ati)
            self.chain.append(hashlib.sha256(b"HIDM/ati-mark" + ati).digest())
            return ATIStatus.FRESH

    def verify(self) -> bool:
        return self.chain.verify()


# ---------------------------------------------------------------------------
# Auditor ledger (tiered access)

class AccessLevel(str, enum.Enum):
    PATIENT = "PatientAccessible"
    AUTHORITY = "AuditorAuthorityAccessible"


@dataclass(frozen=True)
class AuditRecord:
    log_id: int
    timestamp: int
    origin_module: str
    event_type: str
    access_level: AccessLevel
    patient_identifier: str
    healthcare_professional_identifier: str | None
    event_details: dict

    def to_payload(self) -> bytes:
        return json.dumps({
            "log_id": self.log_id,
            "timestamp": self.timestamp,
            "origin_module": self.origin_module,
            "event_type": self.event_type,
            "access_level": self.access_level.value,
            "patient_identifier": self.patient_identifier,
            "healthcare_professional_identifier": self.healthcare_professional_identifier,
            "event_details": self.event_details,
        }, sort_keys=True).encode()


@dataclass(frozen=True)
class QueryResult:
    records: list
    auth_error: bool = False


def parse_filter(expr: str) -> dict:
    """key=value pairs separated by whitespace, e.g. 'event_type=Booked'."""
    out = {}
    for token in expr.split():
        if "=" not in token:
            raise LedgerError(f"bad filter token: {token}")
        key, value = token.split("=", 1)
        out[key] = value
    return out


def _matches(record: AuditRecord, flt: dict) -> bool:
    payload = json.loads(record.to_payload())
    for key, value in flt.items():
        if str(payload.get(key)) != value:
            return False
    return True


class AuditorLedger:
    """Hash-chained event records with cryptographically gated read tiers.

    authenticate_origin(credential, module_name) -> bool gates writes;
    authenticate_requester(requester) -> ("patient", ids) | ("authority",)
    | None gates reads.  Both callables are injected by the entity layer,
    where the actual credential verification lives.
    """

    def __init__(self, authenticate_origin, authenticate_requester, clock, path=None):
        self.chain = HashChainLedger(path)
        self.records: list[AuditRecord] = []
        self.authenticate_origin = authenticate_origin
        self.authenticate_requester = authenticate_requester
        self.clock = clock
        self._lock = threading.Lock()
        self.admin_metadata: list = []  # third tier: query metadata, admin-only

    def append(
        self,
        origin_module: str,
        origin_credential,
        event_type: str,
        access_level: AccessLevel,
        patient_identifier: str,
        event_details: dict,
        healthcare_professional_identifier: str | None = None,
    ) -> int:
        if not self.authenticate_origin(origin_credential, origin_module):
            raise LedgerError("origin authentication failed")
        with self._lock:
            record = AuditRecord(
                log_id=len(self.records) + 1,
                timestamp=self.clock.now(),
                origin_module=origin_module,
                event_type=event_type,
                access_level=AccessLevel(access_level),
                patient_identifier=patient_identifier,
                healthcare_professional_identifier=healthcare_professional_identifier,
                event_details=dict(event_details),
            )
            self.records.append(record)
            self.chain.append(record.to_payload())
            return record.log_id

    def query(self, requester, flt: dict | str | None = None) -> QueryResult:
        if isinstance(flt, str):
            flt = parse_filter(flt)
        flt = flt or {}
        who = self.authenticate_requester(requester)
        self.admin_metadata.append({
            "timestamp": self.clock.now(),
            "requester": getattr(requester, "kind", "unknown"),
            "outcome": "ok" if who else "auth-error",
        })
        if not who:
            return QueryResult([], auth_error=True)
        if who[0] == "patient":
            allowed = set(who[1])
            rows = [
                r for r in self.records
                if r.access_level is AccessLevel.PATIENT
                and r.patient_identifier in allowed
                and _matches(r, flt)
            ]
        elif who[0] == "authority":
            rows = [
                r for r in self.records
                if r.access_level is AccessLevel.AUTHORITY and _matches(r, flt)
            ]
        else:
            return QueryResult([], auth_error=True)
        return QueryResult(rows)

    def verify(self) -> bool:
        return self.chain.verify()
