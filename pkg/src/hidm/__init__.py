"""hidm: healthcare identity-management protocol library and simulator.

Unlinkable credential issuance, pseudonym generation via proxy
re-encryption, blind token issuance, appointment booking with replay
prevention, pseudonymous record access, and warrant-gated traceability,
plus an attack simulator and a benchmark harness.
"""

__version__ = "0.1.0"
