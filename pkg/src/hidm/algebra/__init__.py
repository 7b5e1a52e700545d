"""Group abstractions, hashing, and canonical serialization."""

from .bls12381 import DecodeError
from .context import (
    G1Element,
    G2Element,
    GTElement,
    PairingContext,
    SchnorrGroup,
    hash_to_field,
)
from .toy import ToyPairingContext

__all__ = [
    "DecodeError",
    "G1Element",
    "G2Element",
    "GTElement",
    "PairingContext",
    "SchnorrGroup",
    "ToyPairingContext",
    "hash_to_field",
]
