"""Signature schemes composed by the framework."""

from .schnorr import (
    SchnorrKeypair,
    SchnorrSig,
    schnorr_keygen,
    schnorr_sign,
    schnorr_verify,
)
from .pbs import PartiallyBlindSig, PbsError, SignerTranscript, pbs_issue, pbs_verify
from .ibs import (
    IBSMasterKey,
    IBSUserKey,
    IbsError,
    ibs_blind_extract,
    ibs_extract_direct,
    ibs_keygen,
    ibs_sign,
    ibs_verify,
    identity_point,
    key_matches_identity,
)
from .cl import (
    CLError,
    CLKeypair,
    CLPairingSignature,
    CLRSASignature,
    CLVariant,
    cl_keygen,
    cl_sign,
    cl_verify,
)

__all__ = [
    "CLError",
    "CLKeypair",
    "CLPairingSignature",
    "CLRSASignature",
    "CLVariant",
    "IBSMasterKey",
    "IBSUserKey",
    "IbsError",
    "PartiallyBlindSig",
    "PbsError",
    "SchnorrKeypair",
    "SchnorrSig",
    "SignerTranscript",
    "cl_keygen",
    "cl_sign",
    "cl_verify",
    "ibs_blind_extract",
    "ibs_extract_direct",
    "ibs_keygen",
    "ibs_sign",
    "ibs_verify",
    "identity_point",
    "key_matches_identity",
    "pbs_issue",
    "pbs_verify",
    "schnorr_keygen",
    "schnorr_sign",
    "schnorr_verify",
]
