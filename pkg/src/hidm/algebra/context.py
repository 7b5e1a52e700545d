"""Pairing context, hashing, and the Schnorr modular group.

The PairingContext wraps a backend engine behind typed element classes
(G1Element, G2Element, GTElement) with canonical byte encodings.  Two
backends exist: the production 381-bit curve and a 61-bit stand-in whose
discrete logs are transparent, used by exponent-arithmetic test oracles.
All elements are immutable; every operation is pure.
"""

from __future__ import annotations

import hashlib

from gmpy2 import mpz, powmod

from . import bls12381 as _bls
from .bls12381 import DecodeError


def hash_to_field(domain_tag: bytes, data: bytes, modulus: int) -> int:
    """Deterministic scalar in [0, modulus) with >=128 bits of surplus.

    Independent domain tags give independent functions; the tag and the
    input are length-framed so no two (tag, data) pairs collide.
    """
    if not domain_tag:
        raise ValueError("domain tag must be non-empty")
    nbytes = (modulus.bit_length() + 128 + 7) // 8
    framed = len(domain_tag).to_bytes(4, "big") + domain_tag + data
    return int.from_bytes(hashlib.shake_256(framed).digest(nbytes), "big") % modulus


class G1Element:
    __slots__ = ("ctx", "raw")

    def __init__(self, ctx, raw):
        self.ctx = ctx
        self.raw = raw

    def __add__(self, other):
        return G1Element(self.ctx, self.ctx._g1_add(self.raw, other.raw))

    def __neg__(self):
        return G1Element(self.ctx, self.ctx._g1_neg(self.raw))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return G1Element(self.ctx, self.ctx._g1_mul(self.raw, k))

    def __eq__(self, other):
        return isinstance(other, G1Element) and self.raw == other.raw

    def __hash__(self):
        return hash(("g1", self.to_bytes()))

    @property
    def is_identity(self):
        return self.ctx._g1_is_identity(self.raw)

    def to_bytes(self) -> bytes:
        return self.ctx._g1_to_bytes(self.raw)


class G2Element:
    __slots__ = ("ctx", "raw")

    def __init__(self, ctx, raw):
        self.ctx = ctx
        self.raw = raw

    def __add__(self, other):
        return G2Element(self.ctx, self.ctx._g2_add(self.raw, other.raw))

    def __neg__(self):
        return G2Element(self.ctx, self.ctx._g2_neg(self.raw))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return G2Element(self.ctx, self.ctx._g2_mul(self.raw, k))

    def __eq__(self, other):
        return isinstance(other, G2Element) and self.raw == other.raw

    def __hash__(self):
        return hash(("g2", self.to_bytes()))

    @property
    def is_identity(self):
        return self.ctx._g2_is_identity(self.raw)

    def to_bytes(self) -> bytes:
        return self.ctx._g2_to_bytes(self.raw)


class GTElement:
    __slots__ = ("ctx", "raw")

    def __init__(self, ctx, raw):
        self.ctx = ctx
        self.raw = raw

    def __mul__(self, other):
        return GTElement(self.ctx, self.ctx._gt_mul(self.raw, other.raw))

    def __truediv__(self, other):
        return GTElement(self.ctx, self.ctx._gt_mul(self.raw, self.ctx._gt_inv(other.raw)))

    def __pow__(self, k: int):
        return GTElement(self.ctx, self.ctx._gt_pow(self.raw, k))

    def inverse(self):
        return GTElement(self.ctx, self.ctx._gt_inv(self.raw))

    def __eq__(self, other):
        return isinstance(other, GTElement) and self.raw == other.raw

    def __hash__(self):
        return hash(("gt", self.to_bytes()))

    @property
    def is_identity(self):
        return self.raw == self.ctx._gt_identity_raw

    def to_bytes(self) -> bytes:
        return self.ctx._gt_to_bytes(self.raw)


class PairingContext:
    """Type-3 bilinear setting: G1, G2, GT of prime order r, z = e(g1, g2)."""

    _instances: dict = {}

    def __init__(self, curve_id: str):
        if curve_id != "bls12-381":
            raise ValueError(f"unknown curve: {curve_id}")
        self.curve_id = curve_id
        self.r = int(_bls.R)
        self.g1 = G1Element(self, _bls.G1_GEN)
        self.g2 = G2Element(self, _bls.G2_GEN)
        self._g1_comb = _bls.G1Comb(_bls.G1_GEN)
        self._g2_comb = _bls.G2Comb(_bls.G2_GEN)
        z_raw = _bls.pairing(_bls.G1_GEN, _bls.G2_GEN)
        self.z = GTElement(self, z_raw)
        self._z_comb = _bls.GTComb(z_raw)
        self._gt_identity_raw = _bls.FQ12_ONE
        self._pair_cache: dict = {}

    @classmethod
    def default(cls) -> "PairingContext":
        if "bls12-381" not in cls._instances:
            cls._instances["bls12-381"] = cls("bls12-381")
        return cls._instances["bls12-381"]

    # -- fast fixed-base operations ----------------------------------------
    def g1_base_mul(self, k: int) -> G1Element:
        return G1Element(self, self._g1_comb.mul(k))

    def g2_base_mul(self, k: int) -> G2Element:
        return G2Element(self, self._g2_comb.mul(k))

    def z_pow(self, k: int) -> GTElement:
        return GTElement(self, self._z_comb.pow(k))

    # -- pairings ------------------------------------------------------------
    def pair(self, a: G1Element, b) -> GTElement:
        return GTElement(self, _bls.pairing(a.raw, b.raw if isinstance(b, G2Element) else b))

    def multi_pair(self, pairs) -> GTElement:
        raw_pairs = [
            (a.raw, b.raw if isinstance(b, G2Element) else b) for a, b in pairs
        ]
        return GTElement(self, _bls.multi_pairing(raw_pairs))

    def prepare_g2(self, b: G2Element) -> _bls.G2Prepared:
        return _bls.G2Prepared(b.raw)

    def pair_cached(self, a: G1Element, b: G2Element) -> GTElement:
        """Pairing with memoization; for pairs of long-lived public keys."""
        key = (a.to_bytes(), b.to_bytes())
        hit = self._pair_cache.get(key)
        if hit is None:
            hit = self.pair(a, b)
            if len(self._pair_cache) > 256:
                self._pair_cache.clear()
            self._pair_cache[key] = hit
        return hit

    # -- hashing -------------------------------------------------------------
    def hash_to_scalar(self, domain_tag: bytes, data: bytes) -> int:
        return hash_to_field(domain_tag, data, self.r)

    def hash_to_g1(self, domain_tag: bytes, data: bytes) -> G1Element:
        def digest(ctr: int) -> int:
            return hash_to_field(domain_tag, data + ctr.to_bytes(4, "big"), int(_bls.P))

        return G1Element(self, _bls.hash_to_g1(digest))

    def random_scalar(self, rng, allow_zero: bool = False) -> int:
        return rng.scalar(self.r, allow_zero=allow_zero)

    # -- codecs ---------------------------------------------------------------
    def g1_from_bytes(self, data: bytes) -> G1Element:
        return G1Element(self, _bls.g1_from_bytes(data))

    def g2_from_bytes(self, data: bytes) -> G2Element:
        return G2Element(self, _bls.g2_from_bytes(data))

    def gt_from_bytes(self, data: bytes) -> GTElement:
        return GTElement(self, _bls.gt_from_bytes(data))

    def scalar_to_bytes(self, k: int) -> bytes:
        return _bls.scalar_to_bytes(k)

    def scalar_from_bytes(self, data: bytes) -> int:
        return int(_bls.scalar_from_bytes(data))

    # -- raw group operations (used by the element wrappers) -----------------
    def _g1_add(self, a, b):
        return _bls.g1_add(a, b)

    def _g1_neg(self, a):
        return _bls.g1_neg(a)

    def _g1_mul(self, a, k):
        return _bls.g1_mul(a, int(k))

    def _g1_is_identity(self, a):
        return a is None

    def _g1_to_bytes(self, a):
        return _bls.g1_to_bytes(a)

    def _g2_add(self, a, b):
        return _bls.g2_add(a, b)

    def _g2_neg(self, a):
        return _bls.g2_neg(a)

    def _g2_mul(self, a, k):
        return _bls.g2_mul(a, int(k))

    def _g2_is_identity(self, a):
        return a is None

    def _g2_to_bytes(self, a):
        return _bls.g2_to_bytes(a)

    def _gt_mul(self, a, b):
        return _bls.gt_mul(a, b)

    def _gt_inv(self, a):
        return _bls.gt_inv(a)

    def _gt_pow(self, a, k):
        return _bls.gt_pow(a, int(k))

    def _gt_to_bytes(self, a):
        return _bls.gt_to_bytes(a)


# ---------------------------------------------------------------------------
# Schnorr group (prime-order subgroup of the integers mod p)

# 128-bit-strength parameters: 3072-bit modulus with a 256-bit prime-order
# subgroup, generated once with a NIST-style parameter generator and frozen
# here.  Regenerate via
# `cryptography.hazmat.primitives.asymmetric.dsa.generate_parameters(3072)`.
_SCHNORR_P = int(
    "87C1AB3058878D4ADD2390A98417C3D6FBD91DF1BF3F7283E5280B5B3CEF7D5C"
    "1C81A9097925DADA296249EDD890973909C354885C45D997DEE90795DD90DB3F"
    "CB9461A19479B133E85426CE7CAB19AE3330A85A0DC1CF6956E87EF4A0E02699"
    "ED3444DCDBD79C8C1E9DA5A716388C0636A4B580FE4E1BD1078D12165D99700C"
    "E1B039841E00953CEEA21913B0636C3DE775740BBD562CEFEED696BF8D9116D0"
    "7386E1403C39F63321BA9020E3CE25A4EA2ED772C468EA78504D46BAB7C1CA91"
    "7D2A2D7D4F2606D92700BB00ED199E5015D3D4800F22BA2C2D0BA9690D9DBAAD"
    "B51E9016223FDDAB6422A64487A608E40D90D39ADD0AA1357BE891E427D2A5DA"
    "ADEA53733484257B88FC24E1071C2C581BE86CA68FBA53F6A5ABAE4B1A7156B0"
    "A82473419BB3406183CB2E506B82A5D9610B0E65354B32CB9416418ED3A8B36D"
    "D345240455E20739C3F981CB05DFD6D28DD7E91DC8C09F6BB06B851E6161096E"
    "E0EB989E96C0F790DA153F06EF525CB8028E8CFA4D4116DABC5DF2B9B6551E95",
    16,
)
_SCHNORR_Q = int("EC753D28D7E8B2815065BC858FD36A0F46B5865632253A5BEF5CC6E142C8BDEB", 16)
_SCHNORR_G = int(
    "6BF8ECF221DF571CEFE3C9EE83FC562C8509D7D08AC86F65AEBACA6476356EB0"
    "1B8757968ABDF9F3E929B9CD33A6663B73E9D4AC925E720FEF3990874A8343E7"
    "9E48C3C14BD46701B6A0F9E50AB3EB54CB06D0317AF3946615F861EB6C962DD8"
    "03ED5D3776A5BAB3D655B63ACD5F9F5F8A6D1F9821C8642EF1CA71B7BCC00D0C"
    "92029F0ED875A76FA4B99B2A370F1B7FD658EB505E63947A2ED302E145F9A940"
    "0048448F794F41EC9ED72E0099CF686371D407B51E2C6662C9CCD7245FD52779"
    "F8497A5BB7EDDB74A7933C987374EF922B9A288E98AC56472EBA62D4B84C56F5"
    "9515766EC72B7B72E0310BCBF216D920473014B762A7B6C7B7C48B8E10E9C043"
    "B79582428F9F52A668334FEBA9AF9F44663A77EF80AC7B97388AEC97D12C42FF"
    "26FC090B5B0873DA470D6D3E14065467071B5278A2B7335A3AC66C5875C905EF"
    "7571CCCB5F3C51C8AC2B89CD2EC88841C9718ABD21CCA76CB3A07A1308623A87"
    "1805104DEDAD9096ADF0B301BD3EA317635AED338F1B5150E7357A29DF51D379",
    16,
)


class SchnorrGroup:
    """Prime-order-q subgroup of the integers modulo a prime p."""

    def __init__(self, p: int, q: int, g: int):
        if pow(g, q, p) != 1 or g in (0, 1):
            raise ValueError("g does not generate an order-q subgroup")
        self.p = p
        self.q = q
        self.g = g

    @classmethod
    def default(cls) -> "SchnorrGroup":
        return cls(_SCHNORR_P, _SCHNORR_Q, _SCHNORR_G)

    def exp(self, base: int, e: int) -> int:
        return int(powmod(mpz(base), mpz(e), mpz(self.p)))

    def exp_g(self, e: int) -> int:
        return self.exp(self.g, e)

    def in_subgroup(self, y: int) -> bool:
        return 0 < y < self.p and pow(y, self.q, self.p) == 1

    def random_scalar(self, rng) -> int:
        return rng.scalar(self.q)

    def element_to_bytes(self, y: int) -> bytes:
        return int(y).to_bytes((self.p.bit_length() + 7) // 8, "big")

    def scalar_to_bytes(self, s: int) -> bytes:
        return (int(s) % self.q).to_bytes((self.q.bit_length() + 7) // 8, "big")
