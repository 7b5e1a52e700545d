"""61-bit pairing stand-in with transparent discrete logs.

Source groups are the additive integers modulo a 61-bit prime r (so a
"point" IS its exponent), and GT is the order-r subgroup of F_p* for
p = 52r + 1.  The map e(a, b) = z^(a*b) is exactly bilinear, which lets
test oracles recompute every verification equation by plain exponent
arithmetic.  Offers no security whatsoever; test-vector use only.
"""

from __future__ import annotations

from .context import G1Element, G2Element, GTElement, hash_to_field
from .bls12381 import DecodeError

R_TOY = 2**61 - 1
P_TOY = 52 * R_TOY + 1
Z_TOY = pow(2, (P_TOY - 1) // R_TOY, P_TOY)


class ToyPairingContext:
    """Drop-in PairingContext replacement at toy scale."""

    curve_id = "toy-61bit"

    def __init__(self):
        self.r = R_TOY
        self.g1 = G1Element(self, 1)
        self.g2 = G2Element(self, 1)
        self.z = GTElement(self, Z_TOY)
        self._gt_identity_raw = 1

    @classmethod
    def default(cls) -> "ToyPairingContext":
        return cls()

    def g1_base_mul(self, k: int) -> G1Element:
        return G1Element(self, k % self.r)

    def g2_base_mul(self, k: int) -> G2Element:
        return G2Element(self, k % self.r)

    def z_pow(self, k: int) -> GTElement:
        return GTElement(self, pow(Z_TOY, k % self.r, P_TOY))

    def pair(self, a: G1Element, b) -> GTElement:
        braw = b.raw if isinstance(b, G2Element) else b
        return self.z_pow(a.raw * braw)

    def multi_pair(self, pairs) -> GTElement:
        acc = 1
        for a, b in pairs:
            acc = acc * self.pair(a, b).raw % P_TOY
        return GTElement(self, acc)

    def prepare_g2(self, b: G2Element):
        return b.raw

    def pair_cached(self, a: G1Element, b: G2Element) -> GTElement:
        return self.pair(a, b)

    def hash_to_scalar(self, domain_tag: bytes, data: bytes) -> int:
        return hash_to_field(domain_tag, data, self.r)

    def hash_to_g1(self, domain_tag: bytes, data: bytes) -> G1Element:
        ctr = 0
        while True:
            k = hash_to_field(domain_tag, data + ctr.to_bytes(4, "big"), self.r)
            if k:
                return G1Element(self, k)
            ctr += 1

    def random_scalar(self, rng, allow_zero: bool = False) -> int:
        return rng.scalar(self.r, allow_zero=allow_zero)

    def g1_from_bytes(self, data: bytes) -> G1Element:
        return G1Element(self, self._int_from(data, 8, self.r))

    def g2_from_bytes(self, data: bytes) -> G2Element:
        return G2Element(self, self._int_from(data, 8, self.r))

    def gt_from_bytes(self, data: bytes) -> GTElement:
        v = self._int_from(data, 9, P_TOY)
        if pow(v, self.r, P_TOY) != 1:
            raise DecodeError("element not in the order-r subgroup")
        return GTElement(self, v)

    def scalar_to_bytes(self, k: int) -> bytes:
        return (int(k) % self.r).to_bytes(8, "big")

    def scalar_from_bytes(self, data: bytes) -> int:
        return self._int_from(data, 8, self.r)

    @staticmethod
    def _int_from(data: bytes, size: int, bound: int) -> int:
        if len(data) != size:
            raise DecodeError(f"encoding must be {size} bytes")
        v = int.from_bytes(data, "big")
        if v >= bound:
            raise DecodeError("value out of range")
        return v

    # raw ops used by the element wrappers
    def _g1_add(self, a, b):
        return (a + b) % self.r

    def _g1_neg(self, a):
        return (-a) % self.r

    def _g1_mul(self, a, k):
        return a * (k % self.r) % self.r

    def _g1_is_identity(self, a):
        return a == 0

    def _g1_to_bytes(self, a):
        return int(a).to_bytes(8, "big")

    _g2_add = _g1_add
    _g2_neg = _g1_neg
    _g2_mul = _g1_mul
    _g2_is_identity = _g1_is_identity
    _g2_to_bytes = _g1_to_bytes

    def _gt_mul(self, a, b):
        return a * b % P_TOY

    def _gt_inv(self, a):
        return pow(a, P_TOY - 2, P_TOY)

    def _gt_pow(self, a, k):
        return pow(a, k % self.r, P_TOY)

    def _gt_to_bytes(self, a):
        return int(a).to_bytes(9, "big")
