"""CL-family credential signatures in two variants.

Both variants sign a fixed-length block of attributes and support the
randomize-and-prove selective disclosure used by the proof layer:

* ``cl-pairing`` — short randomizable signatures over the pairing groups
  (two G1 elements); verification is one two-sided pairing product.
* ``cl-rsa`` — strong-RSA credential signatures (A, e, v) over a 3072-bit
  modulus with a fresh prime exponent per signature.

Attributes are hashed into the 255-bit scalar field with a dedicated
domain tag so both variants share one message encoding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from gmpy2 import gcd, invert, mpz, next_prime, powmod

from ..algebra import hash_to_field
from ..algebra.bls12381 import R as _BLS_R
from ..algebra.context import PairingContext

ATTR_TAG = b"HIDM/cl/attr"

# Shared 255-bit message space so both variants encode attributes identically.
MSG_MODULUS = int(_BLS_R)

# CL-RSA size parameters (bits)
RSA_MODULUS_BITS = 3072
E_BITS = 597
E_INTERVAL_BITS = 119
V_BITS = RSA_MODULUS_BITS + 256 + 80
STAT_BITS = 80
CHALLENGE_BITS = 256


class CLVariant(str, enum.Enum):
    PAIRING = "cl-pairing"
    RSA = "cl-rsa"


class CLError(Exception):
    pass


def attrs_to_scalars(attrs, modulus) -> list:
    return [hash_to_field(ATTR_TAG, a, modulus) for a in attrs]


# ---------------------------------------------------------------------------
# Pairing variant

@dataclass(frozen=True)
class CLPairingSignature:
    sigma1: object  # G1Element
    sigma2: object  # G1Element

    variant = CLVariant.PAIRING

    def to_bytes(self) -> bytes:
        return self.sigma1.to_bytes() + self.sigma2.to_bytes()


class CLPairingPublic:
    def __init__(self, ctx, x_tilde, y_tildes):
        self.ctx = ctx
        self.x_tilde = x_tilde
        self.y_tildes = list(y_tildes)
        self.n_slots = len(self.y_tildes)
        self._prepared = None
        self._combs = None

    variant = CLVariant.PAIRING

    @property
    def prepared(self):
        """(g2, X, Y_i) prepared for repeated Miller loops."""
        if self._prepared is None:
            prep = self.ctx.prepare_g2
            self._prepared = {
                "g2": prep(self.ctx.g2),
                "x": prep(self.x_tilde),
                "y": [prep(y) for y in self.y_tildes],
            }
        return self._prepared

    def combs(self):
        if self._combs is None:
            from ..algebra import bls12381 as _bls

            self._combs = [_bls.G2Comb(y.raw) for y in self.y_tildes]
        return self._combs

    def message_point(self, msgs):
        """X + sum(m_i * Y_i) in G2."""
        from ..algebra.context import G2Element

        if isinstance(self.ctx, PairingContext):
            acc = self.x_tilde.raw
            from ..algebra import bls12381 as _bls

            for comb, m in zip(self.combs(), msgs):
                acc = _bls.g2_add(acc, comb.mul(m))
            return G2Element(self.ctx, acc)
        acc = self.x_tilde
        for y, m in zip(self.y_tildes, msgs):
            acc = acc + m * y
        return acc

    def base_mul(self, slot: int, k: int):
        """k * Y_slot, comb-accelerated on the default backend."""
        from ..algebra.context import G2Element

        if isinstance(self.ctx, PairingContext):
            return G2Element(self.ctx, self.combs()[slot].mul(k))
        return k * self.y_tildes[slot]

    def hidden_point(self, coeffs: dict, t_coeff: int):
        """sum coeffs[i] * Y_i + t_coeff * g2."""
        from ..algebra.context import G2Element

        acc = self.ctx.g2_base_mul(t_coeff)
        if isinstance(self.ctx, PairingContext):
            from ..algebra import bls12381 as _bls

            raw = acc.raw
            combs = self.combs()
            for i, k in coeffs.items():
                raw = _bls.g2_add(raw, combs[i].mul(k))
            return G2Element(self.ctx, raw)
        for i, k in coeffs.items():
            acc = acc + k * self.y_tildes[i]
        return acc

    def to_bytes(self) -> bytes:
        out = self.x_tilde.to_bytes()
        for y in self.y_tildes:
            out += y.to_bytes()
        return out

    @classmethod
    def from_bytes(cls, data: bytes, ctx) -> "CLPairingPublic":
        if len(data) % 96 or len(data) < 192:
            raise CLError("bad pairing public key encoding")
        points = [ctx.g2_from_bytes(data[i:i + 96]) for i in range(0, len(data), 96)]
        return cls(ctx, points[0], points[1:])


@dataclass(frozen=True)
class CLPairingSecret:
    x: int
    ys: tuple


# ---------------------------------------------------------------------------
# RSA variant

@dataclass(frozen=True)
class CLRSASignature:
    a: int
    e: int
    v: int

    variant = CLVariant.RSA

    def to_bytes(self) -> bytes:
        return (
            int(self.a).to_bytes(RSA_MODULUS_BITS // 8, "big")
            + int(self.e).to_bytes((E_BITS + 7) // 8, "big")
            + int(self.v).to_bytes((V_BITS + 7) // 8, "big")
        )


class CLRSAPublic:
    def __init__(self, n, s, z, rs):
        self.n = mpz(n)
        self.s = mpz(s)
        self.z = mpz(z)
        self.rs = [mpz(r) for r in rs]
        self.n_slots = len(self.rs)

    variant = CLVariant.RSA

    def to_bytes(self) -> bytes:
        size = RSA_MODULUS_BITS // 8
        out = int(self.n).to_bytes(size, "big")
        for v in (self.s, self.z, *self.rs):
            out += int(v).to_bytes(size, "big")
        return out

    @classmethod
    def from_bytes(cls, data: bytes) -> "CLRSAPublic":
        size = RSA_MODULUS_BITS // 8
        if len(data) % size or len(data) < 4 * size:
            raise CLError("bad RSA public key encoding")
        vals = [int.from_bytes(data[i:i + size], "big") for i in range(0, len(data), size)]
        return cls(vals[0], vals[1], vals[2], vals[3:])


@dataclass(frozen=True)
class CLRSASecret:
    p: int
    q: int


# ---------------------------------------------------------------------------
# Keypair facade

@dataclass(frozen=True)
class CLKeypair:
    variant: CLVariant
    secret: object
    public: object
    n_slots: int


def _seeded_rsa_primes(rng, bits):
    half = bits // 2
    primes = []
    while len(primes) < 2:
        cand = int.from_bytes(rng.read(half // 8), "big")
        cand |= (3 << (half - 2)) | 1  # force size and oddness
        p = next_prime(mpz(cand))
        if p.bit_length() == half and p not in primes:
            primes.append(p)
    return primes[0], primes[1]


def _rsa_primes(rng, bits=RSA_MODULUS_BITS):
    if rng.deterministic:
        return _seeded_rsa_primes(rng, bits)
    from cryptography.hazmat.primitives.asymmetric import rsa

    key = rsa.generate_private_key(public_exponent=65537, key_size=bits)
    nums = key.private_numbers()
    return mpz(nums.p), mpz(nums.q)


def cl_keygen(variant: CLVariant, n_slots: int, rng, ctx=None, self_test: bool = True) -> CLKeypair:
    if variant == CLVariant.PAIRING:
        ctx = ctx or PairingContext.default()
        x = ctx.random_scalar(rng)
        ys = tuple(ctx.random_scalar(rng) for _ in range(n_slots))
        public = CLPairingPublic(ctx, ctx.g2_base_mul(x), [ctx.g2_base_mul(y) for y in ys])
        kp = CLKeypair(variant, CLPairingSecret(x, ys), public, n_slots)
    elif variant == CLVariant.RSA:
        p, q = _rsa_primes(rng)
        n = p * q
        seed = mpz(int.from_bytes(rng.read(RSA_MODULUS_BITS // 8), "big")) % n
        s = seed * seed % n
        order = (p - 1) * (q - 1) // 4
        z = powmod(s, 2 + int.from_bytes(rng.read(V_BITS // 8), "big") % (order - 2), n)
        rs = [
            powmod(s, 2 + int.from_bytes(rng.read(V_BITS // 8), "big") % (order - 2), n)
            for _ in range(n_slots)
        ]
        public = CLRSAPublic(n, s, z, rs)
        kp = CLKeypair(variant, CLRSASecret(int(p), int(q)), public, n_slots)
    else:
        raise CLError(f"unknown variant {variant}")
    if self_test:
        probe = [b"self-test-%d" % i for i in range(n_slots)]
        if not cl_verify(probe, cl_sign(probe, kp, rng), kp.public):
            raise CLError("keypair failed self-test signature")
    return kp


def cl_sign(attrs, key: CLKeypair, rng):
    if len(attrs) != key.n_slots:
        raise CLError(f"expected {key.n_slots} attributes, got {len(attrs)}")
    if key.variant == CLVariant.PAIRING:
        ctx = key.public.ctx
        msgs = attrs_to_scalars(attrs, ctx.r)
        u = ctx.random_scalar(rng)
        k = key.secret.x
        for y, m in zip(key.secret.ys, msgs):
            k = (k + y * m) % ctx.r
        sigma1 = ctx.g1_base_mul(u)
        sigma2 = ctx.g1_base_mul(u * k % ctx.r)
        return CLPairingSignature(sigma1, sigma2)

    pub = key.public
    p, q = mpz(key.secret.p), mpz(key.secret.q)
    n = pub.n
    msgs = attrs_to_scalars(attrs, MSG_MODULUS)
    order = (p - 1) * (q - 1) // 4
    while True:
        start = (1 << (E_BITS - 1)) | int.from_bytes(rng.read(E_INTERVAL_BITS // 8), "big")
        e = next_prime(mpz(start))
        if gcd(e, order) == 1:
            break
    v = int.from_bytes(rng.read(V_BITS // 8), "big")
    acc = powmod(pub.s, v, n)
    for r_i, m in zip(pub.rs, msgs):
        acc = acc * powmod(r_i, m, n) % n
    base = pub.z * invert(acc, n) % n
    a = powmod(base, invert(e, order), n)
    return CLRSASignature(int(a), int(e), int(v))


def cl_verify(attrs, sig, public) -> bool:
    try:
        if getattr(sig, "variant", None) != public.variant:
            return False
        if len(attrs) != public.n_slots:
            return False
        if public.variant == CLVariant.PAIRING:
            ctx = public.ctx
            if sig.sigma1.is_identity:
                return False
            msgs = attrs_to_scalars(attrs, ctx.r)
            target = public.message_point(msgs)
            return ctx.multi_pair(
                [(sig.sigma2, public.prepared["g2"]), (-sig.sigma1, target)]
            ).is_identity

        n = public.n
        a, e, v = mpz(sig.a), mpz(sig.e), mpz(sig.v)
        if not (1 < a < n):
            return False
        if not ((1 << (E_BITS - 1)) < e < (1 << E_BITS)) or e % 2 == 0:
            return False
        if not (0 <= v < (1 << (V_BITS + 1))):
            return False
        msgs = attrs_to_scalars(attrs, MSG_MODULUS)
        acc = powmod(a, e, n) * powmod(public.s, v, n) % n
        for r_i, m in zip(public.rs, msgs):
            acc = acc * powmod(r_i, m, n) % n
        return acc == public.z
    except (TypeError, ValueError, AttributeError):
        return False
