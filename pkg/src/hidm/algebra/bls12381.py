"""BLS12-381 group and pairing engine.

Implements the two source groups (affine/Jacobian point arithmetic), the
ate pairing with precomputable line coefficients, fixed-base combs, and
canonical point/scalar serialization.  Points are tuples: G1 affine is
(x, y) with gmpy2 integers, G2 affine is ((x0, x1), (y0, y1)) over Fq2,
and None encodes the point at infinity.  Nothing here is constant-time;
the package targets protocol simulation, not hardened deployment.
"""

from gmpy2 import mpz, invert, powmod

from .fields import (
    P,
    FQ12_ONE,
    fq12_cyclo_pow,
    fq12_cyclo_sqr,
    fq2_add,
    fq2_sub,
    fq2_neg,
    fq2_mul,
    fq2_sqr,
    fq2_mul_fq,
    fq2_mul_xi,
    fq2_inv,
    fq2_conj,
    fq2_pow,
    fq12_mul,
    fq12_sqr,
    fq12_conj,
    fq12_inv,
    fq12_mul_sparse,
    fq12_frobenius,
    fq12_pow,
)

# Curve order (prime), curve parameter u, and cofactors.
R = mpz(0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001)
U = -0xD201000000010000
H1 = mpz(0x396C8C005555E1568C00AAAB0000AAAB)

B1 = mpz(4)
B2 = (mpz(4), mpz(4))  # twist: y^2 = x^3 + 4(1 + u)

G1_GEN = (
    mpz(0x17F1D3A73197D7942695638C4FA9AC0FC3688C4F9774B905A14E3A3F171BAC586C55E83FF97A1AEFFB3AF00ADB22C6BB),
    mpz(0x08B3F481E3AAA0F1A09E30ED741D8AE4FCF5E095D5D00AF600DB18CB2C04B3EDD03CC744A2888AE40CAA232946C5E7E1),
)
G2_GEN = (
    (
        mpz(0x024AA2B2F08F0A91260805272DC51051C6E47AD4FA403B02B4510B647AE3D1770BAC0326A805BBEFD48056C8C121BDB8),
        mpz(0x13E02B6052719F607DACD3A088274F65596BD0D09920B61AB5DA61BBDC7F5049334CF11213945D57E5AC7D055D042B7E),
    ),
    (
        mpz(0x0CE5D527727D6E118CC9CDC6DA2E351AADFD9BAA8CBDD3A76D429A695160D12C923AC9CC3BACA289E193548608B82801),
        mpz(0x0606C4A02EA734CC32ACD2B02BC28B99CB3E287E85A763AF267492AB572E99AB3F370D275CEC1DA1AAA9075FF05F79BE),
    ),
)

_U_ABS_BITS = bin(-U)[3:]  # MSB already consumed by the loop seed


class DecodeError(ValueError):
    """Raised when a byte string is not a canonical group-element encoding."""


# ---------------------------------------------------------------------------
# G1 arithmetic (Jacobian over Fq)

def g1_is_on_curve(pt):
    if pt is None:
        return True
    x, y = pt
    return (y * y - (x * x * x + B1)) % P == 0


def g1_neg(pt):
    if pt is None:
        return None
    return (pt[0], (-pt[1]) % P)


def _g1j_double(pt):
    X, Y, Z = pt
    if not Y:
        return (mpz(0), mpz(0), mpz(0))
    A = X * X % P
    B = Y * Y % P
    C = B * B % P
    D = 2 * ((X + B) * (X + B) - A - C) % P
    E = 3 * A % P
    F = E * E % P
    X3 = (F - 2 * D) % P
    Y3 = (E * (D - X3) - 8 * C) % P
    Z3 = 2 * Y * Z % P
    return (X3, Y3, Z3)


def _g1j_add_affine(pt, q):
    # Mixed Jacobian + affine addition.
    X1, Y1, Z1 = pt
    if not Z1:
        return (q[0], q[1], mpz(1))
    x2, y2 = q
    Z1Z1 = Z1 * Z1 % P
    U2 = x2 * Z1Z1 % P
    S2 = y2 * Z1 * Z1Z1 % P
    if U2 == X1:
        if S2 == Y1:
            return _g1j_double(pt)
        return (mpz(0), mpz(0), mpz(0))
    H = (U2 - X1) % P
    HH = H * H % P
    I = 4 * HH % P
    J = H * I % P
    rr = 2 * (S2 - Y1) % P
    V = X1 * I % P
    X3 = (rr * rr - J - 2 * V) % P
    Y3 = (rr * (V - X3) - 2 * Y1 * J) % P
    Z3 = ((Z1 + H) * (Z1 + H) - Z1Z1 - HH) % P
    return (X3, Y3, Z3)


def _g1j_to_affine(pt):
    X, Y, Z = pt
    if not Z:
        return None
    zi = invert(Z, P)
    zi2 = zi * zi % P
    return (X * zi2 % P, Y * zi2 * zi % P)


def g1_add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return _g1j_to_affine(_g1j_add_affine((a[0], a[1], mpz(1)), b))


def g1_mul(pt, k):
    k %= R
    if pt is None or k == 0:
        return None
    # 4-bit window with an affine table
    table = [None, pt]
    for _ in range(14):
        table.append(g1_add(table[-1], pt))
    digits = []
    while k:
        digits.append(k & 15)
        k >>= 4
    acc = (mpz(0), mpz(0), mpz(0))
    for d in reversed(digits):
        acc = _g1j_double(_g1j_double(_g1j_double(_g1j_double(acc))))
        if d:
            acc = _g1j_add_affine(acc, table[d])
    return _g1j_to_affine(acc)


def g1_eq(a, b):
    return a == b


# ---------------------------------------------------------------------------
# G2 arithmetic (Jacobian over Fq2)

def g2_is_on_curve(pt):
    if pt is None:
        return True
    x, y = pt
    lhs = fq2_sqr(y)
    rhs = fq2_add(fq2_mul(fq2_sqr(x), x), B2)
    return lhs == rhs


def g2_neg(pt):
    if pt is None:
        return None
    return (pt[0], fq2_neg(pt[1]))


_FQ2_Z = (mpz(0), mpz(0))


def _g2j_double(pt):
    X, Y, Z = pt
    if Y == _FQ2_Z:
        return (_FQ2_Z, _FQ2_Z, _FQ2_Z)
    A = fq2_sqr(X)
    B = fq2_sqr(Y)
    C = fq2_sqr(B)
    D = fq2_sub(fq2_sub(fq2_sqr(fq2_add(X, B)), A), C)
    D = fq2_add(D, D)
    E = fq2_add(fq2_add(A, A), A)
    F = fq2_sqr(E)
    X3 = fq2_sub(F, fq2_add(D, D))
    C8 = fq2_add(fq2_add(C, C), fq2_add(C, C))
    C8 = fq2_add(C8, C8)
    Y3 = fq2_sub(fq2_mul(E, fq2_sub(D, X3)), C8)
    Z3 = fq2_mul(fq2_add(Y, Y), Z)
    return (X3, Y3, Z3)


def _g2j_add_affine(pt, q):
    X1, Y1, Z1 = pt
    if Z1 == _FQ2_Z:
        return (q[0], q[1], (mpz(1), mpz(0)))
    x2, y2 = q
    Z1Z1 = fq2_sqr(Z1)
    U2 = fq2_mul(x2, Z1Z1)
    S2 = fq2_mul(fq2_mul(y2, Z1), Z1Z1)
    if U2 == X1:
        if S2 == Y1:
            return _g2j_double(pt)
        return (_FQ2_Z, _FQ2_Z, _FQ2_Z)
    H = fq2_sub(U2, X1)
    HH = fq2_sqr(H)
    I = fq2_add(fq2_add(HH, HH), fq2_add(HH, HH))
    J = fq2_mul(H, I)
    rr = fq2_sub(S2, Y1)
    rr = fq2_add(rr, rr)
    V = fq2_mul(X1, I)
    X3 = fq2_sub(fq2_sub(fq2_sqr(rr), J), fq2_add(V, V))
    YJ = fq2_mul(Y1, J)
    Y3 = fq2_sub(fq2_mul(rr, fq2_sub(V, X3)), fq2_add(YJ, YJ))
    Z3 = fq2_sub(fq2_sub(fq2_sqr(fq2_add(Z1, H)), Z1Z1), HH)
    return (X3, Y3, Z3)


def _g2j_to_affine(pt):
    X, Y, Z = pt
    if Z == _FQ2_Z:
        return None
    zi = fq2_inv(Z)
    zi2 = fq2_sqr(zi)
    return (fq2_mul(X, zi2), fq2_mul(fq2_mul(Y, zi2), zi))


def g2_add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return _g2j_to_affine(_g2j_add_affine((a[0], a[1], (mpz(1), mpz(0))), b))


def g2_mul(pt, k):
    k %= R
    if pt is None or k == 0:
        return None
    table = [None, pt]
    for _ in range(14):
        table.append(g2_add(table[-1], pt))
    digits = []
    while k:
        digits.append(k & 15)
        k >>= 4
    acc = (_FQ2_Z, _FQ2_Z, _FQ2_Z)
    for d in reversed(digits):
        acc = _g2j_double(_g2j_double(_g2j_double(_g2j_double(acc))))
        if d:
            acc = _g2j_add_affine(acc, table[d])
    return _g2j_to_affine(acc)


def g2_eq(a, b):
    return a == b


# ---------------------------------------------------------------------------
# Fixed-base combs (4-bit windows over the full scalar width)

class G1Comb:
    def __init__(self, base):
        self.tables = []
        cur = base
        for _ in range(64):
            row = [None] * 16
            row[1] = cur
            for d in range(2, 16):
                row[d] = g1_add(row[d - 1], cur)
            self.tables.append(row)
            nxt = cur
            for _ in range(4):
                nxt = _g1j_to_affine(_g1j_double((nxt[0], nxt[1], mpz(1))))
            cur = nxt

    def mul(self, k):
        k = int(k) % R
        acc = (mpz(0), mpz(0), mpz(0))
        i = 0
        while k:
            d = k & 15
            if d:
                acc = _g1j_add_affine(acc, self.tables[i][d])
            k >>= 4
            i += 1
        return _g1j_to_affine(acc)


class G2Comb:
    def __init__(self, base):
        self.tables = []
        cur = base
        one = (mpz(1), mpz(0))
        for _ in range(64):
            row = [None] * 16
            row[1] = cur
            for d in range(2, 16):
                row[d] = g2_add(row[d - 1], cur)
            self.tables.append(row)
            nxt = cur
            for _ in range(4):
                nxt = _g2j_to_affine(_g2j_double((nxt[0], nxt[1], one)))
            cur = nxt

    def mul(self, k):
        k = int(k) % R
        acc = (_FQ2_Z, _FQ2_Z, _FQ2_Z)
        i = 0
        while k:
            d = k & 15
            if d:
                acc = _g2j_add_affine(acc, self.tables[i][d])
            k >>= 4
            i += 1
        return _g2j_to_affine(acc)


class GTComb:
    """Fixed-base exponentiation table for a GT element."""

    def __init__(self, base):
        self.tables = []
        cur = base
        for _ in range(64):
            row = [None] * 16
            row[1] = cur
            for d in range(2, 16):
                row[d] = fq12_mul(row[d - 1], cur)
            self.tables.append(row)
            nxt = cur
            for _ in range(4):
                nxt = fq12_cyclo_sqr(nxt)
            cur = nxt

    def pow(self, k):
        k = int(k) % R
        acc = FQ12_ONE
        i = 0
        while k:
            d = k & 15
            if d:
                acc = fq12_mul(acc, self.tables[i][d])
            k >>= 4
            i += 1
        return acc


# ---------------------------------------------------------------------------
# Pairing

class G2Prepared:
    """Precomputed Miller-loop line coefficients for a fixed G2 point."""

    __slots__ = ("coeffs",)

    def __init__(self, q):
        if q is None:
            raise ValueError("cannot prepare the point at infinity")
        coeffs = []
        T = q
        for bit in _U_ABS_BITS:
            T, lam, nu = _line_double(T)
            coeffs.append((lam, nu))
            if bit == "1":
                T, lam, nu = _line_add(T, q)
                coeffs.append((lam, nu))
        self.coeffs = coeffs


def _line_double(T):
    x, y = T
    lam = fq2_mul(fq2_mul_fq(fq2_sqr(x), 3), fq2_inv(fq2_add(y, y)))
    nu = fq2_sub(fq2_mul(lam, x), y)
    x3 = fq2_sub(fq2_sqr(lam), fq2_add(x, x))
    y3 = fq2_sub(fq2_mul(lam, fq2_sub(x, x3)), y)
    return (x3, y3), lam, nu


def _line_add(T, Q):
    xt, yt = T
    xq, yq = Q
    lam = fq2_mul(fq2_sub(yt, yq), fq2_inv(fq2_sub(xt, xq)))
    nu = fq2_sub(fq2_mul(lam, xq), yq)
    x3 = fq2_sub(fq2_sub(fq2_sqr(lam), xt), xq)
    y3 = fq2_sub(fq2_mul(lam, fq2_sub(xt, x3)), yt)
    return (x3, y3), lam, nu


def miller_loop(pairs):
    """Product of Miller loops over [(g1_affine, G2Prepared)], unreduced."""
    evals = []
    for pt, prep in pairs:
        if pt is None:
            continue
        xp, yp = pt
        nxp = (-xp) % P
        evals.append((yp, nxp, prep.coeffs))
    f = FQ12_ONE
    idx = 0
    for bit in _U_ABS_BITS:
        f = fq12_sqr(f)
        for yp, nxp, coeffs in evals:
            lam, nu = coeffs[idx]
            f = fq12_mul_sparse(f, (yp, yp), nu, fq2_mul_fq(lam, nxp))
        if bit == "1":
            for yp, nxp, coeffs in evals:
                lam, nu = coeffs[idx + 1]
                f = fq12_mul_sparse(f, (yp, yp), nu, fq2_mul_fq(lam, nxp))
            idx += 2
        else:
            idx += 1
    return fq12_conj(f)  # u < 0


_K_HARD = ((U - 1) ** 2) // 3
_U_ABS = -U


def _pow_pos(x, e):
    # x is cyclotomic here (post easy part), so GS squaring applies
    result = FQ12_ONE
    base = x
    while e:
        if e & 1:
            result = fq12_mul(result, base)
        base = fq12_cyclo_sqr(base)
        e >>= 1
    return result


def _pow_u(x):
    # x^U for x in the cyclotomic subgroup (conjugation inverts).
    return fq12_conj(_pow_pos(x, _U_ABS))


def final_exponentiation(f):
    # Easy part: f^((q^6 - 1)(q^2 + 1)); lands in the cyclotomic subgroup.
    t = fq12_mul(fq12_conj(f), fq12_inv(f))
    f = fq12_mul(fq12_frobenius(t, 2), t)
    # Hard part via 3*(q^4 - q^2 + 1)/r = (u-1)^2 (u+q)(u^2+q^2-1) + 3.
    a = fq12_cyclo_pow(f, _K_HARD)
    a = fq12_mul(_pow_u(a), fq12_frobenius(a, 1))
    a = fq12_mul(
        fq12_mul(_pow_u(_pow_u(a)), fq12_frobenius(a, 2)),
        fq12_conj(a),
    )
    return fq12_mul(a, f)


def pairing(p, q):
    """e(p, q) for p in G1 affine, q in G2 affine (or prepared)."""
    if p is None or q is None:
        return FQ12_ONE
    prep = q if isinstance(q, G2Prepared) else G2Prepared(q)
    return final_exponentiation(miller_loop([(p, prep)]))


def multi_pairing(pairs):
    """Product of pairings e(p_i, q_i) with one shared final exponentiation."""
    prepared = []
    for p, q in pairs:
        if p is None or q is None:
            continue
        prepared.append((p, q if isinstance(q, G2Prepared) else G2Prepared(q)))
    if not prepared:
        return FQ12_ONE
    return final_exponentiation(miller_loop(prepared))


# ---------------------------------------------------------------------------
# GT helpers

def gt_pow(a, e):
    e = int(e) % R
    return fq12_cyclo_pow(a, e)


def gt_inv(a):
    # GT elements live in the cyclotomic subgroup: conjugation inverts.
    return fq12_conj(a)


def gt_mul(a, b):
    return fq12_mul(a, b)


def gt_is_in_subgroup(a):
    # cyclotomic membership first (conjugate must invert), then order r
    if fq12_mul(a, fq12_conj(a)) != FQ12_ONE:
        return False
    return fq12_cyclo_pow(a, R) == FQ12_ONE


# ---------------------------------------------------------------------------
# Subgroup membership (fast endomorphism checks)

def _find_beta():
    # Primitive cube root of unity in Fq matching the G1 GLV endomorphism
    # phi(x, y) = (beta x, y) with phi(G) = (U^2 - 1) G.
    lam = (U * U - 1) % R
    target = g1_mul(G1_GEN, lam)
    g = mpz(2)
    while True:
        beta = powmod(g, (P - 1) // 3, P)
        if beta != 1:
            for cand in (beta, beta * beta % P):
                if (G1_GEN[0] * cand % P, G1_GEN[1]) == target:
                    return cand
        g += 1


_BETA = _find_beta()


def g1_in_subgroup(pt):
    if pt is None:
        return True
    if not g1_is_on_curve(pt):
        return False
    lam = (U * U - 1) % R
    return g1_mul(pt, lam) == (pt[0] * _BETA % P, pt[1])


def _psi_constants():
    xi = (mpz(1), mpz(1))
    gamma = fq2_pow(xi, (P - 1) // 6)
    xi_ratio = fq2_mul(xi, fq2_inv(fq2_conj(xi)))
    psi_x = fq2_mul(fq2_pow(gamma, 4), xi_ratio)
    psi_y = fq2_mul(fq2_pow(gamma, 3), xi_ratio)
    return psi_x, psi_y


_PSI_X, _PSI_Y = _psi_constants()


def _psi(pt):
    x, y = pt
    return (fq2_mul(fq2_conj(x), _PSI_X), fq2_mul(fq2_conj(y), _PSI_Y))


def g2_in_subgroup(pt):
    if pt is None:
        return True
    if not g2_is_on_curve(pt):
        return False
    # pt in G2 iff psi(pt) == U * pt  (untwist-Frobenius eigenvalue check)
    return _psi(pt) == g2_mul(pt, U % R)


# ---------------------------------------------------------------------------
# Hashing to G1 (try-and-increment, then cofactor clearing)

def _sqrt_fq(a):
    # P == 3 (mod 4)
    cand = powmod(a, (P + 1) // 4, P)
    if cand * cand % P == a % P:
        return cand
    return None


def hash_to_g1(digest_fn):
    """Map a counter-indexed digest stream to a nonzero point of order R.

    digest_fn(counter) must return an integer in [0, P); the first counter
    whose x-coordinate lies on the curve wins, and the cofactor is cleared.
    """
    ctr = 0
    while True:
        x = digest_fn(ctr)
        t = (x * x * x + B1) % P
        y = _sqrt_fq(t)
        if y is not None:
            pt = (mpz(x), min(y, (-y) % P))  # canonical sign choice
            out = g1_mul_by_cofactor(pt)
            if out is not None:
                return out
        ctr += 1


def g1_mul_by_cofactor(pt):
    k = int(H1)
    acc = (mpz(0), mpz(0), mpz(0))
    for bit in bin(k)[2:]:
        acc = _g1j_double(acc)
        if bit == "1":
            acc = _g1j_add_affine(acc, pt)
    return _g1j_to_affine(acc)


# ---------------------------------------------------------------------------
# Serialization (48-byte compressed G1, 96-byte compressed G2, 576-byte GT,
# 32-byte scalars; big-endian, flag bits in the top of the first byte)

_HALF = (P - 1) // 2


def g1_to_bytes(pt):
    if pt is None:
        return bytes([0xC0]) + b"\x00" * 47
    x, y = pt
    data = bytearray(int(x).to_bytes(48, "big"))
    data[0] |= 0x80
    if y > _HALF:
        data[0] |= 0x20
    return bytes(data)


def g1_from_bytes(data, check_subgroup=True):
    if len(data) != 48:
        raise DecodeError("G1 encoding must be 48 bytes")
    flags = data[0]
    if not flags & 0x80:
        raise DecodeError("missing compression flag")
    if flags & 0x40:
        if data != bytes([0xC0]) + b"\x00" * 47:
            raise DecodeError("non-canonical infinity encoding")
        return None
    x = mpz(int.from_bytes(bytes([flags & 0x1F]) + data[1:], "big"))
    if x >= P:
        raise DecodeError("x coordinate out of range")
    y = _sqrt_fq((x * x * x + B1) % P)
    if y is None:
        raise DecodeError("x is not on the curve")
    if bool(flags & 0x20) != (y > _HALF):
        y = (-y) % P
    pt = (x, y)
    if check_subgroup and not g1_in_subgroup(pt):
        raise DecodeError("point not in the prime-order subgroup")
    return pt


def _fq2_lex_large(y):
    y0, y1 = y
    neg = ((-y0) % P, (-y1) % P)
    return (int(y1), int(y0)) > (int(neg[1]), int(neg[0]))


def _sqrt_fq2(a):
    a0, a1 = a
    if a1 == 0:
        s = _sqrt_fq(a0)
        if s is not None:
            return (s, mpz(0))
        s = _sqrt_fq((-a0) % P)
        if s is None:
            return None
        return (mpz(0), s)
    n = _sqrt_fq((a0 * a0 + a1 * a1) % P)
    if n is None:
        return None
    inv2 = invert(2, P)
    for sign in (n, (-n) % P):
        half = (a0 + sign) * inv2 % P
        alpha = _sqrt_fq(half)
        if alpha is not None and alpha != 0:
            beta = a1 * invert(2 * alpha % P, P) % P
            cand = (alpha, beta)
            if fq2_sqr(cand) == (a0 % P, a1 % P):
                return cand
    return None


def g2_to_bytes(pt):
    if pt is None:
        return bytes([0xC0]) + b"\x00" * 95
    (x0, x1), y = pt
    data = bytearray(int(x1).to_bytes(48, "big") + int(x0).to_bytes(48, "big"))
    data[0] |= 0x80
    if _fq2_lex_large(y):
        data[0] |= 0x20
    return bytes(data)


def g2_from_bytes(data, check_subgroup=True):
    if len(data) != 96:
        raise DecodeError("G2 encoding must be 96 bytes")
    flags = data[0]
    if not flags & 0x80:
        raise DecodeError("missing compression flag")
    if flags & 0x40:
        if data != bytes([0xC0]) + b"\x00" * 95:
            raise DecodeError("non-canonical infinity encoding")
        return None
    x1 = mpz(int.from_bytes(bytes([flags & 0x1F]) + data[1:48], "big"))
    x0 = mpz(int.from_bytes(data[48:], "big"))
    if x0 >= P or x1 >= P:
        raise DecodeError("x coordinate out of range")
    x = (x0, x1)
    y = _sqrt_fq2(fq2_add(fq2_mul(fq2_sqr(x), x), B2))
    if y is None:
        raise DecodeError("x is not on the twist")
    if bool(flags & 0x20) != _fq2_lex_large(y):
        y = fq2_neg(y)
    pt = (x, y)
    if check_subgroup and not g2_in_subgroup(pt):
        raise DecodeError("point not in the prime-order subgroup")
    return pt


def gt_to_bytes(el):
    out = bytearray()
    for fq6 in el:
        for fq2 in fq6:
            for c in fq2:
                out += int(c).to_bytes(48, "big")
    return bytes(out)


def gt_from_bytes(data, check_subgroup=True):
    if len(data) != 576:
        raise DecodeError("GT encoding must be 576 bytes")
    vals = []
    for i in range(12):
        v = mpz(int.from_bytes(data[i * 48:(i + 1) * 48], "big"))
        if v >= P:
            raise DecodeError("coefficient out of range")
        vals.append(v)
    el = (
        ((vals[0], vals[1]), (vals[2], vals[3]), (vals[4], vals[5])),
        ((vals[6], vals[7]), (vals[8], vals[9]), (vals[10], vals[11])),
    )
    if check_subgroup and not gt_is_in_subgroup(el):
        raise DecodeError("element not in the order-r subgroup")
    return el


def scalar_to_bytes(k):
    return (int(k) % R).to_bytes(32, "big")


def scalar_from_bytes(data):
    if len(data) != 32:
        raise DecodeError("scalar encoding must be 32 bytes")
    v = int.from_bytes(data, "big")
    if v >= R:
        raise DecodeError("scalar out of range")
    return mpz(v)
