"""Tower-field arithmetic for the 381-bit pairing curve.

Elements are plain tuples of gmpy2 integers rather than classes: Fq2 is
(c0, c1) meaning c0 + c1*u with u^2 = -1, Fq6 is a triple of Fq2 with
v^3 = xi = 1 + u, and Fq12 is a pair of Fq6 with w^2 = v.  The flat
representation keeps per-operation interpreter overhead low enough that
a pairing lands in the low milliseconds, which the protocol layer needs.
"""

from gmpy2 import mpz, invert

# Base field modulus of BLS12-381.
P = mpz(0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB)

FQ2_ZERO = (mpz(0), mpz(0))
FQ2_ONE = (mpz(1), mpz(0))
FQ6_ZERO = (FQ2_ZERO, FQ2_ZERO, FQ2_ZERO)
FQ6_ONE = (FQ2_ONE, FQ2_ZERO, FQ2_ZERO)
FQ12_ZERO = (FQ6_ZERO, FQ6_ZERO)
FQ12_ONE = (FQ6_ONE, FQ6_ZERO)


# ---------------------------------------------------------------------------
# Fq2 = Fq[u] / (u^2 + 1)

def fq2_add(a, b):
    return ((a[0] + b[0]) % P, (a[1] + b[1]) % P)


def fq2_sub(a, b):
    return ((a[0] - b[0]) % P, (a[1] - b[1]) % P)


def fq2_neg(a):
    return ((-a[0]) % P, (-a[1]) % P)


def fq2_conj(a):
    return (a[0], (-a[1]) % P)


def fq2_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = a0 * b0
    t1 = a1 * b1
    return ((t0 - t1) % P, ((a0 + a1) * (b0 + b1) - t0 - t1) % P)


def fq2_sqr(a):
    a0, a1 = a
    return ((a0 + a1) * (a0 - a1) % P, (a0 * a1 << 1) % P)


def fq2_mul_fq(a, k):
    return (a[0] * k % P, a[1] * k % P)


def fq2_mul_xi(a):
    # xi = 1 + u, so (a0 + a1 u)(1 + u) = (a0 - a1) + (a0 + a1) u.
    a0, a1 = a
    return ((a0 - a1) % P, (a0 + a1) % P)


def fq2_inv(a):
    a0, a1 = a
    d = invert(a0 * a0 + a1 * a1, P)
    return (a0 * d % P, (-a1) * d % P)


def fq2_pow(a, e):
    result = FQ2_ONE
    base = a
    while e:
        if e & 1:
            result = fq2_mul(result, base)
        base = fq2_sqr(base)
        e >>= 1
    return result


# ---------------------------------------------------------------------------
# Fq6 = Fq2[v] / (v^3 - xi)

def fq6_add(a, b):
    return (fq2_add(a[0], b[0]), fq2_add(a[1], b[1]), fq2_add(a[2], b[2]))


def fq6_sub(a, b):
    return (fq2_sub(a[0], b[0]), fq2_sub(a[1], b[1]), fq2_sub(a[2], b[2]))


def fq6_neg(a):
    return (fq2_neg(a[0]), fq2_neg(a[1]), fq2_neg(a[2]))


def fq6_mul(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    t0 = fq2_mul(a0, b0)
    t1 = fq2_mul(a1, b1)
    t2 = fq2_mul(a2, b2)
    r0 = fq2_add(t0, fq2_mul_xi(fq2_sub(fq2_mul(fq2_add(a1, a2), fq2_add(b1, b2)), fq2_add(t1, t2))))
    r1 = fq2_add(fq2_sub(fq2_mul(fq2_add(a0, a1), fq2_add(b0, b1)), fq2_add(t0, t1)), fq2_mul_xi(t2))
    r2 = fq2_add(fq2_sub(fq2_mul(fq2_add(a0, a2), fq2_add(b0, b2)), fq2_add(t0, t2)), t1)
    return (r0, r1, r2)


def fq6_sqr(a):
    a0, a1, a2 = a
    s0 = fq2_sqr(a0)
    s1 = fq2_mul(a0, a1)
    s1 = fq2_add(s1, s1)
    s2 = fq2_sqr(a2)
    t = fq2_mul(a1, a2)
    t = fq2_add(t, t)
    r0 = fq2_add(s0, fq2_mul_xi(t))
    r1 = fq2_add(s1, fq2_mul_xi(s2))
    m = fq2_mul(a0, a2)
    r2 = fq2_add(fq2_add(m, m), fq2_sqr(a1))
    return (r0, r1, r2)


def fq6_mul_by_v(a):
    return (fq2_mul_xi(a[2]), a[0], a[1])


def fq6_inv(a):
    a0, a1, a2 = a
    t0 = fq2_sub(fq2_sqr(a0), fq2_mul_xi(fq2_mul(a1, a2)))
    t1 = fq2_sub(fq2_mul_xi(fq2_sqr(a2)), fq2_mul(a0, a1))
    t2 = fq2_sub(fq2_sqr(a1), fq2_mul(a0, a2))
    f = fq2_add(fq2_mul(a0, t0), fq2_mul_xi(fq2_add(fq2_mul(a2, t1), fq2_mul(a1, t2))))
    finv = fq2_inv(f)
    return (fq2_mul(t0, finv), fq2_mul(t1, finv), fq2_mul(t2, finv))


# ---------------------------------------------------------------------------
# Fq12 = Fq6[w] / (w^2 - v)

def fq12_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = fq6_mul(a0, b0)
    t1 = fq6_mul(a1, b1)
    r0 = fq6_add(t0, fq6_mul_by_v(t1))
    r1 = fq6_sub(fq6_mul(fq6_add(a0, a1), fq6_add(b0, b1)), fq6_add(t0, t1))
    return (r0, r1)


def fq12_sqr(a):
    a0, a1 = a
    t = fq6_mul(a0, a1)
    r0 = fq6_sub(fq6_sub(fq6_mul(fq6_add(a0, a1), fq6_add(a0, fq6_mul_by_v(a1))), t), fq6_mul_by_v(t))
    return (r0, fq6_add(t, t))


def fq12_conj(a):
    return (a[0], fq6_neg(a[1]))


def fq12_inv(a):
    a0, a1 = a
    f = fq6_sub(fq6_sqr(a0), fq6_mul_by_v(fq6_sqr(a1)))
    finv = fq6_inv(f)
    return (fq6_mul(a0, finv), fq6_neg(fq6_mul(a1, finv)))


def fq12_mul_sparse(f, s0, s3, s5):
    """Multiply f by a line value with tower slots ((s0, 0, 0), (0, s3, s5))."""
    f0, f1 = f
    x0, x1, x2 = f0
    y0, y1, y2 = f1
    # f0 * (s0, 0, 0)
    p0 = (fq2_mul(x0, s0), fq2_mul(x1, s0), fq2_mul(x2, s0))
    # f1 * (0, s3, s5)
    q0 = fq2_mul_xi(fq2_add(fq2_mul(y1, s5), fq2_mul(y2, s3)))
    q1 = fq2_add(fq2_mul(y0, s3), fq2_mul_xi(fq2_mul(y2, s5)))
    q2 = fq2_add(fq2_mul(y0, s5), fq2_mul(y1, s3))
    r0 = fq6_add(p0, fq6_mul_by_v((q0, q1, q2)))
    # f0 * (0, s3, s5)
    u0 = fq2_mul_xi(fq2_add(fq2_mul(x1, s5), fq2_mul(x2, s3)))
    u1 = fq2_add(fq2_mul(x0, s3), fq2_mul_xi(fq2_mul(x2, s5)))
    u2 = fq2_add(fq2_mul(x0, s5), fq2_mul(x1, s3))
    # f1 * (s0, 0, 0)
    v0 = (fq2_mul(y0, s0), fq2_mul(y1, s0), fq2_mul(y2, s0))
    r1 = fq6_add((u0, u1, u2), v0)
    return (r0, r1)


def fq12_pow(a, e):
    """Plain square-and-multiply with a 4-bit window."""
    if e < 0:
        raise ValueError("negative exponent")
    if e == 0:
        return FQ12_ONE
    table = [FQ12_ONE, a]
    for _ in range(14):
        table.append(fq12_mul(table[-1], a))
    digits = []
    while e:
        digits.append(e & 15)
        e >>= 4
    result = table[digits[-1]]
    for d in reversed(digits[:-1]):
        result = fq12_sqr(fq12_sqr(fq12_sqr(fq12_sqr(result))))
        if d:
            result = fq12_mul(result, table[d])
    return result


def fq12_eq(a, b):
    return a == b


def _fq4_sqr_flat(a0, a1, b0, b1):
    # (a + b*s)^2 over Fq2 pairs with s^2 = xi; flat gmpy2 arithmetic
    s0 = (a0 + a1) * (a0 - a1) % P
    s1 = (a0 * a1 << 1) % P
    t0 = (b0 + b1) * (b0 - b1) % P
    t1 = (b0 * b1 << 1) % P
    first0 = (t0 - t1 + s0) % P
    first1 = (t0 + t1 + s1) % P
    u0 = a0 + b0
    u1 = a1 + b1
    second0 = ((u0 + u1) * (u0 - u1) - s0 - t0) % P
    second1 = ((u0 * u1 << 1) - s1 - t1) % P
    return first0, first1, second0, second1


def fq12_cyclo_sqr(f):
    """Squaring restricted to the cyclotomic subgroup (Granger-Scott).

    Correct only for elements satisfying f^(q^4 - q^2 + 1) = 1, which
    includes every pairing output after the easy exponentiation.
    """
    ((w00, w01), (x0, x1), (y0, y1)), ((z0, z1), (v0, v1), (u0, u1)) = f
    t30, t31, t40, t41 = _fq4_sqr_flat(w00, w01, v0, v1)
    t50, t51, t60, t61 = _fq4_sqr_flat(z0, z1, y0, y1)
    t70, t71, t80, t81 = _fq4_sqr_flat(x0, x1, u0, u1)
    t90 = (t80 - t81) % P
    t91 = (t80 + t81) % P
    return (
        (
            ((3 * t30 - 2 * w00) % P, (3 * t31 - 2 * w01) % P),
            ((3 * t50 - 2 * x0) % P, (3 * t51 - 2 * x1) % P),
            ((3 * t70 - 2 * y0) % P, (3 * t71 - 2 * y1) % P),
        ),
        (
            ((3 * t90 + 2 * z0) % P, (3 * t91 + 2 * z1) % P),
            ((3 * t40 + 2 * v0) % P, (3 * t41 + 2 * v1) % P),
            ((3 * t60 + 2 * u0) % P, (3 * t61 + 2 * u1) % P),
        ),
    )


def fq12_cyclo_pow(a, e):
    """Square-and-multiply with cyclotomic squarings (4-bit window)."""
    if e < 0:
        raise ValueError("negative exponent")
    if e == 0:
        return FQ12_ONE
    table = [FQ12_ONE, a]
    for _ in range(14):
        table.append(fq12_mul(table[-1], a))
    digits = []
    while e:
        digits.append(e & 15)
        e >>= 4
    result = table[digits[-1]]
    for d in reversed(digits[:-1]):
        result = fq12_cyclo_sqr(fq12_cyclo_sqr(fq12_cyclo_sqr(fq12_cyclo_sqr(result))))
        if d:
            result = fq12_mul(result, table[d])
    return result


# ---------------------------------------------------------------------------
# Frobenius maps.  Slot view: an Fq12 element is sum_{i<6} slot_i * w^i with
# slot_i in Fq2; the tower layout interleaves the slots as
# ((s0, s2, s4), (s1, s3, s5)).

def _to_slots(a):
    (c00, c01, c02), (c10, c11, c12) = a
    return [c00, c10, c01, c11, c02, c12]


def _from_slots(s):
    return ((s[0], s[2], s[4]), (s[1], s[3], s[5]))


def _gamma_tables():
    xi = (mpz(1), mpz(1))
    e = (P - 1) // 6
    g1 = [fq2_pow(xi, e * i) for i in range(6)]
    g2 = [fq2_mul(g, fq2_conj(g)) for g in g1]  # norm: gamma1_i^(q+1)
    g3 = [fq2_mul(g1[i], g2[i]) for i in range(6)]
    return g1, g2, g3


_GAMMA1, _GAMMA2, _GAMMA3 = _gamma_tables()


def fq12_frobenius(a, power=1):
    """a^(P^power) for power in {1, 2, 3}."""
    slots = _to_slots(a)
    if power == 1:
        out = [fq2_mul(fq2_conj(s), _GAMMA1[i]) for i, s in enumerate(slots)]
    elif power == 2:
        out = [fq2_mul(s, _GAMMA2[i]) for i, s in enumerate(slots)]
    elif power == 3:
        out = [fq2_mul(fq2_conj(s), _GAMMA3[i]) for i, s in enumerate(slots)]
    else:
        raise ValueError("unsupported frobenius power")
    return _from_slots(out)
