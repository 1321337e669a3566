"""BLS12-381 pairing arithmetic, self-contained.

Implements just enough of the curve for threshold signatures: the
Fp2/Fp6/Fp12 tower, affine/Jacobian group arithmetic on G1 and G2, the
optimal ate pairing, standard compressed point encodings (48-byte G1,
96-byte G2), and a hash-to-G1 map.  Field elements are plain ints and
tuples rather than classes: a pairing is ~10^4 field multiplications
and attribute dispatch would dominate the runtime.

Signatures live in G1 (small) and public keys in G2, so the pairing
checks here take (G1 point, G2 point) pairs.
"""
from __future__ import annotations

import hashlib

# Base field, scalar field, |x| for the curve parameter (which is -x),
# and the G1 cofactor.
P = 0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB
R = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001
ATE_LOOP = 0xD201000000010000
G1_COFACTOR = 0x396C8C005555E1568C00AAAB0000AAAB

B_COEFF = 4

G1_GEN = (
    0x17F1D3A73197D7942695638C4FA9AC0FC3688C4F9774B905A14E3A3F171BAC586C55E83FF97A1AEFFB3AF00ADB22C6BB,
    0x08B3F481E3AAA0F1A09E30ED741D8AE4FCF5E095D5D00AF600DB18CB2C04B3EDD03CC744A2888AE40CAA232946C5E7E1,
)
G2_GEN = (
    (
        0x024AA2B2F08F0A91260805272DC51051C6E47AD4FA403B02B4510B647AE3D1770BAC0326A805BBEFD48056C8C121BDB8,
        0x13E02B6052719F607DACD3A088274F65596BD0D09920B61AB5DA61BBDC7F5049334CF11213945D57E5AC7D055D042B7E,
    ),
    (
        0x0CE5D527727D6E118CC9CDC6DA2E351AADFD9BAA8CBDD3A76D429A695160D12C923AC9CC3BACA289E193548608B82801,
        0x0606C4A02EA734CC32ACD2B02BC28B99CB3E287E85A763AF267492AB572E99AB3F370D275CEC1DA1AAA9075FF05F79BE,
    ),
)

# ---------------------------------------------------------------- Fp2
# Fp2 = Fp[u] / (u^2 + 1); elements are (a, b) for a + b*u.

F2_ZERO = (0, 0)
F2_ONE = (1, 0)


def f2_add(x, y):
    return (x[0] + y[0]) % P, (x[1] + y[1]) % P


def f2_sub(x, y):
    return (x[0] - y[0]) % P, (x[1] - y[1]) % P


def f2_neg(x):
    return (-x[0]) % P, (-x[1]) % P


def f2_mul(x, y):
    a, b = x
    c, d = y
    ac = a * c
    bd = b * d
    return (ac - bd) % P, ((a + b) * (c + d) - ac - bd) % P


def f2_sqr(x):
    a, b = x
    return (a + b) * (a - b) % P, 2 * a * b % P


def f2_inv(x):
    a, b = x
    norm_inv = pow(a * a + b * b, -1, P)
    return a * norm_inv % P, -b * norm_inv % P


def f2_mul_xi(x):
    # multiply by xi = 1 + u, the Fp6 non-residue
    a, b = x
    return (a - b) % P, (a + b) % P


def f2_pow(x, e: int):
    result = F2_ONE
    base = x
    while e:
        if e & 1:
            result = f2_mul(result, base)
        base = f2_sqr(base)
        e >>= 1
    return result


# ---------------------------------------------------------------- Fp6
# Fp6 = Fp2[v] / (v^3 - xi); elements are (c0, c1, c2).

F6_ZERO = (F2_ZERO, F2_ZERO, F2_ZERO)
F6_ONE = (F2_ONE, F2_ZERO, F2_ZERO)


def f6_add(x, y):
    return f2_add(x[0], y[0]), f2_add(x[1], y[1]), f2_add(x[2], y[2])


def f6_sub(x, y):
    return f2_sub(x[0], y[0]), f2_sub(x[1], y[1]), f2_sub(x[2], y[2])


def f6_neg(x):
    return f2_neg(x[0]), f2_neg(x[1]), f2_neg(x[2])


def f6_mul(x, y):
    a0, a1, a2 = x
    b0, b1, b2 = y
    t0 = f2_mul(a0, b0)
    t1 = f2_mul(a1, b1)
    t2 = f2_mul(a2, b2)
    c0 = f2_add(
        t0,
        f2_mul_xi(f2_sub(f2_mul(f2_add(a1, a2), f2_add(b1, b2)), f2_add(t1, t2))),
    )
    c1 = f2_add(
        f2_sub(f2_mul(f2_add(a0, a1), f2_add(b0, b1)), f2_add(t0, t1)), f2_mul_xi(t2)
    )
    c2 = f2_add(f2_sub(f2_mul(f2_add(a0, a2), f2_add(b0, b2)), f2_add(t0, t2)), t1)
    return c0, c1, c2


def f6_mul_by_v(x):
    return f2_mul_xi(x[2]), x[0], x[1]


def f6_inv(x):
    a0, a1, a2 = x
    c0 = f2_sub(f2_sqr(a0), f2_mul_xi(f2_mul(a1, a2)))
    c1 = f2_sub(f2_mul_xi(f2_sqr(a2)), f2_mul(a0, a1))
    c2 = f2_sub(f2_sqr(a1), f2_mul(a0, a2))
    t = f2_add(
        f2_mul(a0, c0),
        f2_mul_xi(f2_add(f2_mul(a2, c1), f2_mul(a1, c2))),
    )
    t_inv = f2_inv(t)
    return f2_mul(c0, t_inv), f2_mul(c1, t_inv), f2_mul(c2, t_inv)


# --------------------------------------------------------------- Fp12
# Fp12 = Fp6[w] / (w^2 - v); elements are (a, b) for a + b*w.

F12_ONE = (F6_ONE, F6_ZERO)


def f12_mul(x, y):
    a, b = x
    c, d = y
    ac = f6_mul(a, c)
    bd = f6_mul(b, d)
    mid = f6_sub(f6_sub(f6_mul(f6_add(a, b), f6_add(c, d)), ac), bd)
    return f6_add(ac, f6_mul_by_v(bd)), mid


def f12_sqr(x):
    a, b = x
    ab = f6_mul(a, b)
    c0 = f6_sub(
        f6_sub(f6_mul(f6_add(a, b), f6_add(a, f6_mul_by_v(b))), ab), f6_mul_by_v(ab)
    )
    return c0, f6_add(ab, ab)


def f12_sub(x, y):
    return f6_sub(x[0], y[0]), f6_sub(x[1], y[1])


def f12_conj(x):
    return x[0], f6_neg(x[1])


def f12_inv(x):
    a, b = x
    t = f6_inv(f6_sub(f6_mul(a, a), f6_mul_by_v(f6_mul(b, b))))
    return f6_mul(a, t), f6_neg(f6_mul(b, t))


def f12_pow(x, e: int):
    result = F12_ONE
    base = x
    while e:
        if e & 1:
            result = f12_mul(result, base)
        base = f12_sqr(base)
        e >>= 1
    return result


# Frobenius^2 coefficients: Fp2 coefficients are fixed by x -> x^(p^2);
# the basis elements v and w pick up roots of unity computed once here.
_XI = (1, 1)
_GAMMA_V = f2_pow(_XI, (P * P - 1) // 3)
_GAMMA_V2 = f2_sqr(_GAMMA_V)
_GAMMA_W = f2_pow(_XI, (P * P - 1) // 6)


def f12_frob2(x):
    (a0, a1, a2), (b0, b1, b2) = x
    top = (a0, f2_mul(a1, _GAMMA_V), f2_mul(a2, _GAMMA_V2))
    bot = (
        f2_mul(b0, _GAMMA_W),
        f2_mul(f2_mul(b1, _GAMMA_V), _GAMMA_W),
        f2_mul(f2_mul(b2, _GAMMA_V2), _GAMMA_W),
    )
    return top, bot


# ------------------------------------------------------- group arithmetic
# Affine points are (x, y); None is the point at infinity.  Scalar
# multiplication runs in Jacobian coordinates so only the final
# normalization pays for a field inversion.


class _FieldOps:
    def __init__(self, sqr, mul, add, sub, neg, inv, zero, one):
        self.sqr, self.mul, self.add, self.sub = sqr, mul, add, sub
        self.neg, self.inv, self.zero, self.one = neg, inv, zero, one

    def scale8(self, v):
        t = self.add(v, v)
        t = self.add(t, t)
        return self.add(t, t)


_FP_OPS = _FieldOps(
    sqr=lambda a: a * a % P,
    mul=lambda a, b: a * b % P,
    add=lambda a, b: (a + b) % P,
    sub=lambda a, b: (a - b) % P,
    neg=lambda a: (-a) % P,
    inv=lambda a: pow(a, -1, P),
    zero=0,
    one=1,
)
_FP2_OPS = _FieldOps(
    sqr=f2_sqr, mul=f2_mul, add=f2_add, sub=f2_sub, neg=f2_neg, inv=f2_inv,
    zero=F2_ZERO, one=F2_ONE,
)


def _point_double(p, ops):
    x, y, z = p
    a = ops.sqr(x)
    b = ops.sqr(y)
    c = ops.sqr(b)
    d = ops.sub(ops.sqr(ops.add(x, b)), ops.add(a, c))
    d = ops.add(d, d)
    e = ops.add(ops.add(a, a), a)
    x3 = ops.sub(ops.sqr(e), ops.add(d, d))
    y3 = ops.sub(ops.mul(e, ops.sub(d, x3)), ops.scale8(c))
    z3 = ops.mul(ops.add(y, y), z)
    return x3, y3, z3


def _point_add(p, q, ops):
    x1, y1, z1 = p
    x2, y2, z2 = q
    if z1 == ops.zero:
        return q
    if z2 == ops.zero:
        return p
    z1s = ops.sqr(z1)
    z2s = ops.sqr(z2)
    u1 = ops.mul(x1, z2s)
    u2 = ops.mul(x2, z1s)
    s1 = ops.mul(ops.mul(y1, z2), z2s)
    s2 = ops.mul(ops.mul(y2, z1), z1s)
    if u1 == u2:
        if s1 != s2:
            return ops.one, ops.one, ops.zero
        return _point_double(p, ops)
    h = ops.sub(u2, u1)
    hh = ops.sqr(h)
    i = ops.add(ops.add(hh, hh), ops.add(hh, hh))
    j = ops.mul(h, i)
    r = ops.sub(s2, s1)
    r = ops.add(r, r)
    v = ops.mul(u1, i)
    x3 = ops.sub(ops.sub(ops.sqr(r), j), ops.add(v, v))
    y3 = ops.sub(ops.mul(r, ops.sub(v, x3)), ops.mul(ops.add(s1, s1), j))
    z3 = ops.mul(ops.mul(z1, z2), h)
    z3 = ops.add(z3, z3)
    return x3, y3, z3


def _scalar_mul(affine, k: int, ops):
    # no reduction mod R here: multiplying by R is exactly how subgroup
    # membership is checked, and points off the subgroup have other orders
    if affine is None or k == 0:
        return None
    if k < 0:
        raise ValueError("scalar must be non-negative")
    acc = (ops.one, ops.one, ops.zero)
    base = (affine[0], affine[1], ops.one)
    for bit in bin(k)[2:]:
        acc = _point_double(acc, ops)
        if bit == "1":
            acc = _point_add(acc, base, ops)
    if acc[2] == ops.zero:
        return None
    z_inv = ops.inv(acc[2])
    z_inv2 = ops.sqr(z_inv)
    return ops.mul(acc[0], z_inv2), ops.mul(acc[1], ops.mul(z_inv2, z_inv))


def _affine_add(p, q, ops):
    if p is None:
        return q
    if q is None:
        return p
    x1, y1 = p
    x2, y2 = q
    if x1 == x2:
        if ops.add(y1, y2) == ops.zero:
            return None
        xx = ops.sqr(x1)
        m = ops.mul(ops.add(ops.add(xx, xx), xx), ops.inv(ops.add(y1, y1)))
    else:
        m = ops.mul(ops.sub(y2, y1), ops.inv(ops.sub(x2, x1)))
    x3 = ops.sub(ops.sub(ops.sqr(m), x1), x2)
    y3 = ops.sub(ops.mul(m, ops.sub(x1, x3)), y1)
    return x3, y3


def g1_mul(p, k: int):
    return _scalar_mul(p, k, _FP_OPS)


def g1_add(p, q):
    return _affine_add(p, q, _FP_OPS)


def g1_neg(p):
    return None if p is None else (p[0], (-p[1]) % P)


def g2_mul(p, k: int):
    return _scalar_mul(p, k, _FP2_OPS)


def g2_add(p, q):
    return _affine_add(p, q, _FP2_OPS)


def g2_neg(p):
    return None if p is None else (p[0], f2_neg(p[1]))


def g1_on_curve(p) -> bool:
    if p is None:
        return True
    x, y = p
    return y * y % P == (x * x * x + B_COEFF) % P


def g2_on_curve(p) -> bool:
    if p is None:
        return True
    x, y = p
    rhs = f2_add(f2_mul(f2_sqr(x), x), f2_mul_xi((B_COEFF, 0)))  # b' = 4(1+u)
    return f2_sqr(y) == rhs


def g1_in_subgroup(p) -> bool:
    return g1_on_curve(p) and g1_mul(p, R) is None


def g2_in_subgroup(p) -> bool:
    return g2_on_curve(p) and g2_mul(p, R) is None


# ----------------------------------------------------------------- pairing
# G2 points are untwisted into E(Fp12) and the Miller loop runs with affine
# line functions there; slower than a sparse-line tower but direct to audit.


def _f12_embed_f2(z):
    return ((z, F2_ZERO, F2_ZERO), F6_ZERO)


def _f12_embed_int(n: int):
    return _f12_embed_f2((n % P, 0))


_W2 = ((F2_ZERO, F2_ONE, F2_ZERO), F6_ZERO)  # w^2 = v
_W3 = (F6_ZERO, (F2_ZERO, F2_ONE, F2_ZERO))  # w^3 = v*w
_W2_INV = f12_inv(_W2)
_W3_INV = f12_inv(_W3)

_THREE = _f12_embed_int(3)
_TWO = _f12_embed_int(2)


def _untwist(q):
    x, y = q
    return f12_mul(_f12_embed_f2(x), _W2_INV), f12_mul(_f12_embed_f2(y), _W3_INV)


def _miller_loop(q12, p12):
    xp, yp = p12
    xq, yq = q12
    rx, ry = xq, yq
    f = F12_ONE
    for bit in bin(ATE_LOOP)[3:]:
        m = f12_mul(f12_mul(f12_sqr(rx), _THREE), f12_inv(f12_mul(ry, _TWO)))
        line = f12_sub(f12_mul(m, f12_sub(xp, rx)), f12_sub(yp, ry))
        f = f12_mul(f12_sqr(f), line)
        new_rx = f12_sub(f12_mul(m, m), f12_mul(rx, _TWO))
        new_ry = f12_sub(f12_mul(m, f12_sub(rx, new_rx)), ry)
        rx, ry = new_rx, new_ry
        if bit == "1":
            if rx == xq:
                # vertical line; unreachable for subgroup inputs mid-loop,
                # and a wrong f only makes verification fail closed
                f = f12_mul(f, f12_sub(xp, rx))
                continue
            m = f12_mul(f12_sub(yq, ry), f12_inv(f12_sub(xq, rx)))
            line = f12_sub(f12_mul(m, f12_sub(xp, rx)), f12_sub(yp, ry))
            f = f12_mul(f, line)
            new_rx = f12_sub(f12_sub(f12_mul(m, m), rx), xq)
            new_ry = f12_sub(f12_mul(m, f12_sub(rx, new_rx)), ry)
            rx, ry = new_rx, new_ry
    return f12_conj(f)  # the curve parameter is negative


_HARD_EXP = (P**4 - P**2 + 1) // R


def _final_exponentiation(f):
    g = f12_mul(f12_conj(f), f12_inv(f))  # ^(p^6 - 1)
    g = f12_mul(f12_frob2(g), g)          # ^(p^2 + 1)
    return f12_pow(g, _HARD_EXP)


def pairing(p1, q2):
    """e(P, Q) for P in G1, Q in G2, as an Fp12 element."""
    if p1 is None or q2 is None:
        return F12_ONE
    p12 = (_f12_embed_int(p1[0]), _f12_embed_int(p1[1]))
    return _final_exponentiation(_miller_loop(_untwist(q2), p12))


def pairing_product_is_one(pairs) -> bool:
    """True iff the product of e(P_i, Q_i) equals one.

    Shares one final exponentiation across all Miller loops; this halves
    the cost of the usual two-pairing signature check.
    """
    f = F12_ONE
    for p1, q2 in pairs:
        if p1 is None or q2 is None:
            continue
        p12 = (_f12_embed_int(p1[0]), _f12_embed_int(p1[1]))
        f = f12_mul(f, _miller_loop(_untwist(q2), p12))
    return _final_exponentiation(f) == F12_ONE


# ----------------------------------------------------------- serialization
# Standard compressed encodings: big-endian x with three flag bits in the
# top byte (compressed, infinity, lexicographically-larger y).

_HALF_P = (P - 1) // 2


class PointDecodeError(ValueError):
    pass


def compress_g1(p) -> bytes:
    if p is None:
        return bytes([0xC0]) + b"\x00" * 47
    x, y = p
    flags = 0x80 | (0x20 if y > _HALF_P else 0)
    raw = x.to_bytes(48, "big")
    return bytes([raw[0] | flags]) + raw[1:]


def decompress_g1(blob: bytes):
    if len(blob) != 48:
        raise PointDecodeError("G1 encoding must be 48 bytes")
    flags = blob[0]
    if not flags & 0x80:
        raise PointDecodeError("uncompressed G1 encoding not supported")
    if flags & 0x40:
        if flags != 0xC0 or any(blob[1:]):
            raise PointDecodeError("malformed G1 infinity encoding")
        return None
    x = int.from_bytes(bytes([flags & 0x1F]) + blob[1:], "big")
    if x >= P:
        raise PointDecodeError("G1 x out of range")
    rhs = (x * x * x + B_COEFF) % P
    y = pow(rhs, (P + 1) // 4, P)
    if y * y % P != rhs:
        raise PointDecodeError("G1 x not on curve")
    if (y > _HALF_P) != bool(flags & 0x20):
        y = P - y
    point = (x, y)
    if not g1_in_subgroup(point):
        raise PointDecodeError("G1 point not in the prime-order subgroup")
    return point


def _y_lex_larger(y) -> bool:
    y0, y1 = y
    return y1 > _HALF_P or (y1 == 0 and y0 > _HALF_P)


def compress_g2(q) -> bytes:
    if q is None:
        return bytes([0xC0]) + b"\x00" * 95
    (x0, x1), y = q
    flags = 0x80 | (0x20 if _y_lex_larger(y) else 0)
    raw = x1.to_bytes(48, "big")
    return bytes([raw[0] | flags]) + raw[1:] + x0.to_bytes(48, "big")


def _f2_sqrt(a):
    """Square root in Fp2 via the norm map; None when a is a non-residue."""
    a0, a1 = a
    if a1 == 0:
        root = pow(a0, (P + 1) // 4, P)
        if root * root % P == a0 % P:
            return (root, 0)
        root = pow((-a0) % P, (P + 1) // 4, P)
        if (-(root * root)) % P == a0 % P:
            return (0, root)
        return None
    norm = (a0 * a0 + a1 * a1) % P
    d = pow(norm, (P + 1) // 4, P)
    if d * d % P != norm:
        return None
    half_inv = pow(2, -1, P)
    for signed_d in (d, P - d):
        half = (a0 + signed_d) * half_inv % P
        x0 = pow(half, (P + 1) // 4, P)
        if x0 * x0 % P != half or x0 == 0:
            continue
        x1 = a1 * pow(2 * x0, -1, P) % P
        if f2_sqr((x0, x1)) == (a0 % P, a1 % P):
            return (x0, x1)
    return None


def decompress_g2(blob: bytes):
    if len(blob) != 96:
        raise PointDecodeError("G2 encoding must be 96 bytes")
    flags = blob[0]
    if not flags & 0x80:
        raise PointDecodeError("uncompressed G2 encoding not supported")
    if flags & 0x40:
        if flags != 0xC0 or any(blob[1:]):
            raise PointDecodeError("malformed G2 infinity encoding")
        return None
    x1 = int.from_bytes(bytes([flags & 0x1F]) + blob[1:48], "big")
    x0 = int.from_bytes(blob[48:], "big")
    if x0 >= P or x1 >= P:
        raise PointDecodeError("G2 x out of range")
    x = (x0, x1)
    rhs = f2_add(f2_mul(f2_sqr(x), x), f2_mul_xi((B_COEFF, 0)))
    y = _f2_sqrt(rhs)
    if y is None:
        raise PointDecodeError("G2 x not on curve")
    if _y_lex_larger(y) != bool(flags & 0x20):
        y = f2_neg(y)
    point = (x, y)
    if not g2_in_subgroup(point):
        raise PointDecodeError("G2 point not in the prime-order subgroup")
    return point


# ------------------------------------------------------------ hash to G1


def hash_to_g1(message: bytes, domain: bytes = b"ACCEPT-BLS-G1"):
    """Try-and-increment hash onto the G1 subgroup.

    Not constant time, which is fine here: every signed message is public
    protocol data.  Cofactor multiplication moves the curve point into the
    prime-order subgroup.
    """
    counter = 0
    while True:
        seed = hashlib.sha256(domain + counter.to_bytes(4, "little") + message).digest()
        x = int.from_bytes(seed, "big") % P
        rhs = (x * x * x + B_COEFF) % P
        y = pow(rhs, (P + 1) // 4, P)
        if y * y % P == rhs:
            point = g1_mul((x, min(y, P - y)), G1_COFACTOR)
            if point is not None:
                return point
        counter += 1
