"""Coefficient rings: exact and finite-precision local arithmetic.

Five kinds share one element protocol. Elements are plain canonical
Python values (ints for p-adic and integer kinds, digit tuples for
t-adic kinds), so the series and polynomial layers never inspect
representations; rings own arithmetic, valuation, unit inversion, and
bulk convolution.

kind        ring                      element encoding
zp          p-adic ints mod p^K       int in [0, p^K)
zmodpk      Z/p^k, Artinian local     int in [0, p^k)
fpt         F_p[[t]] mod t^K          tuple of K digits in [0, p)
z           rational integers         int
fpt_exact   polynomial ring F_p[t]    trimmed digit tuple, () is zero

Convolution of coefficient lists is the single multiplication engine
shared by all series operations. Each ring picks a fast kernel (numpy
convolution while products fit in int64, Kronecker substitution through
big-int multiplication otherwise) and keeps a quadratic reference
implementation for cross-checks.
"""

import numpy as np

from .errors import (
    BadPrecision,
    CompositeModulus,
    NotAUnit,
    ZeroAtPrecision,
    ZeroInput,
)

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin; this witness set is complete for
    every n below 3.3 * 10**24, far past any modulus used here."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# F_2[t] polynomials as bitmasks, bit i = coefficient of t^i. Used as a
# fast internal lane by the resultant and certificate layers.

def b2_deg(a):
    return a.bit_length() - 1


def b2_mul(a, b):
    if a == 0 or b == 0:
        return 0
    # walk the sparser operand
    if a.bit_count() > b.bit_count():
        a, b = b, a
    out = 0
    sh = 0
    while a:
        if a & 1:
            out ^= b << sh
        a >>= 1
        sh += 1
    return out


def b2_divmod(a, b):
    assert b != 0
    db = b2_deg(b)
    q = 0
    while a.bit_length() - 1 >= db and a:
        sh = a.bit_length() - 1 - db
        q |= 1 << sh
        a ^= b << sh
    return q, a


def b2_mod(a, b):
    return b2_divmod(a, b)[1]


def b2_pow_mod(a, e, m):
    r = 1
    a = b2_mod(a, m)
    while e:
        if e & 1:
            r = b2_mod(b2_mul(r, a), m)
        a = b2_mod(b2_mul(a, a), m)
        e >>= 1
    return r


def b2_gcd(a, b):
    while b:
        a, b = b, b2_mod(a, b)
    return a


def mask_from_digits(digits):
    m = 0
    for i, d in enumerate(digits):
        if d:
            m |= 1 << i
    return m


def digits_from_mask(m, width=None):
    n = max(m.bit_length(), 0)
    if width is None:
        width = n
    return tuple((m >> i) & 1 for i in range(width))


# Kronecker substitution kernels. Coefficients are packed into fixed
# width limbs of one big integer so CPython's integer multiplication
# (Karatsuba) does the convolution; limb width is chosen so that no
# output coefficient can overflow into its neighbor.

def _kron_unsigned(a, b, mod):
    bound = (mod - 1) ** 2 * min(len(a), len(b))
    w = bound.bit_length() // 8 + 1
    aint = int.from_bytes(b"".join(x.to_bytes(w, "little") for x in a), "little")
    bint = int.from_bytes(b"".join(x.to_bytes(w, "little") for x in b), "little")
    cint = aint * bint
    n = len(a) + len(b) - 1
    buf = cint.to_bytes(n * w, "little")
    return [int.from_bytes(buf[i * w:(i + 1) * w], "little") % mod for i in range(n)]


def _kron_signed(a, b):
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    n = len(a) + len(b) - 1
    if ma == 0 or mb == 0:
        return [0] * n
    bound = ma * mb * min(len(a), len(b))
    w = bound.bit_length() + 2
    full = 1 << w
    half = full >> 1
    mask = full - 1

    def pack(v):
        pos = 0
        neg = 0
        for i, x in enumerate(v):
            if x > 0:
                pos |= x << (w * i)
            elif x < 0:
                neg |= (-x) << (w * i)
        return pos - neg

    cur = pack(a) * pack(b)
    out = []
    for _ in range(n):
        limb = cur & mask
        if limb >= half:
            limb -= full
        out.append(limb)
        cur = (cur - limb) >> w
    assert cur == 0
    return out


def _pad(coeffs, out_len):
    if len(coeffs) < out_len:
        coeffs = coeffs + [0] * (out_len - len(coeffs))
    return coeffs[:out_len]


class Ring:
    """Shared protocol; concrete kinds override everything that
    touches the element encoding."""

    kind = None
    is_exact = False

    def desc(self):
        return (self.kind, self.p, self.prec)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.desc() == other.desc()

    def __hash__(self):
        return hash(self.desc())

    def __repr__(self):
        return "Ring(%s, p=%s, prec=%s)" % self.desc()

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def from_digits(self, digits):
        raise NotImplementedError(self.kind)

    def uniformizer(self):
        """The element generating the maximal ideal: p for p-adic and
        integer kinds, t for the t-adic kinds."""
        if self.kind in ("fpt", "fpt_exact"):
            return self.from_digits((0, 1))
        if self.p is None:
            raise ValueError("this ring has no designated prime")
        return self.from_int(self.p)

    def pow(self, a, e):
        assert e >= 0
        r = self.one()
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def sum(self, items):
        acc = self.zero()
        for x in items:
            acc = self.add(acc, x)
        return acc

    def convolve_ref(self, a, b, out_len):
        """Quadratic reference convolution; ground truth for the fast
        kernels in property tests."""
        out = [self.zero()] * out_len
        for i, x in enumerate(a):
            if i >= out_len:
                break
            if self.is_zero(x):
                continue
            for j, y in enumerate(b):
                if i + j >= out_len:
                    break
                out[i + j] = self.add(out[i + j], self.mul(x, y))
        return out

    def convolve(self, a, b, out_len):
        return self.convolve_ref(a, b, out_len)


class IntModRing(Ring):
    """Z/p^K with canonical representatives; covers both the p-adic
    finite-precision kind and the Artinian quotient kind (identical
    arithmetic, distinct semantics for precision handling upstream)."""

    def __init__(self, kind, p, prec):
        self.kind = kind
        self.p = p
        self.prec = prec
        self.mod = p ** prec

    def zero(self):
        return 0

    def one(self):
        return 1 % self.mod

    def from_int(self, n):
        return n % self.mod

    def canon(self, r):
        return r % self.mod

    def add(self, a, b):
        return (a + b) % self.mod

    def mul(self, a, b):
        return a * b % self.mod

    def neg(self, a):
        return -a % self.mod

    def is_zero(self, a):
        return a == 0

    def val(self, r):
        if r == 0:
            return None
        v = 0
        while r % self.p == 0:
            r //= self.p
            v += 1
        return v

    def invert_unit(self, r):
        if r % self.p == 0:
            raise NotAUnit("element %d is divisible by %d" % (r, self.p),
                           element=r, p=self.p)
        return pow(r, -1, self.mod)

    def pow(self, a, e):
        return pow(a, e, self.mod)

    def convolve(self, a, b, out_len):
        if not a or not b:
            return [0] * out_len
        n = len(a) + len(b) - 1
        bound = (self.mod - 1) ** 2 * min(len(a), len(b))
        if bound < 2 ** 62:
            arr = np.convolve(np.array(a, dtype=np.int64),
                              np.array(b, dtype=np.int64))
            return _pad([int(x) % self.mod for x in arr], out_len)
        return _pad(_kron_unsigned(a, b, self.mod), out_len)

    def elem_to_json(self, r):
        return str(r)

    def elem_from_json(self, obj):
        return int(obj) % self.mod


class FpTRing(Ring):
    """Truncated power series F_p[[t]] mod t^K; elements are tuples of
    exactly K digits, ascending in t."""

    kind = "fpt"

    def __init__(self, p, prec):
        self.p = p
        self.prec = prec

    def zero(self):
        return (0,) * self.prec

    def one(self):
        one = 1 % self.p
        return (one,) + (0,) * (self.prec - 1)

    def from_int(self, n):
        return (n % self.p,) + (0,) * (self.prec - 1)

    def from_digits(self, digits):
        digits = tuple(d % self.p for d in digits[:self.prec])
        return digits + (0,) * (self.prec - len(digits))

    def canon(self, r):
        return self.from_digits(tuple(r))

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def mul(self, a, b):
        K = self.prec
        arr = np.convolve(np.array(a, dtype=np.int64),
                          np.array(b, dtype=np.int64))[:K]
        out = [int(x) % self.p for x in arr]
        return tuple(out) + (0,) * (K - len(out))

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def is_zero(self, a):
        return not any(a)

    def val(self, r):
        for i, d in enumerate(r):
            if d:
                return i
        return None

    def invert_unit(self, r):
        p, K = self.p, self.prec
        if r[0] % p == 0:
            raise NotAUnit("constant digit is divisible by %d" % p,
                           element=list(r), p=p)
        inv0 = pow(r[0], -1, p)
        out = [inv0] + [0] * (K - 1)
        for k in range(1, K):
            s = sum(r[j] * out[k - j] for j in range(1, k + 1))
            out[k] = -inv0 * s % p
        return tuple(out)

    def convolve(self, a, b, out_len):
        p, K = self.p, self.prec
        if not a or not b:
            return [self.zero()] * out_len
        bound = min(len(a), len(b)) * K * (p - 1) ** 2
        if bound < 2 ** 16:
            dt = "<u2"
            w = 2
        elif bound < 2 ** 32:
            dt = "<u4"
            w = 4
        else:
            return self.convolve_ref(a, b, out_len)
        la, lb = len(a), len(b)
        A = np.zeros((la, 2 * K), dtype=dt)
        A[:, :K] = np.asarray(a, dtype=dt)
        B = np.zeros((lb, 2 * K), dtype=dt)
        B[:, :K] = np.asarray(b, dtype=dt)
        aint = int.from_bytes(A.tobytes(), "little")
        bint = int.from_bytes(B.tobytes(), "little")
        cint = aint * bint
        rows = la + lb - 1
        buf = cint.to_bytes(rows * 2 * K * w, "little")
        C = np.frombuffer(buf, dtype=dt).reshape(rows, 2 * K)
        body = (C[:min(rows, out_len), :K].astype(np.int64) % p)
        out = [tuple(int(x) for x in row) for row in body]
        return out + [self.zero()] * (out_len - len(out))

    def elem_to_json(self, r):
        return [int(d) for d in r]

    def elem_from_json(self, obj):
        return self.from_digits(tuple(int(d) for d in obj))


class ZpRing(IntModRing):
    kind = "zp"

    def __init__(self, p, prec):
        super().__init__("zp", p, prec)


class ZmodPkRing(IntModRing):
    kind = "zmodpk"

    def __init__(self, p, prec):
        super().__init__("zmodpk", p, prec)


class ExactZRing(Ring):
    """Rational integers; p is optional and only enables valuation."""

    kind = "z"
    is_exact = True
    prec = None

    def __init__(self, p=None):
        self.p = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n

    def canon(self, r):
        return r

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a):
        return a == 0

    def val(self, r):
        if r == 0:
            return None
        if self.p is None:
            raise ValueError("valuation needs a prime; this ring has none")
        v = 0
        while r % self.p == 0:
            r //= self.p
            v += 1
        return v

    def invert_unit(self, r):
        # the only integer units
        if r in (1, -1):
            return r
        raise NotAUnit("%d is not an integer unit" % r, element=r)

    def exact_div(self, a, b):
        assert b != 0 and a % b == 0
        return a // b

    def pow(self, a, e):
        return a ** e

    def convolve(self, a, b, out_len):
        if not a or not b:
            return [0] * out_len
        ma = max(abs(x) for x in a)
        mb = max(abs(x) for x in b)
        if ma and mb and ma * mb * min(len(a), len(b)) < 2 ** 62:
            arr = np.convolve(np.array(a, dtype=np.int64),
                              np.array(b, dtype=np.int64))
            return _pad([int(x) for x in arr], out_len)
        return _pad(_kron_signed(a, b), out_len)

    def elem_to_json(self, r):
        return str(r)

    def elem_from_json(self, obj):
        return int(obj)


class ExactFpTRing(Ring):
    """Polynomial ring F_p[t]; elements are trimmed digit tuples and the
    empty tuple is zero. Units are the nonzero constants."""

    kind = "fpt_exact"
    is_exact = True
    prec = None

    def __init__(self, p):
        self.p = p

    def zero(self):
        return ()

    def one(self):
        return (1 % self.p,) if self.p > 1 else ()

    def from_int(self, n):
        n %= self.p
        return (n,) if n else ()

    def from_digits(self, digits):
        out = [d % self.p for d in digits]
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    def canon(self, r):
        return self.from_digits(tuple(r))

    def add(self, a, b):
        p = self.p
        n = max(len(a), len(b))
        out = [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p
               for i in range(n)]
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    def mul(self, a, b):
        if not a or not b:
            return ()
        p = self.p
        if p == 2:
            m = b2_mul(mask_from_digits(a), mask_from_digits(b))
            return digits_from_mask(m)
        arr = np.convolve(np.array(a, dtype=np.int64),
                          np.array(b, dtype=np.int64))
        return self.from_digits([int(x) for x in arr])

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def is_zero(self, a):
        return len(a) == 0

    def val(self, r):
        for i, d in enumerate(r):
            if d:
                return i
        return None

    def deg(self, r):
        return len(r) - 1

    def invert_unit(self, r):
        if len(r) == 1 and r[0] % self.p != 0:
            return (pow(r[0], -1, self.p),)
        raise NotAUnit("only nonzero constants are units in a polynomial ring",
                       element=list(r))

    def divmod(self, a, b):
        assert b
        p = self.p
        a = list(a)
        inv = pow(b[-1], -1, p)
        q = [0] * max(len(a) - len(b) + 1, 0)
        for sh in range(len(a) - len(b), -1, -1):
            c = a[sh + len(b) - 1] * inv % p
            if c:
                q[sh] = c
                for j, y in enumerate(b):
                    a[sh + j] = (a[sh + j] - c * y) % p
        return self.from_digits(q), self.from_digits(a)

    def exact_div(self, a, b):
        q, rem = self.divmod(a, b)
        assert not rem
        return q

    def elem_to_json(self, r):
        return [int(d) for d in r]

    def elem_from_json(self, obj):
        return self.from_digits(tuple(int(d) for d in obj))


_KINDS = ("zp", "fpt", "zmodpk", "z", "fpt_exact")


def make_ring(kind, p=None, prec=None):
    """Build a ring from its descriptor. The base must be prime
    (CompositeModulus otherwise) and finite kinds need prec >= 1
    (BadPrecision otherwise). kind z may omit p, giving plain integers
    with no valuation."""
    if kind not in _KINDS:
        raise ValueError("unknown ring kind %r; expected one of %s"
                         % (kind, ", ".join(_KINDS)))
    if p is not None and not is_prime(p):
        raise CompositeModulus("base %r is not prime" % (p,), p=p)
    if kind == "z":
        if prec is not None:
            raise ValueError("kind z is exact; prec does not apply")
        return ExactZRing(p)
    if p is None:
        raise ValueError("kind %s needs a prime base" % kind)
    if kind == "fpt_exact":
        if prec is not None:
            raise ValueError("kind fpt_exact is exact; prec does not apply")
        return ExactFpTRing(p)
    if prec is None or prec < 1:
        raise BadPrecision("kind %s needs prec >= 1, got %r" % (kind, prec),
                           prec=prec)
    if kind == "zp":
        return ZpRing(p, prec)
    if kind == "zmodpk":
        return ZmodPkRing(p, prec)
    return FpTRing(p, prec)


def val_unit_decompose(ring, r):
    """Split r as pi^v * u with u a unit. Finite kinds refuse the zero
    residue (ZeroAtPrecision): it is indistinguishable from pi^K times
    a unit. Exact kinds refuse exact zero (ZeroInput)."""
    v = ring.val(r)
    if v is None:
        if ring.is_exact:
            raise ZeroInput("cannot decompose exact zero")
        raise ZeroAtPrecision("zero residue has no unit part at precision %d"
                              % ring.prec, prec=ring.prec)
    if isinstance(ring, IntModRing):
        return v, (r // ring.p ** v) % ring.mod
    if isinstance(ring, FpTRing):
        shifted = tuple(r[v:]) + (0,) * v
        return v, shifted
    if isinstance(ring, ExactZRing):
        return v, r // ring.p ** v
    return v, tuple(r[v:])


def invert_unit(ring, r):
    return ring.invert_unit(r)


def valuation_exact(ring, r, at=None):
    """Exact valuation on an exact kind; ZeroInput on zero. For plain
    integers, `at` may supply the prime when the ring carries none."""
    if not ring.is_exact:
        raise ValueError("valuation_exact applies to exact kinds only")
    if ring.is_zero(r):
        raise ZeroInput("exact zero has no finite valuation")
    if at is not None:
        if not is_prime(at):
            raise CompositeModulus("base %r is not prime" % (at,), p=at)
        assert isinstance(ring, ExactZRing)
        v = 0
        while r % at == 0:
            r //= at
            v += 1
        return v
    return ring.val(r)
