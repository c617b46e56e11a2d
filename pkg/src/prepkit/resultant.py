"""Sylvester resultants over exact coefficient rings, with size bounds.

Orientation: with f of degree m and g of degree n, the matrix stacks n
rows of f's descending coefficients over m rows of g's, so that
det = lc(f)^n * product of g over the roots of f.

The resultant dispatches to a fast lane per domain (native integer
Bareiss, carry-less bitmask Bareiss in characteristic 2, an integer lift
when every coefficient is constant in t) with a ring-generic Bareiss
kept as the reference route; tests hold the lanes equal on exhaustive
small-field sweeps.
"""

from dataclasses import dataclass

from .errors import BothConstant, RingMismatch
from .rings import (
    ExactFpTRing,
    ExactZRing,
    Ring,
    b2_divmod,
    b2_mul,
    digits_from_mask,
    mask_from_digits,
)


@dataclass(frozen=True)
class Poly:
    ring: Ring
    coeffs: tuple  # ascending, trimmed; empty tuple is the zero polynomial

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coeff(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.ring.zero()

    def eval(self, x, ring=None):
        """Horner evaluation; an explicit ring reinterprets the
        coefficients (canonical lift) in that ring."""
        R = ring or self.ring
        acc = R.zero()
        for c in reversed(self.coeffs):
            acc = R.add(R.mul(acc, x), R.canon(c))
        return acc


def make_poly(ring, coeffs):
    if not isinstance(ring, (ExactZRing, ExactFpTRing)):
        raise ValueError("polynomials live over exact kinds, got %s"
                         % ring.kind)
    out = [ring.canon(c) for c in coeffs]
    while out and ring.is_zero(out[-1]):
        out.pop()
    return Poly(ring, tuple(out))


def _sdeg(p):
    # Sylvester rank: zero and constants both occupy a single cell
    return max(p.degree, 0)


def sylvester_matrix(f, g):
    """Sylvester matrix as a list of rows of ring elements."""
    if f.ring != g.ring:
        raise RingMismatch("polynomial rings differ: %r vs %r"
                           % (f.ring, g.ring))
    ring = f.ring
    m, n = _sdeg(f), _sdeg(g)
    if m == 0 and n == 0:
        raise BothConstant("both polynomials are constant")
    fd = [f.coeff(m - i) for i in range(m + 1)]
    gd = [g.coeff(n - i) for i in range(n + 1)]
    size = m + n
    z = ring.zero()
    rows = []
    for i in range(n):
        rows.append([z] * i + fd + [z] * (size - i - m - 1))
    for i in range(m):
        rows.append([z] * i + gd + [z] * (size - i - n - 1))
    return rows


def _det_cofactor(ring, mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    acc = ring.zero()
    for j in range(n):
        if ring.is_zero(mat[0][j]):
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = ring.mul(mat[0][j], _det_cofactor(ring, minor))
        acc = ring.add(acc, term) if j % 2 == 0 else ring.sub(acc, term)
    return acc


def _bareiss_ring(ring, mat):
    m = [row[:] for row in mat]
    size = len(m)
    neg = False
    prev = ring.one()
    for k in range(size - 1):
        if ring.is_zero(m[k][k]):
            swap = next((i for i in range(k + 1, size)
                         if not ring.is_zero(m[i][k])), None)
            if swap is None:
                return ring.zero()
            m[k], m[swap] = m[swap], m[k]
            neg = not neg
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = ring.sub(ring.mul(m[i][j], m[k][k]),
                               ring.mul(m[i][k], m[k][j]))
                m[i][j] = ring.exact_div(num, prev)
            m[i][k] = ring.zero()
        prev = m[k][k]
    out = m[size - 1][size - 1]
    return ring.neg(out) if neg else out


def _bareiss_masks(mat):
    # characteristic 2: signs vanish, products are carry-less
    m = [row[:] for row in mat]
    size = len(m)
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = b2_mul(m[i][j], m[k][k]) ^ b2_mul(m[i][k], m[k][j])
                q, rem = b2_divmod(num, prev)
                assert rem == 0
                m[i][j] = q
            m[i][k] = 0
        prev = m[k][k]
    return m[size - 1][size - 1]


def _bareiss_int(mat):
    m = [row[:] for row in mat]
    size = len(m)
    sign = 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[size - 1][size - 1]


def resultant_generic(f, g):
    """Reference route: ring-generic fraction-free elimination."""
    return _bareiss_ring(f.ring, sylvester_matrix(f, g))


def resultant(f, g):
    """Resultant with per-domain fast lanes; equal to the generic
    route everywhere."""
    mat = sylvester_matrix(f, g)
    ring = f.ring
    if len(mat) <= 4:
        return _det_cofactor(ring, mat)
    if isinstance(ring, ExactZRing):
        return _bareiss_int(mat)
    if ring.p == 2:
        masks = [[mask_from_digits(c) for c in row] for row in mat]
        return digits_from_mask(_bareiss_masks(masks))
    if all(len(c) <= 1 for row in mat for c in row):
        ints = [[(c[0] if c else 0) for c in row] for row in mat]
        return ring.from_int(_bareiss_int(ints))
    return _bareiss_ring(ring, mat)


@dataclass(frozen=True)
class BoundReport:
    which: str
    B: object
    lhs: int
    rhs: int
    bound_ok: bool


def hadamard_check(f, g):
    """Hadamard size bound over the integers:
    B^2 <= (sum f_i^2)^(deg g) * (sum g_i^2)^(deg f)."""
    if not isinstance(f.ring, ExactZRing):
        raise ValueError("the Hadamard bound applies over the integers")
    B = resultant(f, g)
    sf = sum(c * c for c in f.coeffs)
    sg = sum(c * c for c in g.coeffs)
    lhs = B * B
    rhs = sf ** _sdeg(g) * sg ** _sdeg(f)
    return BoundReport("hadamard", B, lhs, rhs, lhs <= rhs)


def _tdeg(c):
    return len(c) - 1


def tdegree_check(f, g, H=None, A=None):
    """t-degree bound over F_p[t]:
    deg_t(Res) <= H * deg(g) + A * deg(f), with H and A defaulting to
    the largest coefficient t-degrees of f and g."""
    if not isinstance(f.ring, ExactFpTRing):
        raise ValueError("the t-degree bound applies over a polynomial ring")
    if H is None:
        H = max((_tdeg(c) for c in f.coeffs if c), default=0)
    if A is None:
        A = max((_tdeg(c) for c in g.coeffs if c), default=0)
    B = resultant(f, g)
    lhs = _tdeg(B) if B else -1
    rhs = H * _sdeg(g) + A * _sdeg(f)
    return BoundReport("tdegree", B, lhs, rhs, lhs <= rhs)
