"""Truncated power series over a coefficient ring.

A Series is an immutable window of x_prec coefficients. An OracleSeries
wraps a deterministic coefficient rule and materializes windows on
demand; memoization is append-only, so concurrent readers are safe.

Operations: add, sub, mul, unit inversion, composition, compositional
inverse, evaluation at a small point, and two rationality detectors
(eventual 0/1 periodicity and linear recurrence over a fraction field).
"""

import threading
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadNormalization,
    InsufficientXPrecision,
    NonBinaryCoefficient,
    NonzeroConstantInner,
    NotAUnitSeries,
    PointNotSmall,
    RingMismatch,
    WindowTooSmall,
)
from .rings import ExactFpTRing, ExactZRing, IntModRing, Ring


@dataclass(frozen=True)
class Series:
    ring: Ring
    x_prec: int
    coeffs: tuple

    def __post_init__(self):
        assert self.x_prec >= 1
        assert len(self.coeffs) == self.x_prec

    def coeff(self, n):
        return self.coeffs[n]

    def window(self, m):
        if m > self.x_prec:
            raise InsufficientXPrecision(
                "window %d exceeds stored precision %d" % (m, self.x_prec),
                needed=m, have=self.x_prec)
        return list(self.coeffs[:m])

    def truncate(self, m):
        return Series(self.ring, m, tuple(self.window(m)))


def make_series(ring, coeffs, x_prec=None):
    """Canonicalize and zero-pad coeffs into a Series window."""
    coeffs = [ring.canon(c) for c in coeffs]
    if x_prec is None:
        x_prec = len(coeffs)
    if len(coeffs) > x_prec:
        raise ValueError("got %d coefficients for a window of %d"
                         % (len(coeffs), x_prec))
    coeffs = coeffs + [ring.zero()] * (x_prec - len(coeffs))
    return Series(ring, x_prec, tuple(coeffs))


class OracleSeries:
    """Series given by a deterministic coefficient rule, cached."""

    def __init__(self, ring, fn, x_prec):
        self.ring = ring
        self.fn = fn
        self.x_prec = x_prec
        self._memo = {}
        self._lock = threading.Lock()

    def coeff(self, n):
        if not 0 <= n < self.x_prec:
            raise InsufficientXPrecision(
                "index %d outside oracle window %d" % (n, self.x_prec),
                needed=n + 1, have=self.x_prec)
        memo = self._memo
        if n in memo:
            return memo[n]
        v = self.ring.canon(self.fn(n))
        with self._lock:
            memo[n] = v
        return v

    def window(self, m):
        return [self.coeff(i) for i in range(m)]

    def materialize(self, m):
        return Series(self.ring, m, tuple(self.window(m)))


def _common(f, g):
    if f.ring != g.ring:
        raise RingMismatch("operand rings differ: %r vs %r" % (f.ring, g.ring))
    return f.ring, min(f.x_prec, g.x_prec)


def series_add(f, g):
    ring, m = _common(f, g)
    return Series(ring, m, tuple(ring.add(a, b)
                                 for a, b in zip(f.coeffs[:m], g.coeffs[:m])))


def series_sub(f, g):
    ring, m = _common(f, g)
    return Series(ring, m, tuple(ring.sub(a, b)
                                 for a, b in zip(f.coeffs[:m], g.coeffs[:m])))


def series_mul(f, g):
    """Product on the smaller of the two windows."""
    ring, m = _common(f, g)
    out = ring.convolve(list(f.coeffs[:m]), list(g.coeffs[:m]), m)
    return Series(ring, m, tuple(out))


def series_invert(f):
    """Multiplicative inverse by Newton doubling; the constant term
    must be a unit (NotAUnitSeries otherwise)."""
    ring = f.ring
    try:
        inv0 = ring.invert_unit(f.coeffs[0])
    except Exception as ex:
        raise NotAUnitSeries("constant term is not a unit") from ex
    m = f.x_prec
    g = [inv0]
    win = 1
    while win < m:
        win = min(2 * win, m)
        # g <- g * (2 - f * g) at the doubled window
        fg = ring.convolve(list(f.coeffs[:win]), g, win)
        two_minus = [ring.sub(ring.zero(), c) for c in fg]
        two_minus[0] = ring.add(two_minus[0], ring.add(ring.one(), ring.one()))
        g = ring.convolve(g, two_minus, win)
    return Series(ring, m, tuple(g))


def compose(f, g):
    """f(g(x)); g must have zero constant term."""
    ring, m = _common(f, g)
    if not ring.is_zero(g.coeffs[0]):
        raise NonzeroConstantInner("inner series has nonzero constant term")
    gcut = list(g.coeffs[:m])
    acc = [ring.zero()] * m
    for k in range(m - 1, -1, -1):
        acc = ring.convolve(acc, gcut, m)
        acc[0] = ring.add(acc[0], f.coeffs[k])
    return Series(ring, m, tuple(acc))


def comp_inverse(f):
    """Compositional inverse of f = x + higher order terms, by the
    triangular relation g_n = -sum_{k<n} g_k [x^n] f^k."""
    ring = f.ring
    m = f.x_prec
    if not ring.is_zero(f.coeffs[0]):
        raise BadNormalization("constant term must be zero")
    if m < 2 or f.coeffs[1] != ring.one():
        raise BadNormalization("linear coefficient must be one")
    fc = list(f.coeffs)
    powers = [None, fc]
    for k in range(2, m):
        powers.append(ring.convolve(powers[-1], fc, m))
    g = [ring.zero(), ring.one()]
    for n in range(2, m):
        s = ring.sum(ring.mul(g[k], powers[k][n]) for k in range(1, n))
        g.append(ring.neg(s))
    return Series(ring, m, tuple(g))


def comp_inverse_newton(f):
    """Same contract as comp_inverse via window-doubling Newton steps;
    kept as an independent route for uniqueness checks."""
    ring = f.ring
    m = f.x_prec
    if not ring.is_zero(f.coeffs[0]):
        raise BadNormalization("constant term must be zero")
    if m < 2 or f.coeffs[1] != ring.one():
        raise BadNormalization("linear coefficient must be one")
    fprime = [ring.mul(ring.from_int(k), f.coeffs[k]) for k in range(1, m)]
    g = [ring.zero(), ring.one()]
    win = 2
    while win < m:
        win = min(2 * win, m)
        gs = Series(ring, win, tuple(g + [ring.zero()] * (win - len(g))))
        err = series_sub(compose(f.truncate(win), gs), _identity(ring, win))
        dfg = compose(Series(ring, win, tuple(fprime[:win - 1]) + (ring.zero(),)), gs)
        step = series_mul(err, series_invert(dfg))
        g = [ring.sub(a, b) for a, b in zip(gs.coeffs, step.coeffs)]
    return Series(ring, m, tuple(g))


def _identity(ring, m):
    c = [ring.zero()] * m
    if m > 1:
        c[1] = ring.one()
    return Series(ring, m, tuple(c))


def evaluate(f, a, target_val_prec):
    """Evaluate f at a point of positive valuation. The result is a
    ring element correct modulo pi^target_val_prec; the window must
    reach the first index whose tail is provably that small."""
    ring = f.ring
    target = target_val_prec
    if ring.prec is None:
        raise ValueError("evaluation needs a finite-precision coefficient ring")
    if target < 1 or ring.prec < target:
        raise ValueError("target precision %r outside ring precision %d"
                         % (target, ring.prec))
    a = ring.canon(a)
    va = ring.val(a)
    if va == 0:
        raise PointNotSmall("evaluation point is a unit; need val >= 1")
    if va is None:
        i_star = 1
    else:
        i_star = -(-target // va)
    if i_star > f.x_prec:
        raise InsufficientXPrecision(
            "need %d coefficients, window has %d" % (i_star, f.x_prec),
            needed=i_star, have=f.x_prec)
    prefix = f.window(i_star)
    acc = ring.zero()
    for c in reversed(prefix):
        acc = ring.add(ring.mul(acc, a), c)
    return acc


@dataclass(frozen=True)
class RationalityVerdict:
    kind: str  # "rational" | "irrational_at_budget"
    d: int = None
    s: int = None
    q: tuple = None
    budget: int = None

    @property
    def is_rational(self):
        return self.kind == "rational"


def _binary_values(source, budget):
    if hasattr(source, "coeff"):
        ring = source.ring
        raw = [source.coeff(i) for i in range(budget)]
        out = []
        for i, v in enumerate(raw):
            if ring.is_zero(v):
                out.append(0)
            elif v == ring.one():
                out.append(1)
            else:
                raise NonBinaryCoefficient("coefficient %d is not 0 or 1" % i,
                                           index=i)
        return out
    vals = [source(i) if callable(source) else source[i] for i in range(budget)]
    for i, v in enumerate(vals):
        if v not in (0, 1):
            raise NonBinaryCoefficient("coefficient %d is not 0 or 1" % i,
                                       index=i)
    return list(vals)


def detect_periodic_01(source, budget):
    """Least (d, s) in lexicographic order such that the 0/1 sequence
    is d-periodic from index s, with s + 2d <= budget; the witness is
    q = 1 - x^d. No such pair means irrational at this budget."""
    if budget < 4:
        raise ValueError("budget must be at least 4, got %r" % (budget,))
    vals = _binary_values(source, budget)
    for d in range(1, budget // 2 + 1):
        for s in range(0, budget - 2 * d + 1):
            if all(vals[i] == vals[i + d] for i in range(s, budget - d)):
                q = (1,) + (0,) * (d - 1) + (-1,)
                return RationalityVerdict("rational", d=d, s=s, q=q,
                                          budget=budget)
    return RationalityVerdict("irrational_at_budget", budget=budget)


class _PrimeField:
    def __init__(self, p):
        self.p = p

    def zero(self):
        return 0

    def is_zero(self, a):
        return a == 0

    def mul(self, a, b):
        return a * b % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def lift(self, ring, c):
        return c % self.p


class _FractionField:
    def zero(self):
        return Fraction(0)

    def is_zero(self, a):
        return a == 0

    def mul(self, a, b):
        return a * b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def inv(self, a):
        return 1 / a

    def lift(self, ring, c):
        return Fraction(c)


def _ptrim(v):
    v = list(v)
    while v and v[-1] == 0:
        v.pop()
    return tuple(v)


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _psub(a, b, p):
    n = max(len(a), len(b))
    return _ptrim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
                   for i in range(n)])


def _pdivmod(a, b, p):
    assert b
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    for sh in range(len(a) - len(b), -1, -1):
        c = a[sh + len(b) - 1] * inv % p
        if c:
            q[sh] = c
            for j, y in enumerate(b):
                a[sh + j] = (a[sh + j] - c * y) % p
    return _ptrim(q), _ptrim(a)


def _pgcd(a, b, p):
    a, b = _ptrim(a), _ptrim(b)
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = tuple(x * inv % p for x in a)
    return a


class _RatFuncField:
    """Rational functions over F_p; elements are (num, den) pairs of
    trimmed digit tuples with monic denominator."""

    def __init__(self, p):
        self.p = p

    def _norm(self, num, den):
        assert den
        if not num:
            return ((), (1,))
        g = _pgcd(num, den, self.p)
        if len(g) > 1 or g[0] != 1:
            num = _pdivmod(num, g, self.p)[0]
            den = _pdivmod(den, g, self.p)[0]
        inv = pow(den[-1], -1, self.p)
        if inv != 1:
            num = tuple(x * inv % self.p for x in num)
            den = tuple(x * inv % self.p for x in den)
        return (num, den)

    def zero(self):
        return ((), (1,))

    def is_zero(self, a):
        return not a[0]

    def mul(self, a, b):
        return self._norm(_pmul(a[0], b[0], self.p), _pmul(a[1], b[1], self.p))

    def sub(self, a, b):
        num = _psub(_pmul(a[0], b[1], self.p), _pmul(b[0], a[1], self.p), self.p)
        return self._norm(num, _pmul(a[1], b[1], self.p))

    def neg(self, a):
        return (tuple(-x % self.p for x in a[0]), a[1])

    def inv(self, a):
        assert a[0]
        return self._norm(a[1], a[0])

    def lift(self, ring, c):
        return (_ptrim(c), (1,))


def _solve_linear(F, A, b):
    """Reduced row echelon solve; free variables are set to zero.
    Returns a solution vector or None when inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    rows = [list(A[i]) + [b[i]] for i in range(m)]
    pivots = []
    row = 0
    for col in range(n):
        sel = None
        for i in range(row, m):
            if not F.is_zero(rows[i][col]):
                sel = i
                break
        if sel is None:
            continue
        rows[row], rows[sel] = rows[sel], rows[row]
        inv = F.inv(rows[row][col])
        rows[row] = [F.mul(inv, x) for x in rows[row]]
        for i in range(m):
            if i != row and not F.is_zero(rows[i][col]):
                f = rows[i][col]
                rows[i] = [F.sub(x, F.mul(f, y))
                           for x, y in zip(rows[i], rows[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for i in range(row, m):
        if not F.is_zero(rows[i][n]):
            return None
    x = [F.zero()] * n
    for r, c in enumerate(pivots):
        x[c] = rows[r][n]
    return x


def _recurrence_field(ring):
    if isinstance(ring, IntModRing) and ring.prec == 1:
        return _PrimeField(ring.p)
    if isinstance(ring, ExactZRing):
        return _FractionField()
    if isinstance(ring, ExactFpTRing):
        return _RatFuncField(ring.p)
    raise ValueError("recurrence detection needs a field or exact domain, "
                     "got kind %s with prec %r" % (ring.kind, ring.prec))


def detect_recurrence(f, max_order):
    """Least order d <= max_order such that q(x) * f(x) is a polynomial
    of degree < d for some q with q(0) = 1, judged on every window row
    n in [d, M). The window must satisfy M >= 2 * max_order + 2."""
    if hasattr(f, "materialize"):
        f = f.materialize(f.x_prec)
    ring = f.ring
    F = _recurrence_field(ring)
    m = f.x_prec
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    if m < 2 * max_order + 2:
        raise WindowTooSmall("window %d is below 2*%d+2" % (m, max_order),
                             have=m, needed=2 * max_order + 2)
    c = [F.lift(ring, x) for x in f.coeffs]
    for d in range(1, max_order + 1):
        A = [[c[n - j] for j in range(1, d + 1)] for n in range(d, m)]
        rhs = [F.neg(c[n]) for n in range(d, m)]
        sol = _solve_linear(F, A, rhs)
        if sol is None:
            continue
        ok = True
        for n in range(d, m):
            acc = c[n]
            for j in range(1, d + 1):
                acc = F.sub(acc, F.neg(F.mul(sol[j - 1], c[n - j])))
            if not F.is_zero(acc):
                ok = False
                break
        if ok:
            q = tuple([_field_one(F)] + sol)
            return RationalityVerdict("rational", d=d, s=0, q=q, budget=m)
    return RationalityVerdict("irrational_at_budget", budget=m)


def _field_one(F):
    if isinstance(F, _PrimeField):
        return 1 % F.p
    if isinstance(F, _FractionField):
        return Fraction(1)
    return ((1,), (1,))
