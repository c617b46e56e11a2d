"""Weierstrass division, preparation, and strong factorization over
finite-precision local coefficient rings.

Division writes g = q * f + r with deg r below the reduction index of
f. At window precision the pair (q, r) is pinned down as the unique
fixed point of a contraction that gains one uniformizer power per pass;
that fixed point also satisfies the normalization that the top n
coefficients of beta * q vanish, where f = alpha + x^n * beta. Both
facts are asserted after every division.

Strong factorization splits f = pi^v * P * U with P a monic
distinguished polynomial (non-leading coefficients of positive
valuation) and U a unit series: the valuation content is divided out,
preparation runs at reduced precision, and the factors lift back.
"""

from dataclasses import dataclass

from .errors import NoUnitCoefficient, RingMismatch, ZeroAtPrecision
from .rings import FpTRing, IntModRing, Ring
from .series import Series, make_series, series_invert, series_mul

SCHEDULES = ("direct", "warmstart")


@dataclass(frozen=True)
class WFactorization:
    v: int
    n: int
    P: tuple  # monic, length n + 1
    U: Series
    ring: Ring
    x_prec: int

    def verify(self, f):
        """Recompute pi^v * P * U against f on the common window."""
        ring = self.ring
        if f.ring != ring:
            raise RingMismatch("factorization ring differs from operand ring")
        m = min(self.x_prec, f.x_prec)
        pser = make_series(ring, list(self.P), m)
        prod = series_mul(pser, self.U.truncate(m))
        piv = ring.pow(ring.uniformizer(), self.v)
        for got, want in zip(prod.coeffs, f.coeffs[:m]):
            if ring.mul(piv, got) != want:
                return False
        return True


def reduction_index(f):
    """Least windowed index whose coefficient is a unit."""
    ring = f.ring
    for i, c in enumerate(f.coeffs):
        if ring.val(c) == 0:
            return i
    raise NoUnitCoefficient(
        "no unit coefficient in a window of %d" % f.x_prec, x_prec=f.x_prec)


def _require_finite(ring):
    if not isinstance(ring, (IntModRing, FpTRing)):
        raise ValueError("division needs a finite-precision local ring, "
                         "got kind %s" % ring.kind)


def weierstrass_divide(g, f, schedule="direct"):
    """Divide g by f: returns (q, r) with g = q * f + r on the window,
    deg r < n, and the fixed-point normalization above. The two
    schedules differ only in the starting iterate and must agree
    bit for bit."""
    if schedule not in SCHEDULES:
        raise ValueError("unknown schedule %r; expected one of %s"
                         % (schedule, ", ".join(SCHEDULES)))
    if f.ring != g.ring:
        raise RingMismatch("operand rings differ: %r vs %r" % (f.ring, g.ring))
    ring = f.ring
    _require_finite(ring)
    m = min(f.x_prec, g.x_prec)
    fc = list(f.coeffs[:m])
    gc = list(g.coeffs[:m])
    n = reduction_index(f.truncate(m))
    alpha = fc[:n]
    beta = fc[n:] + [ring.zero()] * n
    binv = list(series_invert(Series(ring, m, tuple(beta))).coeffs)

    def step(q):
        qa = ring.convolve(q, alpha, m) if alpha else [ring.zero()] * m
        diff = [ring.sub(gc[i], qa[i]) for i in range(m)]
        shifted = diff[n:] + [ring.zero()] * n
        return ring.convolve(binv, shifted, m)

    if schedule == "direct":
        q = [ring.zero()] * m
        passes = ring.prec + 2
    else:
        q = ring.convolve(binv, gc[n:] + [ring.zero()] * n, m)
        passes = ring.prec + 1
    for _ in range(passes):
        q = step(q)

    qf = ring.convolve(q, fc, m)
    r = tuple(ring.sub(gc[i], qf[i]) for i in range(n))
    for i in range(n, m):
        assert qf[i] == gc[i], "division identity fails at %d" % i
    qb = ring.convolve(q, beta, m)
    for k in range(m - n, m):
        assert ring.is_zero(qb[k]), "fixed-point normalization fails at %d" % k
    return Series(ring, m, tuple(q)), r


def prepare(f, schedule="direct"):
    """Weierstrass preparation f = P * U from dividing x^n by f."""
    ring = f.ring
    _require_finite(ring)
    m = f.x_prec
    n = reduction_index(f)
    xn = [ring.zero()] * m
    xn[n] = ring.one()
    q, r = weierstrass_divide(Series(ring, m, tuple(xn)), f, schedule)
    P = tuple(ring.neg(c) for c in r) + (ring.one(),)
    for c in P[:-1]:
        v = ring.val(c)
        assert v is None or v >= 1, "distinguished coefficient is a unit"
    U = series_invert(q)
    wf = WFactorization(0, n, P, U, ring, m)
    assert wf.verify(f), "preparation roundtrip fails"
    return wf


def strong_factor(f, schedule="direct"):
    """Strong factorization f = pi^v * P * U. The windowed minimum
    valuation v is divided out, preparation runs at precision K - v,
    and the factors are lifted back to the original ring."""
    ring = f.ring
    _require_finite(ring)
    m = f.x_prec
    vals = [ring.val(c) for c in f.coeffs]
    finite = [v for v in vals if v is not None]
    if not finite:
        raise ZeroAtPrecision(
            "every windowed coefficient is zero at precision %d" % ring.prec,
            prec=ring.prec)
    v = min(finite)
    if v == 0:
        wf = prepare(f, schedule)
        return WFactorization(0, wf.n, wf.P, wf.U, ring, m)

    K = ring.prec
    if isinstance(ring, IntModRing):
        work = type(ring)(ring.p, K - v)
        pv = ring.p ** v
        wc = [c // pv for c in f.coeffs]
        lift_elem = lambda c: c
    else:
        work = FpTRing(ring.p, K - v)
        wc = [tuple(c[v:]) for c in f.coeffs]
        lift_elem = lambda c: tuple(c) + (0,) * v

    fw = make_series(work, wc, m)
    wf = prepare(fw, schedule)
    P = tuple(lift_elem(c) for c in wf.P)
    U = Series(ring, m, tuple(lift_elem(c) for c in wf.U.coeffs))
    out = WFactorization(v, wf.n, P, U, ring, m)
    assert out.verify(f), "strong factorization roundtrip fails"
    return out
