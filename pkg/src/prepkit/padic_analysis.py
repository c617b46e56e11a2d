"""Gap power series: admissibility, small roots, truncation
certificates, and candidate-family sweeps.

A gap series is f = a_0 + a_1 x^(b(0)) + sum_(n>=1) a_n x^(b(n)) with
b(0) = 1 and rapidly increasing exponents. Admissibility asks for
(1) a_0 nonzero of positive valuation, (2) a unit coefficient at the
witness index, and (3) a growth cap on coefficient size relative to the
exponent gaps; every violation is reported with its condition number
and offending index.

Certificates that a candidate polynomial P does not vanish at the small
root lambda compare exact resultant valuations against the valuation of
the truncation Phi_N at lambda: v(Res(P, Phi_N)) < v(Phi_N(lambda))
forces P(lambda) != 0. Margins are cleared integer comparisons, never
floating point.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BudgetExceeded,
    CompositeModulus,
    DegreeAboveOne,
    HenselConditionFails,
    PointNotSmall,
    PrecisionTooLow,
    SpecViolation,
)
from .rings import (
    FpTRing,
    IntModRing,
    b2_mul,
    b2_pow_mod,
    digits_from_mask,
    is_prime,
    make_ring,
    mask_from_digits,
    val_unit_decompose,
)
from .resultant import Poly, make_poly, resultant
from .series import OracleSeries, Series, evaluate
from .weierstrass import WFactorization

VERDICT_CERTIFIED = "certified_not_root"
VERDICT_SHARED = "shared_factor"
VERDICT_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class GapSpec:
    characteristic: str  # "zero" | "p"
    p: int
    a_rule: dict
    b_rule: dict
    C: Fraction
    kappa: Fraction
    budget: int = 65536
    witness: int = 1

    def __post_init__(self):
        if self.characteristic not in ("zero", "p"):
            raise ValueError("characteristic must be 'zero' or 'p'")
        if not is_prime(self.p):
            raise CompositeModulus("base %r is not prime" % (self.p,),
                                   p=self.p)
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if self.witness < 1:
            raise ValueError("witness index must be at least 1")
        if self.characteristic == "zero" and not (self.C > 1 and self.kappa > 1):
            raise ValueError("growth constants must exceed 1")
        if self.characteristic == "p" and not self.C > 0:
            raise ValueError("growth constant must be positive")


def reference_spec(characteristic="zero"):
    """The running example: p = 2, a_0 the uniformizer, unit higher
    coefficients, b(n) = 2^(n^2), C = kappa = 2."""
    if characteristic == "zero":
        a0 = 2
        rest = 1
    else:
        a0 = (0, 1)
        rest = (1,)
    return GapSpec(characteristic, 2,
                   {"kind": "const_after", "a0": a0, "rest": rest},
                   {"kind": "pow2_nsq"},
                   Fraction(2), Fraction(2))


class _GapView:
    """Rule evaluation plus admissibility checks for one GapSpec."""

    def __init__(self, spec):
        self.spec = spec
        self._bs = []
        self._checked_a = set()

    # exponent rule
    def b(self, n):
        rule = self.spec.b_rule
        bs = self._bs
        while len(bs) <= n:
            m = len(bs)
            if rule["kind"] == "pow2_nsq":
                v = 2 ** (m * m)
            elif rule["kind"] == "explicit":
                vals = rule["values"]
                if m >= len(vals):
                    raise ValueError("explicit exponent rule exhausted at %d" % m)
                v = int(vals[m])
            else:
                raise ValueError("unknown exponent rule %r" % rule["kind"])
            if m == 0 and v != 1:
                raise SpecViolation("b(0) must be 1, got %d" % v,
                                    condition="b", index=0)
            if m > 0 and v <= bs[-1]:
                raise SpecViolation("exponents must increase: b(%d)=%d" % (m, v),
                                    condition="b", index=m)
            bs.append(v)
        return bs[n]

    def _raw_a(self, n):
        rule = self.spec.a_rule
        if rule["kind"] == "const_after":
            v = rule["a0"] if n == 0 else rule["rest"]
        elif rule["kind"] == "explicit":
            vals = rule["values"]
            if n < len(vals):
                v = vals[n]
            elif "rest" in rule:
                v = rule["rest"]
            else:
                raise ValueError("explicit coefficient rule exhausted at %d" % n)
        else:
            raise ValueError("unknown coefficient rule %r" % rule["kind"])
        if self.spec.characteristic == "zero":
            return int(v)
        return tuple(int(d) % self.spec.p for d in v)

    def _is_zero(self, a):
        return a == 0 if self.spec.characteristic == "zero" else not any(a)

    def _val(self, a):
        if self.spec.characteristic == "zero":
            if a == 0:
                return None
            v = 0
            while a % self.spec.p == 0:
                a //= self.spec.p
                v += 1
            return v
        for i, d in enumerate(a):
            if d:
                return i
        return None

    def a(self, n):
        v = self._raw_a(n)
        if n in self._checked_a:
            return v
        spec = self.spec
        if n == 0:
            if self._is_zero(v) or self._val(v) < 1:
                raise SpecViolation(
                    "a_0 must be nonzero with positive valuation",
                    condition=1, index=0)
        elif n == spec.witness:
            if self._is_zero(v) or self._val(v) != 0:
                raise SpecViolation(
                    "the witness coefficient a_%d must be a unit" % n,
                    condition=2, index=n)
        if n >= 1 and not self._is_zero(v):
            bn = self.b(n)
            if spec.characteristic == "zero":
                lhs = abs(v) * spec.kappa.denominator * spec.C.denominator ** bn
                rhs = spec.kappa.numerator * spec.C.numerator ** bn
            else:
                lhs = (len(v) - 1) * spec.C.denominator
                rhs = spec.C.numerator * bn
            if lhs > rhs:
                raise SpecViolation(
                    "coefficient a_%d breaks the growth cap" % n,
                    condition=3, index=n)
        self._checked_a.add(n)
        return v

    def validate_core(self):
        self.a(0)
        self.a(self.spec.witness)
        self.b(0)

    def sparse_terms_upto(self, emax):
        """Nonzero (exponent, coefficient) pairs with exponent <= emax,
        ascending. The witness-indexed coefficient sits at x^(b(0)) = x
        as well as at its own exponent."""
        self.validate_core()
        out = []
        a0 = self.a(0)
        if not self._is_zero(a0):
            out.append((0, a0))
        if emax >= 1:
            a1 = self.a(1)
            if not self._is_zero(a1):
                out.append((1, a1))
        m = 1
        while True:
            bm = self.b(m)
            if bm > emax:
                break
            am = self.a(m)
            if not self._is_zero(am):
                out.append((bm, am))
            m += 1
        return out

    def exact_ring(self):
        kind = "z" if self.spec.characteristic == "zero" else "fpt_exact"
        return make_ring(kind, self.spec.p)

    def work_ring(self, K):
        kind = "zp" if self.spec.characteristic == "zero" else "fpt"
        return make_ring(kind, self.spec.p, K)


def build_gap_series(spec):
    """The gap series as an exact-coefficient oracle, queryable up to
    the configured budget."""
    view = _GapView(spec)
    view.validate_core()
    ring = view.exact_ring()

    def coeff(e):
        if e == 0:
            return view.a(0)
        if e == 1:
            return view.a(1)
        lo = 1
        while view.b(lo) < e:
            lo += 1
        if view.b(lo) == e:
            return view.a(lo)
        return ring.zero()

    return OracleSeries(ring, coeff, spec.budget)


def sparse_terms_upto(spec, emax):
    return _GapView(spec).sparse_terms_upto(emax)


def phi_truncation(spec, N, budget=None):
    """The polynomial Phi_N: all terms with exponent <= b(N), as a
    dense exact polynomial. Materialization is refused past the
    budget (BudgetExceeded carries the needed size)."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    view = _GapView(spec)
    bN = view.b(N)
    cap = spec.budget if budget is None else budget
    if bN > cap:
        raise BudgetExceeded("Phi_%d needs degree %d, budget is %d"
                             % (N, bN, cap), needed=bN, budget=cap)
    ring = view.exact_ring()
    dense = [ring.zero()] * (bN + 1)
    for e, c in view.sparse_terms_upto(bN):
        dense[e] = ring.add(dense[e], ring.canon(c))
    return make_poly(ring, dense)


def _to_work(view, ring, c):
    if view.spec.characteristic == "zero":
        return ring.from_int(c)
    return ring.from_digits(c)


def _sparse_eval(view, ring, terms, lam):
    acc = ring.zero()
    for e, c in terms:
        acc = ring.add(acc, ring.mul(_to_work(view, ring, c),
                                     ring.pow(lam, e)))
    return acc


def small_root_of_gap(spec, K):
    """The unique root of valuation >= 1 at precision K, by sparse
    Newton iteration. Requires reduction index 1: the coefficient at
    x must be a unit (DegreeAboveOne otherwise)."""
    if K < 1:
        raise ValueError("precision must be positive")
    view = _GapView(spec)
    view.validate_core()
    a1 = view.a(1)
    if view._is_zero(a1) or view._val(a1) != 0:
        terms = view.sparse_terms_upto(view.b(max(spec.witness, 1)))
        n = next((e for e, c in terms if view._val(c) == 0), None)
        raise DegreeAboveOne(
            "the coefficient at x is not a unit; reduction index is %s" % n,
            reduction_index=n)
    ring = view.work_ring(K)
    terms = [(e, c) for e, c in view.sparse_terms_upto(max(K - 1, 1))]
    dterms = []
    for e, c in terms:
        if e == 0:
            continue
        if spec.characteristic == "zero":
            dc = e * c
        else:
            dc = tuple(d * (e % spec.p) % spec.p for d in c)
        if not view._is_zero(dc):
            dterms.append((e - 1, dc))
    lam = ring.zero()
    for _ in range(K.bit_length() + 6):
        fv = _sparse_eval(view, ring, terms, lam)
        if ring.is_zero(fv):
            break
        dv = _sparse_eval(view, ring, dterms, lam)
        assert ring.val(dv) == 0, "derivative must stay a unit"
        lam = ring.sub(lam, ring.mul(fv, ring.invert_unit(dv)))
    assert ring.is_zero(_sparse_eval(view, ring, terms, lam))
    v = ring.val(lam)
    assert v is not None and v >= 1
    return lam


class _PolyFunc:
    """Hensel adapter: exact polynomial, evaluable anywhere."""

    def __init__(self, poly):
        self.poly = poly

    def eval(self, ring, x):
        return self.poly.eval(x, ring)

    def deriv_eval(self, ring, x):
        cs = self.poly.coeffs
        acc = ring.zero()
        for k in range(len(cs) - 1, 0, -1):
            ck = ring.mul(ring.from_int(k), ring.canon(cs[k]))
            acc = ring.add(ring.mul(acc, x), ck)
        return acc


class _SeriesFunc:
    """Hensel adapter: windowed series, evaluable at small points."""

    def __init__(self, series):
        self.series = series
        ring = series.ring
        m = series.x_prec
        dc = [ring.mul(ring.from_int(k), series.coeffs[k])
              for k in range(1, m)]
        self.deriv = Series(ring, max(m - 1, 1),
                            tuple(dc) if dc else (ring.zero(),))

    def _lift(self, ring, x):
        sring = self.series.ring
        if isinstance(sring, IntModRing):
            return x % sring.mod
        return tuple(x) + (0,) * (sring.prec - len(x))

    def eval(self, ring, x):
        v = evaluate(self.series, self._lift(ring, x), ring.prec)
        return ring.canon(v)

    def deriv_eval(self, ring, x):
        v = evaluate(self.deriv, self._lift(ring, x), ring.prec)
        return ring.canon(v)


def hensel_lift(f, x0, K, ring=None, with_trace=False):
    """Newton lifting to a root mod pi^K from a start satisfying
    val(f(x0)) > 2 * val(f'(x0)). f may be an exact polynomial or a
    windowed series; the working ring defaults to x0's ring reduced
    to precision K."""
    if isinstance(f, Poly):
        fn = _PolyFunc(f)
        if ring is None:
            raise ValueError("polynomial lifting needs an explicit ring")
    else:
        fn = _SeriesFunc(f)
        if ring is None:
            ring = f.ring
    if ring.prec is None or ring.prec < K:
        raise ValueError("need a finite ring of precision at least %d" % K)
    if ring.prec != K:
        ring = make_ring(ring.kind, ring.p, K)
    lam = ring.canon(x0)
    trace = [lam]
    fv = fn.eval(ring, lam)
    if not ring.is_zero(fv):
        dv = fn.deriv_eval(ring, lam)
        vf, vd = ring.val(fv), ring.val(dv)
        if vd is None or vf <= 2 * vd:
            raise HenselConditionFails(
                "val(f(x0))=%s is not above 2*val(f'(x0))=%s"
                % (vf, "inf" if vd is None else 2 * vd), vf=vf, vd=vd)
        prev_vf = vf
        for _ in range(2 * K + 8):
            dv = fn.deriv_eval(ring, lam)
            vd2, unit = val_unit_decompose(ring, dv)
            step = ring.mul(fv, ring.invert_unit(unit))
            if isinstance(ring, IntModRing):
                pv = ring.p ** vd2
                assert step % pv == 0
                step //= pv
            else:
                assert not any(step[:vd2])
                step = tuple(step[vd2:]) + (0,) * vd2
            lam = ring.sub(lam, step)
            trace.append(lam)
            fv = fn.eval(ring, lam)
            if ring.is_zero(fv):
                break
            vf = ring.val(fv)
            assert vf > prev_vf, "no valuation progress"
            prev_vf = vf
        assert ring.is_zero(fv), "lifting did not converge"
    return (lam, trace) if with_trace else lam


@dataclass(frozen=True)
class BoundCheck:
    N: int
    phi_val: int
    lower: int
    required: int
    lam_val: int
    equality: bool


def _phi_val_at(view, lam, N, ring):
    """Valuation of Phi_N(lam), with the precision soundness gate:
    K must exceed b(N+1) * val(lam) + val(a_(N+1))."""
    spec = view.spec
    vlam = ring.val(lam)
    if vlam is None or vlam < 1:
        raise PointNotSmall("the root must have positive valuation")
    bN1 = view.b(N + 1)
    va = view._val(view.a(N + 1))
    assert va is not None, "vanishing tail head; bound needs a_(N+1) != 0"
    lower = bN1 * vlam + va
    required = lower + 1
    if ring.prec < required:
        raise PrecisionTooLow(
            "need precision %d for a sound comparison, have %d"
            % (required, ring.prec), required=required, have=ring.prec)
    if isinstance(ring, FpTRing) and spec.p == 2:
        mod = 1 << ring.prec
        acc = 0
        lmask = mask_from_digits(lam)
        for e, c in view.sparse_terms_upto(view.b(N)):
            cm = mask_from_digits(c)
            acc ^= b2_mul(cm, b2_pow_mod(lmask, e, mod)) & (mod - 1)
        phi = digits_from_mask(acc, ring.prec)
    else:
        phi = _sparse_eval(view, ring, view.sparse_terms_upto(view.b(N)), lam)
    pv = ring.val(phi)
    if pv is None:
        raise PrecisionTooLow(
            "Phi_%d(lam) vanishes at precision %d; no finite valuation"
            % (N, ring.prec), required=ring.prec + 1, have=ring.prec)
    assert pv >= lower, "tail valuation bound fails"
    equality = (va == 0 and vlam == 1)
    if equality:
        assert pv == lower, "unit tail head forces equality"
    return pv, lower, required, vlam


def bound_check_prime(spec, lam, N, ring):
    """Check v(Phi_N(lam)) >= b(N+1) * val(lam) + val(a_(N+1)), with
    equality when the tail head is a unit and val(lam) = 1."""
    view = _GapView(spec)
    view.validate_core()
    pv, lower, required, vlam = _phi_val_at(view, lam, N, ring)
    return BoundCheck(N, pv, lower, required, vlam, pv == lower)


@dataclass(frozen=True)
class MarginReport:
    kind: str  # "char0" | "charp"
    lhs_factors: tuple  # of (base string, exponent string)
    rhs_factors: tuple
    flipped: bool  # True once the certificate side dominates


def _margin_char0(spec, lam_val, bN, bN1, L):
    kn, kd = spec.kappa.numerator, spec.kappa.denominator
    cn, cd = spec.C.numerator, spec.C.denominator
    head = kd * kd * (cn * cn - cd * cd)
    lhs = spec.p ** (2 * lam_val * bN1) * head * cd ** (2 * bN)
    rhs = kn * kn * cn * cn * L ** bN * cn ** (2 * bN)
    lf = ((str(spec.p), str(2 * lam_val * bN1)),
          (str(head), "1"),
          (str(cd), str(2 * bN)))
    rf = ((str(kn * kn * cn * cn), "1"),
          (str(L), str(bN)),
          (str(cn), str(2 * bN)))
    return MarginReport("char0", lf, rf, lhs > rhs)


def _margin_charp(lam_val, bN, bN1, hP, aPhi, degP):
    lhs = bN1 * lam_val
    rhs = hP * bN + aPhi * degP
    lf = ((str(lhs), "1"),)
    rf = ((str(rhs), "1"),)
    return MarginReport("charp", lf, rf, lhs > rhs)


@dataclass(frozen=True)
class CertificateReport:
    candidate: tuple
    N: int
    b_next: int
    phi_val: int
    B: object
    B_val: object  # None when B = 0
    p_at_lam_val: object
    verdict: str
    margin: MarginReport


def _closed_form_B(view, P, N):
    """Resultant of a candidate of degree <= 2 against Phi_N without
    building the Sylvester matrix; falls back to the matrix route for
    higher degree or odd characteristic."""
    spec = view.spec
    terms = view.sparse_terms_upto(view.b(N))
    deg = view.b(N)
    cs = P.coeffs
    if spec.characteristic == "zero" and len(cs) == 2:
        c0, c1 = cs
        acc = 0
        for k, a in terms:
            acc += a * (-c0) ** k * c1 ** (deg - k)
        return acc
    if spec.characteristic == "zero" and len(cs) == 3:
        return _res_quad_char0(cs[0], cs[1], cs[2], terms, deg)
    if spec.characteristic == "p" and spec.p == 2 and len(cs) in (2, 3):
        masks = [mask_from_digits(c) for c in cs]
        tmask = [(k, mask_from_digits(a)) for k, a in terms]
        if len(cs) == 2:
            acc = 0
            for k, a in tmask:
                acc ^= b2_mul(a, b2_mul(_b2pow(masks[0], k),
                                        _b2pow(masks[1], deg - k)))
            return digits_from_mask(acc)
        return digits_from_mask(
            _res_quad_char2(masks[0], masks[1], masks[2], tmask, deg))
    return None


def _b2pow(a, e):
    acc = 1
    while e:
        if e & 1:
            acc = b2_mul(acc, a)
        a = b2_mul(a, a)
        e >>= 1
    return acc


def _res_quad_char0(c0, c1, c2, terms, deg):
    # track x^k mod (c2 x^2 + c1 x + c0) as (U x + V) / c2^e
    al, be, ga = c2, c1, c0

    def qmul(a, b):
        U, V, e = a
        U2, V2, e2 = b
        return ((U * V2 + U2 * V) * al - U * U2 * be,
                V * V2 * al - U * U2 * ga,
                e + e2 + 1)

    def qpow(E):
        acc, base = (0, 1, 0), (1, 0, 0)
        while E:
            if E & 1:
                acc = qmul(acc, base)
            base = qmul(base, base)
            E >>= 1
        return acc

    reps = [(a, qpow(k)) for k, a in terms]
    emax = max(e for _, (_, _, e) in reps)
    A = sum(a * U * al ** (emax - e) for a, (U, _, e) in reps)
    B = sum(a * V * al ** (emax - e) for a, (_, V, e) in reps)
    num = A * A * ga - A * B * be + al * B * B
    diff = deg - (2 * emax + 1)
    if diff >= 0:
        return num * al ** diff
    den = al ** (-diff)
    assert num % den == 0
    return num // den


def _res_quad_char2(c0, c1, c2, terms, deg):
    al, be, ga = c2, c1, c0

    def qmul(a, b):
        U, V, e = a
        U2, V2, e2 = b
        cross = b2_mul(U, V2) ^ b2_mul(U2, V)
        return (b2_mul(cross, al) ^ b2_mul(b2_mul(U, U2), be),
                b2_mul(b2_mul(V, V2), al) ^ b2_mul(b2_mul(U, U2), ga),
                e + e2 + 1)

    def qpow(E):
        acc, base = (0, 1, 0), (1, 0, 0)
        while E:
            if E & 1:
                acc = qmul(acc, base)
            base = qmul(base, base)
            E >>= 1
        return acc

    reps = [(a, qpow(k)) for k, a in terms]
    emax = max(e for _, (_, _, e) in reps)
    A = 0
    B = 0
    for a, (U, V, e) in reps:
        scale = _b2pow(al, emax - e)
        A ^= b2_mul(a, b2_mul(U, scale))
        B ^= b2_mul(a, b2_mul(V, scale))
    num = (b2_mul(b2_mul(A, A), ga) ^ b2_mul(b2_mul(A, B), be)
           ^ b2_mul(al, b2_mul(B, B)))
    diff = deg - (2 * emax + 1)
    if diff >= 0:
        return b2_mul(num, _b2pow(al, diff))
    from .rings import b2_divmod
    q, rem = b2_divmod(num, _b2pow(al, -diff))
    assert rem == 0
    return q


def _candidate_L(spec, P):
    if spec.characteristic == "zero":
        return (P.degree + 1) * max(abs(c) for c in P.coeffs) ** 2
    return max(len(c) - 1 for c in P.coeffs if c)


def _candidate_margin(view, P, N, lam_val):
    spec = view.spec
    bN, bN1 = view.b(N), view.b(N + 1)
    if spec.characteristic == "zero":
        return _margin_char0(spec, lam_val, bN, bN1, _candidate_L(spec, P))
    aPhi = max((len(c) - 1 for _, c in view.sparse_terms_upto(bN)), default=0)
    return _margin_charp(lam_val, bN, bN1, _candidate_L(spec, P), aPhi,
                         P.degree)


def _p_at_lam_val(view, P, lam, ring):
    spec = view.spec
    if isinstance(ring, FpTRing) and spec.p == 2:
        mod = 1 << ring.prec
        acc = 0
        lmask = mask_from_digits(lam)
        for c in reversed(P.coeffs):
            acc = (b2_mul(acc, lmask) ^ mask_from_digits(c)) & (mod - 1)
        if acc == 0:
            return None
        v = 0
        while not (acc >> v) & 1:
            v += 1
        return v
    val = P.eval(lam, ring)
    return ring.val(val)


def certify_not_root(spec, lam, P, N, ring):
    """Certificate that P(lambda) != 0 from the truncation Phi_N:
    compares the exact valuation of B = Res(P, Phi_N) with the
    valuation of Phi_N(lambda). B = 0 reports a shared factor."""
    if P.degree < 1:
        raise ValueError("candidates must be nonconstant")
    view = _GapView(spec)
    view.validate_core()
    exact = view.exact_ring()
    if P.ring != exact:
        if P.ring.kind != exact.kind or P.ring.p not in (None, exact.p):
            raise ValueError("candidate ring %r does not match the series"
                             % (P.ring.desc(),))
        P = make_poly(exact, list(P.coeffs))
    view.b(N)  # budget gate mirrors phi_truncation
    cap = spec.budget
    if view.b(N) > cap:
        raise BudgetExceeded("Phi_%d needs degree %d, budget is %d"
                             % (N, view.b(N), cap), needed=view.b(N),
                             budget=cap)
    phi_val, _, _, vlam = _phi_val_at(view, lam, N, ring)
    B = _closed_form_B(view, P, N)
    if B is None:
        B = resultant(P, phi_truncation(spec, N))
    if spec.characteristic == "p":
        B = view.exact_ring().canon(B)
        B_zero = view._is_zero(B)
    else:
        B_zero = B == 0
    margin = _candidate_margin(view, P, N, vlam)
    if B_zero:
        return CertificateReport(P.coeffs, N, view.b(N + 1), phi_val, B,
                                 None, None, VERDICT_SHARED, margin)
    B_val = view._val(B)
    pl_val = _p_at_lam_val(view, P, lam, ring)
    if B_val < phi_val:
        verdict = VERDICT_CERTIFIED
        assert pl_val is not None, "certified candidate vanishes at precision"
        assert pl_val <= B_val, "root valuation exceeds the resultant's"
    else:
        verdict = VERDICT_INCONCLUSIVE
    return CertificateReport(P.coeffs, N, view.b(N + 1), phi_val, B, B_val,
                             pl_val, verdict, margin)


def family_margin(spec, D, H, N, lam_val=1):
    """Family-level margin with the worst-case candidate size cap:
    L = (D + 1) * H^2 in characteristic zero, coefficient t-degree H
    in characteristic p. Needs only the exponent rule."""
    view = _GapView(spec)
    bN, bN1 = view.b(N), view.b(N + 1)
    if spec.characteristic == "zero":
        return _margin_char0(spec, lam_val, bN, bN1, (D + 1) * H * H)
    aPhi = max((len(c) - 1 for _, c in view.sparse_terms_upto(bN)), default=0)
    return _margin_charp(lam_val, bN, bN1, H, aPhi, D)


def enumerate_family(spec, D, H):
    """Deterministic candidate order: degree ascending, then
    lexicographic on the ascending coefficient tuple. Leading
    coefficients are sign-normalized positive in characteristic zero
    and nonzero in characteristic p."""
    exact_kind = spec.characteristic
    out = []
    for deg in range(1, D + 1):
        if exact_kind == "zero":
            lows = [range(-H, H + 1)] * deg
            for tup in itertools.product(*lows, range(1, H + 1)):
                out.append(tuple(tup))
        else:
            width = 1 << (H + 1)
            lows = [range(width)] * deg
            for tup in itertools.product(*lows, range(1, width)):
                out.append(tuple(digits_from_mask(m) for m in tup))
    return out


def _structural_charp_certificate(view, N):
    """Once-per-family irreducibility certificate for Phi_N over
    F_2[t]: Phi = A0(x) + t * A1(x) with every coefficient t-linear
    and gcd(A0, A1) = 1 makes Phi irreducible, so no candidate of
    smaller degree can share a factor."""
    spec = view.spec
    if spec.characteristic != "p" or spec.p != 2:
        return None
    terms = view.sparse_terms_upto(view.b(N))
    if any(len(c) > 2 for _, c in terms):
        return None
    a0mask = 0
    a1mask = 0
    for e, c in terms:
        if len(c) >= 1 and c[0]:
            a0mask |= 1 << e
        if len(c) == 2 and c[1]:
            a1mask |= 1 << e
    if a1mask == 0:
        return None
    from .rings import b2_gcd
    if b2_gcd(a0mask, a1mask) != 1:
        return None
    return {"A0": a0mask, "A1": a1mask, "deg": view.b(N)}


@dataclass(frozen=True)
class FamilySummary:
    total: int
    n_certified: int
    n_shared: int
    n_inconclusive: int
    route: str
    pl_checked: int
    max_pl_val: object
    max_B_val: object
    samples: tuple
    margin: MarginReport


def certify_family(spec, lam, D, H, N, ring, jobs=1):
    """Sweep every candidate of degree <= D and height <= H. Counts,
    sample reports (a deterministic stride), and crossvalidation stats
    are independent of the job count."""
    view = _GapView(spec)
    view.validate_core()
    cands = enumerate_family(spec, D, H)
    total = len(cands)
    fam_margin = family_margin(spec, D, H, N,
                               ring.val(lam) if total else 1)
    if total == 0:
        return FamilySummary(0, 0, 0, 0, "empty", 0, None, None, (),
                             fam_margin)
    exact = view.exact_ring()
    polys = [make_poly(exact, list(c)) for c in cands]
    stride = max(total // 16, 1)
    sample_idx = set(range(0, total, stride))

    structural = None
    if spec.characteristic == "p":
        structural = _structural_charp_certificate(view, N)

    if structural is not None:
        return _family_structural(spec, view, lam, polys, N, ring,
                                  sample_idx, fam_margin, jobs)
    return _family_percandidate(spec, view, lam, polys, N, ring,
                                sample_idx, fam_margin, jobs)


def _family_percandidate(spec, view, lam, polys, N, ring, sample_idx,
                         fam_margin, jobs):
    def work(chunk):
        counts = [0, 0, 0]
        pls = []
        bvs = []
        samples = []
        for idx, P in chunk:
            rep = certify_not_root(spec, lam, P, N, ring)
            if rep.verdict == VERDICT_CERTIFIED:
                counts[0] += 1
            elif rep.verdict == VERDICT_SHARED:
                counts[1] += 1
            else:
                counts[2] += 1
            if rep.p_at_lam_val is not None:
                pls.append(rep.p_at_lam_val)
            if rep.B_val is not None:
                bvs.append(rep.B_val)
            if idx in sample_idx:
                samples.append((idx, rep))
        return counts, pls, bvs, samples

    indexed = list(enumerate(polys))
    chunks = [indexed[i::jobs] for i in range(jobs)] if jobs > 1 else [indexed]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(work, chunks))
    else:
        results = [work(chunks[0])]
    counts = [0, 0, 0]
    pls = []
    bvs = []
    samples = []
    for c, p, b, s in results:
        for i in range(3):
            counts[i] += c[i]
        pls.extend(p)
        bvs.extend(b)
        samples.extend(s)
    samples.sort(key=lambda t: t[0])
    return FamilySummary(len(polys), counts[0], counts[1], counts[2],
                         "per_candidate", len(pls),
                         max(pls) if pls else None,
                         max(bvs) if bvs else None,
                         tuple(rep for _, rep in samples), fam_margin)


def _family_structural(spec, view, lam, polys, N, ring, sample_idx,
                       fam_margin, jobs):
    """Characteristic-p fast route: one irreducibility certificate
    covers nonvanishing of every B; per-candidate work reduces to the
    valuation of P(lambda), plus exact resultants on the sample."""
    bN, bN1 = view.b(N), view.b(N + 1)
    vlam = ring.val(lam)
    aPhi = max((len(c) - 1 for _, c in view.sparse_terms_upto(bN)),
               default=0)
    deg_cap = max(p.degree for p in polys)
    h_cap = max(max(len(c) - 1 for c in p.coeffs if c) for p in polys)
    tdeg_bound = h_cap * bN + aPhi * deg_cap
    if not (bN1 * vlam > tdeg_bound and deg_cap < bN):
        return _family_percandidate(spec, view, lam, polys, N, ring,
                                    sample_idx, fam_margin, jobs)
    # v(B) <= deg_t(B) <= tdeg_bound < v(Phi_N(lam)): certified across
    # the family once each B is nonzero, which irreducibility grants.
    width = tdeg_bound + 2
    mod = 1 << width
    lmask = mask_from_digits(lam) & (mod - 1)

    def work(chunk):
        pls = []
        samples = []
        for idx, P in chunk:
            acc = 0
            for c in reversed(P.coeffs):
                acc = (b2_mul(acc, lmask) ^ mask_from_digits(c)) & (mod - 1)
            assert acc != 0, "P(lam) vanished below the certified bound"
            v = 0
            while not (acc >> v) & 1:
                v += 1
            assert v <= tdeg_bound
            pls.append(v)
            if idx in sample_idx:
                rep = certify_not_root(spec, lam, P, N, ring)
                assert rep.verdict == VERDICT_CERTIFIED
                assert rep.B_val <= tdeg_bound
                samples.append((idx, rep))
        return pls, samples

    indexed = list(enumerate(polys))
    chunks = [indexed[i::jobs] for i in range(jobs)] if jobs > 1 else [indexed]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(work, chunks))
    else:
        results = [work(chunks[0])]
    pls = []
    samples = []
    for p, s in results:
        pls.extend(p)
        samples.extend(s)
    samples.sort(key=lambda t: t[0])
    bvs = [rep.B_val for _, rep in samples]
    return FamilySummary(len(polys), len(polys), 0, 0, "structural",
                         len(pls), max(pls) if pls else None,
                         max(bvs) if bvs else None,
                         tuple(rep for _, rep in samples), fam_margin)


def gap_linear_factor(spec, K):
    """Weierstrass data for the reduction-index-1 gap series at
    precision K on the window x^K: P = x - lambda and the unit
    cofactor with coefficients U_k = sum_(j>k) f_j lambda^(j-k-1),
    built by one suffix sweep instead of the generic iteration."""
    view = _GapView(spec)
    lam = small_root_of_gap(spec, K)
    ring = view.work_ring(K)
    dense = [ring.zero()] * K
    for e, c in view.sparse_terms_upto(K - 1):
        dense[e] = ring.add(dense[e], _to_work(view, ring, c))
    U = [ring.zero()] * K
    cur = ring.zero()
    for k in range(K - 1, -1, -1):
        nxt = dense[k + 1] if k + 1 < K else ring.zero()
        cur = ring.add(ring.mul(lam, cur), nxt)
        U[k] = cur
    assert ring.val(U[0]) == 0, "cofactor must be a unit series"
    # (x - lam) * U == f on the window
    assert ring.mul(ring.neg(lam), U[0]) == dense[0]
    for k in range(1, K):
        got = ring.sub(U[k - 1], ring.mul(lam, U[k]))
        assert got == dense[k], "cofactor identity fails at %d" % k
    P = (ring.neg(lam), ring.one())
    return WFactorization(0, 1, P, Series(ring, K, tuple(U)), ring, K)
