"""The algebraic side: predicted prime factorization of the CM-value invariant.

For even k and a valid principal part, the averaged Green's function value
satisfies  kappa * G = -Delta^{(1-k)/2} log|gamma/gamma'|  for an element
gamma of F supported on split primes with chi = -1.  The exponent of such a
prime l is an explicit finite sum over totally positive trace slices of the
inverse different, weighted by odd Legendre polynomials (exact rationals) and
the ideal count rho_{K/F}.

The raw slice sum is antisymmetric under conjugation (ord_l = -ord_l'); the
report clears conjugates by the rational rescaling gamma -> n*gamma, leaving
the exponent 2e on the member of each pair where the raw value e is positive.
This matches the presentation with nonnegative exponents and untouched
log|gamma/gamma'|.  The unit power is fitted numerically against
L(eps) = log|eps/eps'| and rounded to a bounded-denominator rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, gcd, isqrt, lcm

import mpmath
from mpmath import mpf

from sympy import factorint

from .qfield import (
    FieldElem,
    FracIdeal,
    InvalidInputError,
    QuadField,
    field,
    ideal_divisors,
    kronecker,
)
from .finquad import GenusChar, rho_KF
from .mforms import check_principal_part


# ---------------------------------------------------------------------------
# Legendre polynomials, exact
# ---------------------------------------------------------------------------

def _gen_binom(a: Fraction, m: int) -> Fraction:
    """Generalized binomial a(a-1)...(a-m+1)/m! for rational a."""
    num = Fraction(1)
    for i in range(m):
        num *= a - i
    return num / factorial(m)


@dataclass(frozen=True)
class LegendreP:
    """P_n as exact coefficients c[b] of x^b, b = 0..n."""

    n: int
    coeffs: tuple

    def __call__(self, x):
        out = 0
        for c in reversed(self.coeffs):
            out = out * x + c
        return out


def legendre_P(n: int) -> LegendreP:
    """P_n via the explicit formula c_{n,b} = 2^n C(n,b) C((n+b-1)/2, n)."""
    if n < 0:
        raise InvalidInputError("legendre_P needs n >= 0")
    coeffs = []
    for b in range(n + 1):
        c = (2 ** n) * comb(n, b) * _gen_binom(Fraction(n + b - 1, 2), n)
        coeffs.append(Fraction(c))
    return LegendreP(n, tuple(coeffs))


# ---------------------------------------------------------------------------
# trace slices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceSlice:
    """mu0 in O_F with tr(mu0/sqrt(Delta)) = m and mu0/sqrt(Delta) >> 0.

    Exactly the elements (n + m*sqrt(Delta))/2 over integers n with
    |n| < m*sqrt(Delta) and the parity making mu0 integral.
    """

    m: int
    Delta: int
    elements: tuple


def trace_slice(m: int, Delta: int) -> TraceSlice:
    if m < 1:
        raise InvalidInputError("trace parameter m must be >= 1")
    F = field(Delta)
    out = []
    n0 = (m * Delta) % 2  # parity making (n + m sqrt(D))/2 integral
    nmax_sq = m * m * Delta
    bound = isqrt(nmax_sq) + 1
    for n in range(-bound, bound + 1):
        if (n - n0) % 2 or n * n >= nmax_sq:
            continue
        mu0 = F.elem(Fraction(n, 2), Fraction(m, 2))
        assert mu0.is_integral()
        lam = mu0 / F.sqrtD
        assert lam.is_totally_positive() and lam.trace() == m
        out.append(mu0)
    return TraceSlice(m, Delta, tuple(out))


# ---------------------------------------------------------------------------
# exponent engine
# ---------------------------------------------------------------------------

@dataclass
class FactorReport:
    """Predicted factorization data for gamma, plus the reconciliation fields."""

    Delta: int
    k: int
    chi: GenusChar
    exponents: dict          # (ell, hnf b) -> Fraction, conjugate-cleared
    raw_exponents: dict      # (ell, hnf b) -> Fraction, antisymmetric slice sums
    kappa: int
    unit_power: float | None = None
    unit_power_rational: Fraction | None = None
    residual: float | None = None
    rhs_value: float | None = None
    verified: bool | None = None
    residual_threshold: float | None = None

    def prime_ideal(self, key) -> FracIdeal:
        ell, b = key
        return FracIdeal(self.Delta, 1, ell, b)


def _slice_weight(k: int, n: int, m: int, Delta: int, P: LegendreP) -> Fraction:
    """((sqrt(D) m)^{k-1}/2) P_{k-1}(n/(sqrt(D) m)), exact for even k.

    P_{k-1} is odd, so only odd powers b contribute and (sqrt(D))^{k-1-b} is an
    integer power of Delta.
    """
    total = Fraction(0)
    for b in range(1, k, 2):
        c = P.coeffs[b]
        if c:
            total += c * Fraction(n) ** b * Fraction(Delta) ** ((k - 1 - b) // 2) \
                * Fraction(m) ** (k - 1 - b)
    return total / 2


def gamma_exponents(k: int, pp, d1: int, d2: int) -> FactorReport:
    """Exponent map of gamma for the cycle (d1, d2) and principal part pp.

    Support lies on split primes l with chi(l) = -1; the raw slice sums are
    antisymmetric under conjugation and the reported exponents clear the
    conjugate entries.  kappa is the lcm of the cleared denominators.
    """
    if k < 2 or k % 2 != 0:
        raise InvalidInputError("the factorization needs even k >= 2")
    if d1 >= 0 or d2 >= 0 or gcd(d1, d2) != 1:
        raise InvalidInputError("d1, d2 must be negative and coprime")
    Delta = d1 * d2
    F = field(Delta)
    chi = GenusChar(d1, d2)
    obstruction = check_principal_part(k, pp)
    if obstruction is not None:
        raise InvalidInputError(f"principal part obstructed: {obstruction}")
    P = legendre_P(k - 1)
    raw = {}
    for m, cf in sorted(pp.items()):
        cf = Fraction(cf)
        if cf == 0:
            continue
        for mu0 in trace_slice(m, Delta).elements:
            I = FracIdeal.from_generators(Delta, [mu0])
            w = cf * _slice_weight(k, int(mu0.trace()), m, Delta, P)
            nm = int(abs(mu0.norm()))
            for ell in factorint(nm):
                if kronecker(Delta, ell) != 1:
                    continue
                for pr in F.primes_above(ell):
                    if chi(pr) != -1:
                        continue
                    e = I.valuation(pr)
                    rho = rho_KF(chi, I * pr)
                    if rho == 0:
                        continue
                    term = w * rho * (1 + e)
                    key = (ell, pr.b)
                    raw[key] = raw.get(key, Fraction(0)) + term
    raw = {key: v for key, v in raw.items() if v}
    # conjugate clearing: pairs carry (e, -e); keep 2e at the positive member
    cleared = {}
    seen = set()
    for (ell, b), v in raw.items():
        if (ell, b) in seen:
            continue
        pr, prc = F.primes_above(ell)
        bb = prc.b if pr.b == b else pr.b
        seen.add((ell, b))
        seen.add((ell, bb))
        vc = raw.get((ell, bb), Fraction(0))
        assert v == -vc, "slice sums are not conjugate-antisymmetric"
        if v > 0:
            cleared[(ell, b)] = 2 * v
        elif v < 0:
            cleared[(ell, bb)] = -2 * v
    kappa = 1
    for v in cleared.values():
        kappa = lcm(kappa, v.denominator)
    return FactorReport(Delta, k, chi, cleared, raw, kappa)


def _prime_key(pr: FracIdeal):
    """Stable key for a prime ideal: (rational prime, hnf b, inert flag).

    Inert primes all share the HNF shape p*[1, 0], so the bare (a, b) pair
    would collide across them; the rational prime disambiguates.
    """
    n = int(pr.norm())
    if pr.a == 1:                # inert: norm p^2, scale p
        return (int(pr.s), 0, "inert")
    return (n, pr.b)


def alt_exponent_check(mu0: FieldElem, chi: GenusChar) -> dict:
    """Exponent vector of prod over integral divisors a | (mu0) of a^{chi(a)}.

    Returns {prime key: integer exponent}; equals -1/2 times the rho-weighted
    vector  l^{rho((mu0) l)(1 + ord_l((mu0)))}  at split primes with
    chi(l) = -1 (checked in tests).
    """
    if not mu0.is_integral() or mu0.is_zero():
        raise InvalidInputError("alt_exponent_check needs integral mu0 != 0")
    F = chi.F
    I = FracIdeal.from_generators(F.D, [mu0])
    out = {}
    for J in ideal_divisors(F, I):
        c = chi(J)
        for pr, e in F.factor_ideal(J):
            key = _prime_key(pr)
            out[key] = out.get(key, 0) + c * e
    return {k: v for k, v in out.items() if v}


def rho_exponent_vector(mu0: FieldElem, chi: GenusChar) -> dict:
    """{prime key: rho((mu0) l)(1 + ord_l((mu0)))} over split chi = -1 primes l | (mu0)."""
    F = chi.F
    I = FracIdeal.from_generators(F.D, [mu0])
    out = {}
    for pr, e in F.factor_ideal(I):
        if pr.a > 1 and chi(pr) == -1 and pr != pr.conj():
            rho = rho_KF(chi, I * pr)
            if rho:
                out[_prime_key(pr)] = rho * (1 + e)
    return out


# ---------------------------------------------------------------------------
# reconciliation against the numeric side
# ---------------------------------------------------------------------------

def _log_ratio(F: QuadField, e: FieldElem) -> mpf:
    """log |e / e'| at the current mpmath precision."""
    sq = mpmath.sqrt(F.D)
    x = mpf(e.x.numerator) / e.x.denominator + (mpf(e.y.numerator) / e.y.denominator) * sq
    ec = e.conj()
    xc = mpf(ec.x.numerator) / ec.x.denominator + (mpf(ec.y.numerator) / ec.y.denominator) * sq
    return mpmath.log(abs(x / xc))


def reconcile(report: FactorReport, lhs, tol: float, digits: int = 30) -> FactorReport:
    """Fit the unit power so that -kappa Delta^{(k-1)/2} lhs matches the exponents.

    S = sum of (kappa * exponent / h_F) * log|mu_l / mu_l'| over the support,
    with mu_l a fixed generator of l^{h_F} (conjugate-compatibly); then
    r = (-kappa Delta^{(k-1)/2} lhs - S) / log|eps/eps'| is the fitted power of
    eps_F, reported with its nearest rational of denominator <= 2 h_F kappa.
    Success means residual < 10 * tol * Delta^{(k-1)/2}.
    """
    F = field(report.Delta)
    hF = F.narrow_class_group().class_number_wide()
    with mpmath.mp.workdps(digits):
        lhs = mpf(lhs)
        target = -report.kappa * mpf(report.Delta) ** Fraction(report.k - 1, 2) * lhs
        S = mpf(0)
        gens = {}
        for (ell, b) in report.exponents:
            pr, prc = F.primes_above(ell)
            if (ell, pr.b) not in gens:
                mu = F.generator_of(pr ** hF)
                assert mu is not None
                mu = mu if mu.sign() > 0 else -mu
                mu = _normalized_generator(F, mu)
                gens[(ell, pr.b)] = mu
                gens[(ell, prc.b)] = mu.conj()
        for key, e in report.exponents.items():
            mu = gens[key]
            S += (mpf((report.kappa * e).numerator) / (report.kappa * e).denominator
                  / hF * _log_ratio(F, mu))
        Leps = _log_ratio(F, F.fundamental_unit())
        r = (target - S) / Leps
        max_den = 2 * hF * report.kappa
        r_rat = Fraction(float(r)).limit_denominator(max_den)
        residual = abs(target - S - (mpf(r_rat.numerator) / r_rat.denominator) * Leps)
        report.unit_power = float(r)
        report.unit_power_rational = r_rat
        report.residual = float(residual)
        report.rhs_value = float(
            -(S + (mpf(r_rat.numerator) / r_rat.denominator) * Leps)
            / (report.kappa * mpf(report.Delta) ** Fraction(report.k - 1, 2))
        )
        threshold = 10 * tol * float(report.Delta) ** ((report.k - 1) / 2)
        report.verified = float(residual) < threshold
        report.residual_threshold = threshold
    return report


def _normalized_generator(F: QuadField, mu: FieldElem) -> FieldElem:
    """The unique positive generator with eps_F^{-1} <= |mu/mu'| < eps_F.

    Positive generators of a fixed ideal differ by powers of eps_F and their
    |mu/mu'| ratios are spaced by eps_F^2, so the balanced window pins one;
    it is the member of the unit orbit with the smallest coefficients, and the
    window is (up to boundary) stable under conjugation, which makes the
    choice compatible with mu_{l'} = (mu_l)'.
    """
    eps = F.fundamental_unit()
    eps_inv = eps.inverse()
    lo = eps_inv if eps.sign() > 0 else -eps_inv
    lo = lo if lo.sign() > 0 else -lo

    def absratio(m):
        rr = m / m.conj()
        return rr if rr.sign() > 0 else -rr

    r = absratio(mu)
    steps = 0
    while r < lo:
        mu = mu * eps
        r = absratio(mu)
        steps += 1
        if steps > 10 ** 5:
            raise RuntimeError("generator normalization loop")
    while r >= eps:
        mu = mu * eps_inv
        r = absratio(mu)
        steps += 1
        if steps > 10 ** 5:
            raise RuntimeError("generator normalization loop")
    if mu.sign() < 0:
        mu = -mu
    return mu
