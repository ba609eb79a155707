import random
from fractions import Fraction

import mpmath
import pytest

from hgreen.qfield import FracIdeal, InvalidInputError, field
from hgreen.finquad import genus_characters
from hgreen.factor import (
    alt_exponent_check,
    gamma_exponents,
    legendre_P,
    reconcile,
    rho_exponent_vector,
    trace_slice,
)


def paper_prime(F, ell, elem):
    """The prime above ell containing the given element."""
    return next(P for P in F.primes_above(ell) if P.contains(elem))


def test_legendre_p_examples():
    assert legendre_P(1).coeffs == (0, 1)
    assert legendre_P(3).coeffs == (0, Fraction(-3, 2), 0, Fraction(5, 2))
    assert legendre_P(0).coeffs == (1,)


def test_legendre_p_parity_and_normalization():
    for n in range(13):
        P = legendre_P(n)
        assert sum(P.coeffs) == 1            # P_n(1) = 1
        for b, c in enumerate(P.coeffs):
            if (b - n) % 2:
                assert c == 0


def test_legendre_p_recurrence():
    x = Fraction(5, 11)
    for n in range(1, 12):
        lhs = (n + 1) * legendre_P(n + 1)(x)
        rhs = (2 * n + 1) * x * legendre_P(n)(x) - n * legendre_P(n - 1)(x)
        assert lhs == rhs


def test_legendre_p_generating_function():
    # coefficients of 1/sqrt(1-2xt+t^2) in t, exact series to order 8
    x = Fraction(3, 7)
    # (1 - (2xt - t^2))^{-1/2} = sum_j binom(2j, j)/4^j (2xt - t^2)^j
    from math import comb
    N = 9
    series = [Fraction(0)] * N
    for j in range(N):
        cj = Fraction(comb(2 * j, j), 4 ** j)
        # (2x t - t^2)^j expanded
        for i in range(j + 1):
            power = j + i
            if power < N:
                series[power] += cj * comb(j, i) * (2 * x) ** (j - i) * (-1) ** i
    for n in range(N):
        assert series[n] == legendre_P(n)(x)


def test_trace_slice_28():
    ts = trace_slice(1, 28)
    # x + sqrt(7) for x in -2..2
    assert [(e.x, e.y) for e in ts.elements] == [
        (x, Fraction(1, 2)) for x in range(-2, 3)
    ]


def test_trace_slice_161():
    ts = trace_slice(1, 161)
    assert len(ts.elements) == 12
    assert sorted({int(abs(e.norm())) for e in ts.elements}) == [10, 20, 28, 34, 38, 40]


@pytest.mark.parametrize("D", [5, 8, 12, 21, 28, 161])
def test_trace_slice_nonempty_and_complete(D):
    for m in (1, 2, 3):
        ts = trace_slice(m, D)
        assert ts.elements
        F = field(D)
        for e in ts.elements:
            lam = e / F.sqrtD
            assert lam.is_totally_positive() and lam.trace() == m
        # brute-force recount: tr(el/sqrtD) = m forces v = m exactly, and the
        # total positivity pins u into a window of width m*sqrt(D) around -mD/2
        count = 0
        lo = -(2 * D + 100)
        for u in range(lo, 101):
            for v in range(0, m + 1):
                el = F.from_uv(u, v)
                lam = el / F.sqrtD
                if lam.trace() == m and not el.is_zero() and lam.is_totally_positive():
                    count += 1
        assert count == len(ts.elements)


def test_gamma_exponents_paper_case():
    rep = gamma_exponents(4, {1: Fraction(1)}, -7, -23)
    F = field(161)
    p5 = paper_prime(F, 5, F.elem(38, 3))
    p17 = paper_prime(F, 17, F.elem(12, 1))
    p19 = paper_prime(F, 19, F.elem(25, 2))
    p19c = p19.conj()
    want = {
        (5, p5.b): Fraction(2878),
        (17, p17.b): Fraction(3580),
        (19, p19c.b): Fraction(2628),
    }
    assert rep.exponents == want
    assert rep.kappa == 1
    # raw slice sums are conjugate-antisymmetric halves
    assert rep.raw_exponents[(5, p5.b)] == Fraction(1439)
    assert rep.raw_exponents[(5, p5.conj().b)] == Fraction(-1439)


def test_gamma_exponents_contributing_primes():
    # slice norms {40,38,34,28,20,10}: chi(p_2) = +1 excludes 2, 7 is ramified
    rep = gamma_exponents(4, {1: Fraction(1)}, -7, -23)
    assert sorted({ell for (ell, _) in rep.exponents}) == [5, 17, 19]


def test_gamma_exponents_k2_pure_unit():
    rep = gamma_exponents(2, {1: Fraction(1)}, -4, -7)
    assert rep.exponents == {}
    assert rep.kappa == 1


def test_gamma_exponents_validation():
    with pytest.raises(InvalidInputError):
        gamma_exponents(3, {1: Fraction(1)}, -7, -23)
    with pytest.raises(InvalidInputError):
        gamma_exponents(4, {1: Fraction(1)}, -7, -7)
    with pytest.raises(InvalidInputError):
        gamma_exponents(12, {1: Fraction(1)}, -4, -7)  # obstructed


def test_gamma_exponents_pp_scaling():
    r1 = gamma_exponents(4, {1: Fraction(1)}, -7, -23)
    r2 = gamma_exponents(4, {1: Fraction(2)}, -7, -23)
    assert r2.exponents == {k: 2 * v for k, v in r1.exponents.items()}
    r3 = gamma_exponents(4, {1: Fraction(1, 3)}, -7, -23)
    assert r3.kappa == 3
    assert r3.exponents == {k: v / 3 for k, v in r1.exponents.items()}


def test_gamma_exponents_deterministic():
    a = gamma_exponents(4, {1: Fraction(1)}, -7, -23)
    b = gamma_exponents(4, {1: Fraction(1)}, -7, -23)
    assert a.exponents == b.exponents and a.kappa == b.kappa


def test_exponents_supported_on_chi_minus_split():
    rep = gamma_exponents(4, {1: Fraction(1)}, -7, -23)
    F = field(161)
    chi = rep.chi
    for (ell, b) in rep.exponents:
        P = FracIdeal(161, 1, ell, b)
        assert F.splitting(ell) == "split"
        assert chi(P) == -1


def test_alt_exponent_check_unit_and_plus_prime():
    F = field(161)
    chi = genus_characters(161, odd_only=True)[0]
    assert alt_exponent_check(F.one, chi) == {}
    # mu0 generating a chi = +1 split prime: rho vector empty
    g = F.generator_of(F.prime_above(2))
    assert rho_exponent_vector(g, chi) == {}


@pytest.mark.parametrize("D", [12, 21, 28, 161])
def test_alt_exponent_vs_rho_vector(D):
    # On split chi = -1 primes: divisor product exponent = -(1/2) rho(1+ord).
    # (The displayed remark in the source omits the -1/2; tested law is the
    # one that holds numerically.)
    rng = random.Random(D)
    F = field(D)
    chi = genus_characters(D, odd_only=True)[0]
    done = 0
    while done < 25:
        mu = F.from_uv(rng.randint(-14, 14), rng.randint(0, 2))
        if mu.is_zero() or not (0 < abs(mu.norm()) <= 200):
            continue
        alt = alt_exponent_check(mu, chi)
        rho = rho_exponent_vector(mu, chi)
        for key, v in rho.items():
            assert alt.get(key, 0) * (-2) == v
        done += 1


def test_alt_exponent_acceptance_slices():
    # every mu0 in the slices of the two acceptance runs
    for (k, d1, d2) in ((4, -7, -23), (2, -4, -7)):
        D = d1 * d2
        F = field(D)
        chi = genus_characters(D, odd_only=True)[0]
        for mu in trace_slice(1, D).elements:
            alt = alt_exponent_check(mu, chi)
            rho = rho_exponent_vector(mu, chi)
            for key, v in rho.items():
                assert alt.get(key, 0) * (-2) == v


def test_conjugation_swap_consistency():
    # swapping which prime above each ell is labeled first swaps the exponents
    rep = gamma_exponents(4, {1: Fraction(1)}, -7, -23)
    F = field(161)
    for (ell, b), e in rep.raw_exponents.items():
        P = FracIdeal(161, 1, ell, b)
        assert rep.raw_exponents[(ell, P.conj().b)] == -e


def test_reconcile_161():
    rep = gamma_exponents(4, {1: Fraction(1)}, -7, -23)
    rep = reconcile(rep, mpmath.mpf("-4.15788861278376585"), 1e-6)
    assert rep.unit_power_rational == Fraction(-584)   # (eps_F')^584
    assert rep.residual < 1e-5 * 161 ** 1.5
    assert rep.verified


def test_reconcile_28():
    rep = gamma_exponents(2, {1: Fraction(1)}, -4, -7)
    with mpmath.mp.workdps(30):
        s7 = mpmath.sqrt(7)
        lhs = -(mpmath.mpf(4) / mpmath.sqrt(28)) * mpmath.log((8 + 3 * s7) / (8 - 3 * s7))
    rep = reconcile(rep, lhs, 1e-6)
    assert rep.unit_power_rational == Fraction(4)      # gamma = eps_F^4
    assert rep.residual < 1e-5
    assert rep.verified


def test_reconcile_scaling():
    # doubling pp doubles exponents; residual scale stays verified
    lhs = mpmath.mpf("-4.15788861278376585")
    r1 = reconcile(gamma_exponents(4, {1: Fraction(1)}, -7, -23), lhs, 1e-6)
    r2 = reconcile(gamma_exponents(4, {1: Fraction(2)}, -7, -23), 2 * lhs, 1e-6)
    assert r2.exponents == {k: 2 * v for k, v in r1.exponents.items()}
    assert r2.unit_power_rational == 2 * r1.unit_power_rational
    assert r2.verified
