"""Fourier coefficients of Hecke's weight-one theta series by two routes.

Route one enumerates lattice points on norm hyperbolas through the reduction
window of the unit action (all integer arithmetic, no floating point).  Route
two runs over integral ideals of the right norm and evaluates genus characters
on sqrt supports.  Their agreement on a full coefficient grid is the module's
main correctness guarantee, together with the counting identity
C_chi(mu0) = 2*rho_{K/F}((mu0)) for totally positive mu0.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import mpmath

from .qfield import (
    FieldElem,
    FracIdeal,
    InvalidInputError,
    QuadField,
    _xgcd,
    field,
    ideal_bezout,
    integral_content,
)
from .finquad import FQM, GenusChar, fqm as fqm_of, s_h, sqrt_support_engine

ENUMERATION_CAP = 10 ** 9  # window heights beyond this are refused, not attempted


def _log_epsD(F: QuadField) -> float:
    """log(eps_Delta) computed without float overflow (the unit can be huge)."""
    e = F.eps_Delta()
    x = mpmath.mpf(e.x.numerator) / e.x.denominator
    y = mpmath.mpf(e.y.numerator) / e.y.denominator
    return float(mpmath.log(x + y * mpmath.sqrt(F.D)))


def _window_height(F: QuadField, t_abs: float, den: int, margin: int) -> int:
    """ceil(2 den sqrt(|t| eps_Delta / Delta)) + margin, via logs, with a cap."""
    if t_abs <= 0:
        return margin
    log_v = (math.log(t_abs) + _log_epsD(F)) / 2 + math.log(2 * den) \
        - math.log(F.D) / 2
    if log_v > math.log(ENUMERATION_CAP):
        raise InvalidInputError(
            "lattice enumeration window exceeds the supported size "
            f"(log height {log_v:.1f}); the fundamental unit is too large"
        )
    return int(math.exp(log_v)) + margin


def _canonicalize_orbit(F: QuadField, mu: FieldElem) -> FieldElem:
    """The <eps_Delta>-orbit representative with 1 <= |mu/mu'| < eps_Delta^2."""
    epsD = F.eps_Delta()
    epsD_inv = epsD.inverse()
    one = F.one
    ratio = mu / mu.conj()
    bound = epsD * epsD
    r = ratio if ratio.sign() > 0 else -ratio
    steps = 0
    while r < one:
        mu = mu * epsD
        r = r * bound
        steps += 1
        if steps > 10 ** 5:
            raise RuntimeError("orbit canonicalization loop")
    while r >= bound:
        mu = mu * epsD_inv
        r = r / bound
        steps += 1
        if steps > 10 ** 5:
            raise RuntimeError("orbit canonicalization loop")
    return mu


def solve_norm_in_coset(F: QuadField, lattice: FracIdeal, offset: FieldElem,
                        target: Fraction, window_margin: int = 2):
    """All mu in (offset + lattice) with Nm(mu) = target, one per <eps_Delta>-orbit.

    Every orbit has a representative in the balanced window |mu|, |mu'| <=
    sqrt(|target| * eps_Delta); the returned representatives are canonicalized
    to 1 <= |mu/mu'| < eps_Delta^2 and deduplicated.  Enumeration walks integer
    coordinate pairs: for each admissible omega-coordinate the complementary
    coordinate is pinned by an exact square test, so the cost is linear in the
    window height.  target may be negative.
    """
    D = F.D
    target = Fraction(target)
    if target == 0:
        raise InvalidInputError("zero target norm")
    # write coset elements as (U + V*omega)/den with (U, V) integral
    sa, sb = lattice.basis()
    den = 1
    coords = []
    for e in (sa, sb, offset):
        u, v = e.uv()
        coords.append((u, v))
        d = u.denominator * v.denominator // gcd(u.denominator, v.denominator)
        den = den * d // gcd(den, d)
    (A1, A2), (B1, B2), (U0, V0) = [
        (int(u * den), int(v * den)) for (u, v) in coords
    ]
    # lattice rows (A1, A2), (B1, B2); HNF so that V runs in one progression
    g, p, q = _xgcd(A2, B2)
    if g == 0:
        raise InvalidInputError("degenerate lattice")
    w1 = (p * A1 + q * B1, g)                      # V-step generator
    w0 = ((B2 // g) * A1 - (A2 // g) * B1, 0)      # pure-U generator
    stepU = abs(w0[0])
    assert stepU > 0
    # norm equation: Nm(U + V*omega) = U^2 + D*U*V + psi*V^2 = target * den^2
    T4 = 4 * target * den * den
    if T4.denominator != 1:
        return []  # fractional target has no solutions on this integer model
    T4 = int(T4)
    # window bound: |V| * sqrt(D) / den = |mu - mu'| <= 2 sqrt(|t| epsD)
    vmax = _window_height(F, abs(float(target)), den, window_margin)
    out = {}
    V = V0 % w1[1]
    # iterate V over the progression V0 mod g covering [-vmax, vmax]
    start_k = (-vmax - V) // w1[1]
    end_k = (vmax - V) // w1[1]
    for k in range(start_k, end_k + 1):
        Vk = V + k * w1[1]
        # U^2 + D*U*Vk + psi*Vk^2 = T4/4  ->  (2U + D*Vk)^2 = T4 + D*Vk^2
        s2 = T4 + D * Vk * Vk
        if s2 < 0:
            continue
        s = isqrt(s2)
        if s * s != s2:
            continue
        for sgn in ((s, -s) if s else (s,)):
            twoU = sgn - D * Vk
            if twoU % 2:
                continue
            Uk = twoU // 2
            # coset membership in U: subtract offset and the V-part
            kk = (Vk - V0) // w1[1]
            resU = Uk - U0 - kk * w1[0]
            if resU % stepU:
                continue
            mu = FieldElem.from_uv(D, Fraction(Uk, den), Fraction(Vk, den))
            mu = _canonicalize_orbit(F, mu)
            out[(mu.x, mu.y)] = mu
    return list(out.values())


# ---------------------------------------------------------------------------
# route one: lattice coefficients
# ---------------------------------------------------------------------------

def c_lattice(F: QuadField, a: FracIdeal, m: Fraction, h_elem: FieldElem) -> int:
    """Coefficient of Hecke's cusp form theta_a at q^m, component h.

    Signed count of lambda in (a + h_elem)/<eps_Delta> with Nm(lambda) = Nm(a)*m.
    The coset representative h_elem must lie in a*d^{-1}.
    """
    m = Fraction(m)
    if m <= 0:
        raise InvalidInputError("cusp form coefficients need m > 0")
    sols = solve_norm_in_coset(F, a, h_elem, a.norm() * m)
    return sum(s.sign() for s in sols)


def _minus_coeff(F: QuadField, a: FracIdeal, m: Fraction, h_elem: FieldElem) -> int:
    """Coefficient of the minus-form theta^-_a: Nm(lambda) = -Nm(a)*m."""
    m = Fraction(m)
    if m <= 0:
        raise InvalidInputError("cusp form coefficients need m > 0")
    sols = solve_norm_in_coset(F, a, h_elem, -a.norm() * m)
    return sum(s.sign() for s in sols)


class LatticeRoute:
    """c_chi(n/Delta, h) by direct lattice enumeration.

    For each class representative b (integral, norm n_b coprime to Delta) the
    lattice sum over Nm^-(b) + h is rescaled by n_b: beta = n_b * lambda *
    sqrt(Delta) runs over beta in b^2 with beta = sqrt(Delta) * lift(n_b * h)
    mod d, Nm(beta) = n * n_b^2, counted with sgn(beta) modulo <eps_Delta>.

    The representative set S_F is an explicit input; coefficients of theta_chi
    do not depend on it (tested), the default is the canonical one.
    """

    def __init__(self, Delta: int, reps=None):
        self.F = field(Delta)
        self.fqm = FQM(self.F)
        self.ncg = self.F.narrow_class_group()
        if reps is None:
            reps = self.ncg.reps
        else:
            covered = sorted(self.ncg.resolve(b) for b in reps)
            if covered != list(range(self.ncg.h_plus)):
                raise InvalidInputError("S_F must represent every narrow class once")
            reps = sorted(reps, key=self.ncg.resolve)
            for b in reps:
                n = b.norm()
                if not b.is_integral() or gcd(int(n), self.F.D) != 1:
                    raise InvalidInputError(
                        "S_F members must be integral and coprime to the different"
                    )
        self.reps = list(reps)
        self._class_setup = {}

    def _setup(self, i: int):
        """(n_b, lattice b^2*d, bezout unit u with u in b^2, 1-u in d)."""
        if i not in self._class_setup:
            F = self.F
            b = self.reps[i]
            nb = int(b.norm())
            b2 = b * b
            dd = F.different()
            u, _ = ideal_bezout(b2, dd)
            self._class_setup[i] = (nb, b2 * dd, b2, u)
        return self._class_setup[i]

    def signed_count(self, i: int, n: int, h) -> int:
        """Signed lambda-count for class index i at coefficient (n/Delta, h)."""
        F = self.F
        fqm = self.fqm
        nb, lat, b2, u = self._setup(i)
        # coset target: beta = t mod d with t = sqrt(D)*lift(nb*h), beta in b^2
        t = fqm.lift(fqm.smul(nb, h)) * F.sqrtD
        beta0 = u * t
        sols = solve_norm_in_coset(F, lat, beta0, Fraction(n * nb * nb))
        return sum(s.sign() for s in sols)

    def c_chi(self, chi: GenusChar, n: int, h) -> int:
        if n <= 0:
            raise InvalidInputError("coefficient index n must be positive")
        q = self.fqm.Q(h)
        if (q + Fraction(n, self.F.D)) % 1 != 0:
            return 0
        return sum(
            chi.on_class_index(i) * self.signed_count(i, n, h)
            for i in range(self.ncg.h_plus)
        )

    def c_chi_table(self, chi: GenusChar, n_max: int):
        """Full table {(n, h): c} for 1 <= n <= n_max, one sweep per class.

        Enumerates all beta in b^2 with 0 < Nm(beta) <= n_max * n_b^2 in the
        balanced window, then buckets by (n, coset).
        """
        F = self.F
        fqm = self.fqm
        D = F.D
        table = {}
        for i in range(self.ncg.h_plus):
            cv = chi.on_class_index(i)
            nb, lat, b2, u = self._setup(i)
            nb_inv = pow(nb, -1, fqm.exponent)
            cap = n_max * nb * nb
            for beta in _norm_window_sweep(F, b2, cap):
                nm = beta.norm()
                num = nm / (nb * nb)
                if num.denominator != 1:
                    continue
                n = int(num)
                h = fqm.smul(nb_inv, fqm.from_elem(beta / F.sqrtD))
                key = (n, h)
                table[key] = table.get(key, 0) + cv * beta.sign()
        return {k: v for k, v in table.items() if v}


def _norm_window_sweep(F: QuadField, lattice: FracIdeal, cap: int):
    """All beta in the integral ideal `lattice` with 0 < Nm(beta) <= cap,
    one representative per <eps_Delta>-orbit (canonicalized, deduplicated)."""
    D = F.D
    sa, sb = lattice.basis()
    (A1f, A2f), (B1f, B2f) = sa.uv(), sb.uv()
    A1, A2, B1, B2 = int(A1f), int(A2f), int(B1f), int(B2f)
    g, p, q = _xgcd(A2, B2)
    w1 = (p * A1 + q * B1, g)
    stepU = abs((B2 // g) * A1 - (A2 // g) * B1)
    vmax = _window_height(F, float(cap), 1, 2)
    out = {}
    start_k = -vmax // g
    end_k = vmax // g
    for k in range(start_k, end_k + 1):
        Vk = k * g
        # 0 < (2U + D Vk)^2 - D Vk^2 <= 4 cap
        base = D * Vk * Vk
        lo = isqrt(base)              # smallest s with s^2 > base
        if lo * lo <= base:
            lo += 1
        hi = isqrt(base + 4 * cap)    # largest s with s^2 <= base + 4cap
        for s in range(lo, hi + 1):
            for sg in (s, -s):
                twoU = sg - D * Vk
                if twoU % 2:
                    continue
                Uk = twoU // 2
                resU = Uk - k * w1[0]
                if resU % stepU:
                    continue
                beta = FieldElem.from_uv(D, Uk, Vk)
                nm = beta.norm()
                assert 0 < nm <= 4 * cap
                if nm > cap:
                    continue
                beta = _canonicalize_orbit(F, beta)
                out[(beta.x, beta.y)] = beta
    return out.values()


# ---------------------------------------------------------------------------
# route two: ideal-sum coefficients
# ---------------------------------------------------------------------------

class IdealRoute:
    """c_chi(n/Delta, h) = 2 * s_h * sum over ideals of norm n of chi(sqrt(a, h))."""

    def __init__(self, Delta: int):
        self.F = field(Delta)
        self.fqm = FQM(self.F)
        self.engine = sqrt_support_engine(Delta)

    @lru_cache(maxsize=None)
    def _ideals(self, n: int):
        return tuple(self.F.ideals_of_norm(n))

    def c_chi(self, chi: GenusChar, n: int, h) -> int:
        if n <= 0:
            raise InvalidInputError("coefficient index n must be positive")
        if not chi.odd:
            return 0
        q = self.fqm.Q(h)
        if (q + Fraction(n, self.F.D)) % 1 != 0:
            return 0
        sh = s_h(self.fqm, h)
        if sh == 0:
            return 0
        tot = 0
        for a in self._ideals(n):
            tot += self.engine.chi_of_support(chi, a, h)
        return 2 * sh * tot


@lru_cache(maxsize=None)
def lattice_route(Delta: int) -> LatticeRoute:
    return LatticeRoute(Delta)


@lru_cache(maxsize=None)
def ideal_route(Delta: int) -> IdealRoute:
    return IdealRoute(Delta)


def c_chi_lattice(chi: GenusChar, n: int, h) -> int:
    return lattice_route(chi.Delta).c_chi(chi, n, h)


def c_chi_ideal(chi: GenusChar, n: int, h) -> int:
    return ideal_route(chi.Delta).c_chi(chi, n, h)


# ---------------------------------------------------------------------------
# the divisor sum C_chi
# ---------------------------------------------------------------------------

def C_chi(chi: GenusChar, mu0: FieldElem) -> int:
    """Sum over t | (mu0), t in N, of c_chi(Nm(mu0/t)/Delta, (mu0/t)/sqrt(Delta))."""
    if not mu0.is_integral() or mu0.is_zero():
        raise InvalidInputError("C_chi needs a nonzero integral mu0")
    F = chi.F
    fqm = fqm_of(chi.Delta)
    route = ideal_route(chi.Delta)
    c = integral_content(mu0)
    total = 0
    for t in range(1, c + 1):
        if c % t:
            continue
        mu = mu0 / F.elem(t)
        n = mu.norm()
        if n <= 0 or n.denominator != 1:
            continue  # cusp form: only positive indices contribute
        h = fqm.from_elem(mu / F.sqrtD)
        total += route.c_chi(chi, int(n), h)
    return total


# ---------------------------------------------------------------------------
# JSON export
# ---------------------------------------------------------------------------

def coefficient_table_json(chi: GenusChar, n_max: int) -> str:
    """Coefficient table of theta_chi as a stable JSON document."""
    table = lattice_route(chi.Delta).c_chi_table(chi, n_max)
    entries = [
        {"n": n, "h": [h[0], h[1]], "c": c}
        for (n, h), c in sorted(table.items())
    ]
    doc = {
        "Delta": chi.Delta,
        "chi": [chi.Delta1, chi.Delta2],
        "n_max": n_max,
        "entries": entries,
    }
    return json.dumps(doc, indent=1)
