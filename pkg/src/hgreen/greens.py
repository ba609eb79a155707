"""Numerical evaluation of higher Green's functions at CM points.

g_k(z1, z2) = -2 Q_{k-1}(cosh d(z1, z2)) is summed over PSL_2(Z)-translates of
the second variable; Hecke translates sum the same kernel over integral
matrices of determinant m modulo +-1, organized as upper-triangular coset
representatives composed with the full PSL_2(Z) sum.

Truncation is adaptive: all terms with cosh distance below a bound T are
enumerated exactly, T doubles until the partial sums stabilize to the
requested tolerance (witnessed twice).  A smoothed tail estimate, computed
from the measured local density of orbit points against the exact integral of
Q_{k-1}, accelerates convergence and is reported in the diagnostics.

Arithmetic is hybrid: orbit enumeration and the bulk of the sum run in IEEE
doubles (descending-series evaluation of Q, no cancellation for cosh > 2),
while every term with cosh distance below an upgrade threshold is recomputed
with mpmath at the configured working precision.  Pure-double rounding enters
only through terms smaller than ~1e-13, far below the supported tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd

import mpmath
from mpmath import mpf, mpc

from .qfield import InvalidInputError, is_fundamental_discriminant
from .mforms import check_principal_part


class SingularConfigurationError(ValueError):
    """The evaluation point lies on (or too close to) the singular locus."""


# ---------------------------------------------------------------------------
# CM points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CMPoint:
    """Reduced positive definite form (A, B, C), root z = (-B + i sqrt|d|)/(2A)."""

    A: int
    B: int
    C: int

    @property
    def disc(self) -> int:
        return self.B * self.B - 4 * self.A * self.C

    def z(self) -> mpc:
        d = -self.disc
        return mpc(mpf(-self.B), mpmath.sqrt(mpf(d))) / (2 * self.A)

    def __repr__(self):
        return f"CM({self.A},{self.B},{self.C})"


def unit_weight(d: int) -> int:
    """Number of units of the imaginary quadratic order: 4, 6, or 2."""
    if d == -4:
        return 4
    if d == -3:
        return 6
    return 2


def cm_points(d: int):
    """All reduced primitive forms of fundamental discriminant d < 0."""
    if d >= 0 or not is_fundamental_discriminant(d):
        raise InvalidInputError(f"{d} is not a negative fundamental discriminant")
    out = []
    b = d % 2
    while b * b <= -d // 3:
        t = b * b - d
        if t % 4 == 0:
            ac = t // 4
            a = max(b, 1)
            while a * a <= ac:
                if a >= b and ac % a == 0:
                    c = ac // a
                    if gcd(gcd(a, b), c) == 1:
                        out.append(CMPoint(a, b, c))
                        if 0 < b < a < c:
                            out.append(CMPoint(a, -b, c))
                a += 1
        b += 2
    return sorted(out, key=lambda P: (P.A, P.B, P.C))


def class_number(d: int) -> int:
    return len(cm_points(d))


# ---------------------------------------------------------------------------
# Legendre function of the second kind
# ---------------------------------------------------------------------------

T_SWITCH = 2.0


def _legendre_p_values(n: int, t):
    """[P_0(t), ..., P_n(t)] by the three-term recurrence (mp or float)."""
    vals = [t * 0 + 1]
    if n >= 1:
        vals.append(t)
    for j in range(1, n):
        vals.append(((2 * j + 1) * t * vals[j] - j * vals[j - 1]) / (j + 1))
    return vals


def _q_series_coeffs(n: int, terms: int):
    """Fractions a_j of the descending expansion Q_n(t) = lead * t^{-n-1} sum a_j t^{-2j}."""
    out = [Fraction(1)]
    for j in range(terms - 1):
        num = (Fraction(n, 2) + 1 + j) * (Fraction(n + 1, 2) + j)
        den = (Fraction(n) + Fraction(3, 2) + j) * (j + 1)
        out.append(out[-1] * num / den)
    return out


def _q_lead(n: int) -> Fraction:
    return Fraction(2 ** n * math.factorial(n) ** 2, math.factorial(2 * n + 1))


_MP_COEFF_CACHE = {}


def _q_coeffs_mpf(n: int, dps: int, count: int):
    """At least `count` series coefficients of Q_n as mpf at dps digits."""
    key = (n, dps)
    have = _MP_COEFF_CACHE.get(key)
    if have is None or len(have[0]) < count:
        fracs = _q_series_coeffs(n, max(count, 16))
        with mpmath.mp.workdps(dps):
            vals = [mpf(a.numerator) / a.denominator for a in fracs]
            lead = mpf(_q_lead(n).numerator) / _q_lead(n).denominator
        have = (vals, lead)
        _MP_COEFF_CACHE[key] = have
    return have


def legendre_Q(n: int, t, dps: int | None = None):
    """Q_n(t) for real t > 1 at the current (or given) mpmath precision.

    Closed form  Q_n = (P_n/2) log((t+1)/(t-1)) - sum_{m=1}^n P_{m-1}P_{n-m}/m
    for t <= 2; descending series in 1/t^2 beyond (the closed form cancels
    catastrophically for large t while the series loses accuracy near 1).
    """
    if n < 0:
        raise InvalidInputError("legendre_Q needs n >= 0")
    ctx = mpmath.mp
    with ctx.workdps(dps or ctx.dps):
        t = mpf(t) if not isinstance(t, (mpf, mpc)) else t
        if t <= 1:
            raise SingularConfigurationError(f"legendre_Q needs t > 1, got {t}")
        if t <= T_SWITCH:
            pv = _legendre_p_values(n, t)
            s = pv[n] / 2 * mpmath.log((t + 1) / (t - 1))
            for m in range(1, n + 1):
                s -= pv[m - 1] * pv[n - m] / m
            return +s
        # number of series terms: (1/t^2)^j < 10^-dps with t > 2
        inv2 = 1 / (t * t)
        need = int(ctx.dps / (2 * math.log10(float(t)))) + 4
        coeffs, lead = _q_coeffs_mpf(n, ctx.dps, need)
        acc = mpf(0)
        for a in reversed(coeffs[:need]):
            acc = acc * inv2 + a
        return +(lead * t ** (-(n + 1)) * acc)


def _q_series_ratio(n, j):
    return ((Fraction(n, 2) + 1 + j) * (Fraction(n + 1, 2) + j)) / (
        (Fraction(n) + Fraction(3, 2) + j) * (j + 1)
    )


def legendre_Q_integral(n: int, T, dps: int | None = None):
    """Integral of Q_n over [T, infinity), T > max(2, 1); by termwise series."""
    ctx = mpmath.mp
    with ctx.workdps(dps or ctx.dps):
        T = mpf(T)
        assert T > T_SWITCH
        lead = _q_lead(n)
        eps = mpf(10) ** (-(ctx.dps + 5))
        acc = mpf(0)
        aj = Fraction(1)
        j = 0
        while True:
            p = n + 2 * j  # integral of t^{-n-1-2j} is T^{-n-2j}/(n+2j)
            term = mpf(aj.numerator) / aj.denominator * T ** (-p) / p
            acc += term
            if abs(term) < eps * abs(acc):
                break
            aj = aj * _q_series_ratio(n, j)
            j += 1
            if j > 10000:
                raise RuntimeError("Q tail integral did not converge")
        return +(mpf(lead.numerator) / lead.denominator * acc)


def _q_float_factory(n: int, terms: int = 12):
    """Vectorized float64 Q_n(t) for t > T_SWITCH via the descending series."""
    import numpy as np

    coeffs = [float(a) for a in _q_series_coeffs(n, terms)]
    lead = float(_q_lead(n))

    def qf(t):
        inv2 = 1.0 / (t * t)
        acc = np.full_like(t, coeffs[-1])
        for c in coeffs[-2::-1]:
            acc = acc * inv2 + c
        return lead * t ** (-(n + 1)) * acc

    return qf


# ---------------------------------------------------------------------------
# the hyperbolic kernel
# ---------------------------------------------------------------------------

def cosh_distance(z1: mpc, z2: mpc):
    return 1 + abs(z1 - z2) ** 2 / (2 * z1.imag * z2.imag)


def g_k(z1, z2, k: int, dps: int | None = None):
    """g_k(z1, z2) = -2 Q_{k-1}(cosh d(z1, z2)); symmetric, singular on z1=z2."""
    ctx = mpmath.mp
    with ctx.workdps(dps or ctx.dps):
        z1, z2 = mpc(z1), mpc(z2)
        t = cosh_distance(z1, z2)
        if t <= 1 + mpf(10) ** -10:
            raise SingularConfigurationError("g_k evaluated on the diagonal")
        return -2 * legendre_Q(k - 1, t)


# ---------------------------------------------------------------------------
# orbit sums
# ---------------------------------------------------------------------------

@dataclass
class GreenParams:
    """Evaluation parameters; tolerance must respect the working precision."""

    k: int = 2
    tol: float = 1e-8
    digits: int = 30
    upgrade_cosh: float = 64.0
    smooth_tail: bool = True
    initial_T: float = 400.0
    max_doublings: int = 28

    def __post_init__(self):
        if self.k < 2 or self.k % 2 != 0:
            raise InvalidInputError("k must be an even integer >= 2")
        if self.digits < 15:
            raise InvalidInputError("working precision must be >= 15 digits")
        if self.tol < 10.0 ** (1 - self.digits):
            raise InvalidInputError("tolerance below working precision")
        if self.upgrade_cosh < 4:
            raise InvalidInputError("upgrade threshold must be >= 4")


class _PairOrbitSum:
    """Sum of g_k(z1, gamma*w) over gamma in PSL_2(Z) for one point pair.

    Enumerates Gamma_infinity-cosets (c, d) and integer translates; for each
    term the cosh distance depends on the coset through u = Re(gamma*w) mod 1
    and v = Im(gamma*w).  Matrices realizing small cosh values are retained so
    the dominant terms can be recomputed at full precision.
    """

    def __init__(self, z1: mpc, w: mpc, k: int, params: GreenParams):
        import numpy as np

        self.np = np
        self.z1 = z1
        self.w = w
        self.k = k
        self.params = params
        self.x1f, self.y1f = float(z1.real), float(z1.imag)
        self.uf, self.vf = float(w.real), float(w.imag)
        self.qf = _q_float_factory(k - 1)
        self._inv_cache = {}

    # -- coset data ---------------------------------------------------------
    def _inv_table(self, c: int):
        tab = self._inv_cache.get(c)
        if tab is None:
            tab = self.np.zeros(c, dtype=self.np.int64)
            for r in range(c):
                if gcd(r, c) == 1:
                    tab[r] = pow(r, -1, c)
            self._inv_cache[c] = tab
        return tab

    def _terms_below(self, T: float):
        """(count, float_sum_of_Q, upgrade_list) over all terms with cosh <= T.

        upgrade_list holds (coset c, d, translate j) for cosh <= upgrade bound.
        """
        np = self.np
        x1, y1 = self.x1f, self.y1f
        u0, v0 = self.uf, self.vf
        up = self.params.upgrade_cosh
        if T <= up:
            T = up * 1.0001
        count = 0
        qsum = 0.0
        upgrades = []
        chunks = []

        # v-window: terms need Im(gamma w) >= vmin
        vmin = y1 * (T - math.sqrt(T * T - 1))
        X = v0 / vmin  # |c w + d|^2 <= X
        cmax = int(math.sqrt(X) / v0) + 1

        for c in range(0, cmax + 1):
            if c == 0:
                count += self._accumulate([u0], [v0], T, [(0, 1)], upgrades, chunks)
                continue
            # d-range: (c*u0 + d)^2 <= X - (c*v0)^2
            rad2 = X - (c * v0) ** 2
            if rad2 <= 0:
                continue
            rad = math.sqrt(rad2)
            dlo = math.ceil(-c * u0 - rad)
            dhi = math.floor(-c * u0 + rad)
            if dlo > dhi:
                continue
            d = np.arange(dlo, dhi + 1, dtype=np.int64)
            d = d[np.gcd(d, c) == 1]
            if d.size == 0:
                continue
            inv = self._inv_table(c)
            a = inv[d % c]
            denom2 = (c * u0 + d).astype(np.float64) ** 2 + (c * v0) ** 2
            v = v0 / denom2
            u = a.astype(np.float64) / c - (c * u0 + d) / (c * denom2)
            count += self._accumulate(
                u, v, T, list(zip([c] * len(d), d.tolist())), upgrades, chunks
            )
            # flush the Q evaluation periodically to bound memory
            if sum(ch.size for ch in chunks) > 2 ** 21:
                qsum += float(self.qf(np.concatenate(chunks)).sum())
                chunks.clear()
        if chunks:
            qsum += float(self.qf(np.concatenate(chunks)).sum())
        return count, qsum, upgrades

    def _accumulate(self, u, v, T, coset_ids, upgrades, chunks) -> int:
        """Translate windows for a batch of cosets, fully vectorized.

        Returns the term count; arguments above the upgrade threshold go to
        `chunks` for a batched Q evaluation, the rest are recorded with their
        matrix data for the mpmath pass.
        """
        np = self.np
        x1, y1 = self.x1f, self.y1f
        up = self.params.upgrade_cosh
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        gap = (y1 - v) ** 2
        r2 = 2 * y1 * v * (T - 1) - gap
        ok = r2 > 0
        if not ok.any():
            return 0
        idxs = np.nonzero(ok)[0]
        vv = v[idxs]
        center = x1 - u[idxs]
        r = np.sqrt(r2[idxs])
        jlo = np.ceil(center - r)
        jhi = np.floor(center + r)
        lens = (jhi - jlo + 1).astype(np.int64)
        keep = lens > 0
        if not keep.any():
            return 0
        idxs, vv, center, jlo, lens = (
            idxs[keep], vv[keep], center[keep], jlo[keep], lens[keep]
        )
        gapk = gap[idxs]
        total = int(lens.sum())
        starts = np.concatenate(([0], np.cumsum(lens)[:-1]))
        flat = np.arange(total, dtype=np.float64)
        flat -= np.repeat(starts, lens)
        flat += np.repeat(jlo, lens)
        fc = np.repeat(center, lens)
        fv = np.repeat(vv, lens)
        t = 1 + ((fc - flat) ** 2 + np.repeat(gapk, lens)) / (2 * y1 * fv)
        small = t <= up
        if small.any():
            tmin = float(t[small].min())
            owner = np.repeat(idxs, lens)
            if tmin <= 1 + 1e-10:
                bad = int(np.argmin(t))
                cid = coset_ids[int(owner[bad])]
                raise SingularConfigurationError(
                    f"singular configuration at coset {cid}, translate "
                    f"{int(flat[bad])}"
                )
            for pos in np.nonzero(small)[0]:
                cid = coset_ids[int(owner[pos])]
                upgrades.append((cid[0], int(cid[1]), int(flat[pos])))
            t = t[~small]
        if t.size:
            chunks.append(t)
        return total

    # -- precise evaluation of retained terms --------------------------------
    def _upgrade_sum(self, upgrades):
        z1 = self.z1
        w = self.w
        k = self.k
        total = mpf(0)
        for (c, d, j) in upgrades:
            if c == 0:
                mat = (1, j, 0, 1)
                gz = w + j
            else:
                a = pow(d % c, -1, c)
                b = (a * d - 1) // c
                mat = (a + j * c, b + j * d, c, d)
                gz = (a * w + b) / (c * w + d) + j
            t = cosh_distance(z1, gz)
            if t <= 1 + mpf(10) ** -10:
                raise SingularConfigurationError(
                    f"singular configuration at matrix "
                    f"({mat[0]},{mat[1]};{mat[2]},{mat[3]})"
                )
            total += legendre_Q(k - 1, t)
        return total

    # -- adaptive evaluation ---------------------------------------------------
    def evaluate(self):
        """(value, diagnostics) with the doubling convergence witness."""
        p = self.params
        T = max(p.initial_T, p.upgrade_cosh * 4)
        prev_S = None
        prev_count = 0
        prev_T = 1.0
        stable = 0
        history = []
        for it in range(p.max_doublings):
            count, qsum_f, upgrades = self._terms_below(T)
            qsum = self._upgrade_sum(upgrades) + qsum_f
            S = -2 * qsum
            tail = mpf(0)
            if p.smooth_tail and count > prev_count:
                density = (count - prev_count) / (T - prev_T)
                tail = -2 * density * legendre_Q_integral(self.k - 1, T)
            S_corr = S + tail
            history.append(
                {"T": T, "terms": count, "partial": float(S), "tail": float(tail)}
            )
            if prev_S is not None and abs(S_corr - prev_S) < p.tol / 10:
                stable += 1
                if stable >= 2:
                    return S_corr, {
                        "pair_T": T,
                        "terms": count,
                        "history": history,
                        "converged": True,
                    }
            else:
                stable = 0
            prev_S = S_corr
            prev_count = count
            prev_T = T
            T *= 2
        return prev_S, {
            "pair_T": T / 2,
            "terms": prev_count,
            "history": history,
            "converged": False,
        }


def _hecke_cosets(m: int):
    """Upper-triangular representatives (a, b, d), ad = m, 0 <= b < d."""
    out = []
    for a in range(1, m + 1):
        if m % a:
            continue
        d = m // a
        for b in range(d):
            out.append((a, b, d))
    return out


def G_k_hecke(z1, z2, k: int, m: int, params: GreenParams | None = None):
    """G_k | T_m (z1, z2): sum over integral matrices of determinant m mod +-1.

    Returns (value, diagnostics).  For m = 1 this is G_k(z1, z2).
    """
    params = params or GreenParams(k=k)
    if params.k != k:
        params = replace(params, k=k)
    if m < 1:
        raise InvalidInputError("Hecke index m must be >= 1")
    with mpmath.mp.workdps(params.digits):
        z1 = mpc(z1)
        z2 = mpc(z2)
        total = mpf(0)
        diag = {"cosets": [], "converged": True}
        for (a, b, d) in _hecke_cosets(m):
            w = (a * z2 + b) / d
            val, pd = _PairOrbitSum(z1, w, k, params).evaluate()
            total += val
            diag["cosets"].append({"coset": [a, b, d], **pd})
            diag["converged"] = diag["converged"] and pd["converged"]
        return +total, diag


def G_kf_at_cycle(k: int, pp, d1: int, d2: int,
                  params: GreenParams | None = None):
    """G_{k,f}(Z_chi) = (4/(w1 w2)) sum over CM pairs and principal part terms.

    pp maps m to c_f(-m); the cycle runs over all pairs of reduced CM points of
    the coprime fundamental discriminants d1, d2 < 0.
    """
    params = params or GreenParams(k=k)
    if d1 >= 0 or d2 >= 0:
        raise InvalidInputError("discriminants must be negative")
    if gcd(d1, d2) != 1:
        raise InvalidInputError("discriminants must be coprime")
    obstruction = check_principal_part(k, pp)
    if obstruction is not None:
        raise InvalidInputError(
            f"principal part obstructed by S_{2*k}: {obstruction}"
        )
    pts1 = cm_points(d1)
    pts2 = cm_points(d2)
    w1 = unit_weight(d1)
    w2 = unit_weight(d2)
    with mpmath.mp.workdps(params.digits):
        weight = mpf(4) / (w1 * w2)
        total = mpf(0)
        diags = []
        converged = True
        for P1 in pts1:
            for P2 in pts2:
                zz1, zz2 = P1.z(), P2.z()
                for m, c in sorted(pp.items()):
                    val, pd = G_k_hecke(zz1, zz2, k, m, params)
                    cf = Fraction(c)
                    total += (mpf(cf.numerator) / cf.denominator
                              * mpf(m) ** (k - 1) * val)
                    converged = converged and pd["converged"]
                    diags.append({
                        "pair": [repr(P1), repr(P2)], "m": m,
                        "value": float(val),
                        "converged": pd["converged"],
                        "terms": sum(cd["terms"] for cd in pd["cosets"]),
                    })
        return +(weight * total), {
            "pairs": len(pts1) * len(pts2),
            "weight": float(weight),
            "converged": converged,
            "per_pair": diags,
        }
