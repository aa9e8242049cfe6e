#!/usr/bin/env python3
"""Arbitrary-precision reference values for the Mittag-Leffler tests.

Independent of the C++ evaluator: small arguments use the defining power
series in high-precision arithmetic, large arguments use mpmath's tanh-sinh
quadrature of the completely monotone spectral density on (0, inf) in the
original radial variable. Every value where both routes are feasible is
cross-checked. Output is a C++ include file with frozen values.

Usage: python3 ml_oracle.py > ../data/ml_oracle.inc
"""
import sys
import mpmath as mp

DPS = 50


def ml_series(beta, gam, x):
    """E_{beta,gam}(-x) by the power series; precision grows with x."""
    beta, gam, x = mp.mpf(beta), mp.mpf(gam), mp.mpf(x)
    if x == 0:
        return 1 / mp.gamma(gam)
    # largest term is about exp(x^(1/beta)); carry enough guard digits
    guard = int(float(x ** (1 / beta)) / 2.3) + 30
    with mp.workdps(DPS + guard):
        s = mp.mpf(0)
        k = 0
        small = mp.mpf(10) ** (-(DPS + guard))
        while True:
            term = (-x) ** k / mp.gamma(beta * k + gam)
            s += term
            k += 1
            if k > 20 and abs(term) < small * abs(s):
                break
        return +s


def ml_quad(beta, gam, x):
    """E_{beta,gam}(-x) for gam in {1, beta} via the spectral density."""
    beta, x = mp.mpf(beta), mp.mpf(x)
    with mp.workdps(DPS + 20):
        t = x ** (1 / beta)
        sb, cb = mp.sin(beta * mp.pi), mp.cos(beta * mp.pi)

        def dens(r):
            return mp.exp(-r * t) * r ** (beta - 1) * sb / (
                r ** (2 * beta) + 2 * r ** beta * cb + 1) / mp.pi

        pts = sorted(set([mp.mpf(0), 1 / t, mp.mpf(1), mp.mpf(1) / 10 / t,
                          10 / t, mp.inf]))
        if gam == 1:
            return +mp.quad(dens, pts)
        # E_{beta,beta}(-t^beta) = -t^{1-beta} d/dt E_beta(-t^beta)
        return +(t ** (1 - beta) * mp.quad(lambda r: r * dens(r), pts))


def ml(beta, gam_is_beta, x):
    gam = beta if gam_is_beta else 1
    x = mp.mpf(x)
    if x == 0:
        return ml_series(beta, gam, x)
    feasible_series = float(x) ** (1 / beta) < 400
    if feasible_series and float(x) <= 2:
        v = ml_series(beta, gam, x)
        q = ml_quad(beta, 'b' if gam_is_beta else 1, x)
        assert abs(v - q) <= mp.mpf(10) ** -18 * abs(v), (beta, gam, x, v, q)
        return v
    v = ml_quad(beta, 'b' if gam_is_beta else 1, x)
    if feasible_series:
        s = ml_series(beta, gam, x)
        assert abs(v - s) <= mp.mpf(10) ** -18 * abs(v), (beta, gam, x, v, s)
    return v


def kernel_increment(beta, lam, t, a, b):
    beta, lam, t, a, b = map(mp.mpf, (beta, lam, t, a, b))
    with mp.workdps(DPS):
        f = lambda s: (t - s) ** (beta - 1) * ml_series(beta, beta, (t - s) ** beta * lam)
        return mp.quad(f, [a, b])


def main():
    mp.mp.dps = DPS
    out = sys.stdout
    out.write("// Generated by tests/oracle/ml_oracle.py (mpmath, %d digits). Do not edit.\n" % DPS)
    out.write("// columns: beta, gamma_is_beta, x, E_{beta,gamma}(-x)\n")
    xs = [mp.mpf(0)] + [mp.mpf(10) ** (-3 + mp.mpf(6) * i / 58) for i in range(59)]
    for beta in ("0.3", "0.5", "0.8"):
        for gib in (False, True):
            for x in xs:
                v = ml(mp.mpf(beta), gib, x)
                out.write("{%s, %s, %s, %s},\n" % (beta, "true" if gib else "false",
                                                    mp.nstr(x, 20), mp.nstr(v, 20)))
            out.flush()


if __name__ == "__main__":
    if len(sys.argv) > 1 and sys.argv[1] == "extras":
        mp.mp.dps = DPS
        print("E_{1/2}(-1) series:", mp.nstr(ml_series(0.5, 1, 1), 25))
        print("e*erfc(1):        ", mp.nstr(mp.e * mp.erfc(1), 25))
        print("E_0.8(-3):        ", mp.nstr(ml(mp.mpf("0.8"), False, 3), 25))
        print("E_0.8,0.8(-3):    ", mp.nstr(ml(mp.mpf("0.8"), True, 3), 25))
        print("W(0.6,5,1,.25,.5):", mp.nstr(kernel_increment("0.6", 5, 1, "0.25", "0.5"), 25))
        print("1/Gamma(0.7):     ", mp.nstr(1 / mp.gamma(mp.mpf("0.7")), 25))
    else:
        main()
