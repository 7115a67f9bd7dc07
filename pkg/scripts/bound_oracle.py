"""Recompute the frozen bound constants in 50-digit arithmetic.

Theorem-1 style bounds are evaluated from the pre-substitution form (general
temperature factor, explicit tau), not from the simplified closed form that
the package implements. Run: python scripts/bound_oracle.py
"""
import mpmath as mp

mp.mp.dps = 50


def thm1_intermediate(n, p, q, r, nX, nM, C, Rb, eps, s):
    nq = mp.mpf(n * q)
    lam = 2 * nq / (3 * C + 2)
    tau = mp.sqrt(mp.mpf(p + q) / (2 * q * q * p * n * nX**2))
    factor = 1 / (1 - C * lam / (2 * nq * (1 - lam / nq)))
    klog = 0 if r == 0 else 2 * r * (q + p + 2) / lam * mp.log(1 + nM / (tau * mp.sqrt(2 * r)))
    L = mp.log(1 / mp.mpf(eps))
    inner = Rb + L / (nq * s) + nX**2 * q * p * tau**2 + klog + L / lam
    return Rb + factor * inner


def prop1_final(n, p, q, r, nX, nM, Rb, eps, s):
    nq = mp.mpf(n * q)
    k = p + q + 2
    arg = 0 if r == 0 else q * nX * nM * mp.sqrt(n * p) / mp.sqrt((p + q) * r)
    rank = 0 if r == 0 else r * mp.sqrt(k / nq) * mp.log(1 + arg)
    L = mp.log(1 / mp.mpf(eps))
    return 2 * Rb + mp.mpf(p + q) / (2 * nq) + rank + 1 / (4 * mp.sqrt(nq * k)) + (2 + s * mp.sqrt(nq * k)) / (2 * nq * s) * L


def thm2_statement(m, p, q, r, nX, nM, C, Rb, eps, s):
    m = mp.mpf(m)
    arg = 0 if r == 0 else q * nX * nM * mp.sqrt(m * p) / mp.sqrt((p + q) * r)
    rank = 0 if r == 0 else 3 * (3 * C + 2) * r * (q + p + 2) * mp.log(1 + arg) / (2 * m)
    L = mp.log(1 / mp.mpf(eps))
    return 2.5 * Rb + 1.5 * (p + q) / (2 * m) + rank + (6 + 9 * C * s + 6 * s) / (4 * m * s) * L


if __name__ == "__main__":
    base = dict(n=100, p=12, q=8, r=2, nX=mp.sqrt(1200), nM=mp.mpf(5), eps=mp.mpf("0.05"), s=mp.mpf("0.5"))
    print("theorem1 C=1 Rbar=0   ", mp.nstr(thm1_intermediate(C=1, Rb=0, **base), 20))
    print("theorem1 C=2 Rbar=0.05", mp.nstr(thm1_intermediate(C=2, Rb=mp.mpf("0.05"), **base), 20))
    print("proposition1 Rbar=0   ", mp.nstr(prop1_final(Rb=0, **base), 20))
    print("proposition1 Rbar=0.05", mp.nstr(prop1_final(Rb=mp.mpf("0.05"), **base), 20))
    b2 = {k: v for k, v in base.items() if k != "n"}
    print("theorem2 m=800 C=1    ", mp.nstr(thm2_statement(m=800, C=1, Rb=0, **b2), 20))
    print("theorem2 m=560 C=1    ", mp.nstr(thm2_statement(m=560, C=1, Rb=0, **b2), 20))
