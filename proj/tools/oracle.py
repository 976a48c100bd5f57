"""Independent Python re-implementation used to freeze tests/fixtures.hpp.

The seeded sigma* fixture is a C++ run and is not reproduced here.

Plain loops, no shared code with the C++ engine. Run from the repo root:
    python3 tools/oracle.py
"""

import math

from scipy import integrate, optimize, stats


def devaluation(h, a, c):
    return 1 - (1 + h - a) / (1 + c)


def total(i66, i86, geometric=False):
    if geometric:
        return sum(i66 * (i86 / i66) ** (k / 20) for k in range(20))
    return sum(i66 + (i86 - i66) * k / 20 for k in range(20))


def incomes(age, salary, c, old, d, af, lead=1, g=0.04, dcg=0.0477, dcr=0.20):
    # `lead` years of accrual on the old rules before the reform.
    T = 66 - age + lead
    db66 = db86 = dc = 0.0
    for t in range(math.ceil(T - 1e-12)):
        w = min(1.0, T - t)
        pay = salary * ((1 + g) / (1 + c)) ** (t - lead)
        baseline = old or t < lead
        thr = 60000 if baseline else 40000 * (1 - d) ** max(0, t - lead)
        tranche = w * min(pay, thr) / (75 if baseline else 85)
        dd = 0 if baseline else d
        db66 += tranche * (1 - dd) ** (T - t)
        db86 += tranche * (1 - dd) ** (T - t + 20)
        dc += w * dcr * max(0.0, pay - thr) * ((1 + dcg) / (1 + c)) ** (T - t - w)
    return db66 + dc / af, db86 + dc / af


def cell(age, salary, c=0.028, d=0.008, af=56.7):
    old = total(*incomes(age, salary, c, True, d, af))
    new = total(*incomes(age, salary, c, False, d, af))
    return (old - new) / old, old - new


def one_year(age, salary, c, d, af, delay=0, dcr=0.20, dcg=0.0477):
    T = 66 - age
    grow = ((1 + dcg) / (1 + c)) ** (T - 1)
    old = min(salary, 60000) / 75 + dcr * max(0, salary - 60000) * grow / af
    db = min(salary, 40000) / 85
    dc = dcr * max(0, salary - 40000) * grow / af
    ex = max(0, T - delay)
    new = total(db * (1 - d) ** ex + dc, db * (1 - d) ** (ex + 20) + dc)
    return 1 - new / total(old, old)


def sigma_star(h=0.025, c=0.025, target=0.005):
    def d(sigma):
        # uplift is min(x, h), floored at 0 for negative CPI
        f = lambda x: (math.log(1 + max(0.0, min(x, h))) - math.log(1 + x)) * stats.norm.pdf(x, c, sigma)
        e, _ = integrate.quad(f, c - 12 * sigma, c + 12 * sigma, points=[0.0, h], limit=200)
        return 1 - math.exp(e)

    return optimize.brentq(lambda s: d(s) - target, 1e-4, 0.05, xtol=1e-10)


if __name__ == "__main__":
    print("kGeometricTotal_1000_500", repr(total(1000, 500, geometric=True)))
    print("kSigmaStarQuadrature", round(sigma_star(), 6))
    print("kOneYear40", repr(one_year(40, 40000, 0.025, 0.005, 40)))
    print("kOneYear40Delay2", repr(one_year(40, 40000, 0.025, 0.005, 40, delay=2)))
    print("kCell42_52500", repr(cell(42.5, 52500)[0]))
    print("kCell37_27500", repr(cell(37.5, 27500)[0]))
    print("kCell52_67500_money", repr(cell(52.5, 67500)[1]))
    print("kDob1985_30000", repr(cell(36.5, 30000)[0]))
