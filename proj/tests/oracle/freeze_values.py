"""Reference values frozen into the C++ tests.

Each p-mean is the root of E[(X-a)_+^(p-1)] = E[(a-X)_+^(p-1)] evaluated
with mpmath at 30 digits.  Infinite halves are integrated in s with
|x - a| = e^s, which turns algebraic tails into exponential ones; finite
halves are split at the bulk of the density.  Run with `python3
freeze_values.py`; the printed numbers are pasted into tests/support/frozen.hpp.
"""

import mpmath as mp

mp.mp.dps = 30


def s_nodes(s_max):
    nodes = [-60 + 2 * i for i in range(31)]
    while nodes[-1] < s_max:
        nodes.append(nodes[-1] + 5)
    return nodes


def log_half(pdf, a, p, side, s_max):
    return mp.quad(lambda s: mp.exp(s) ** p * pdf(a + side * mp.exp(s)), s_nodes(s_max))


# e^s_max must reach where the tail weight is negligible; algebraic tails need
# s in the hundreds.
def halves(pdf, a, p, lower, upper, marks, s_max):
    if upper == mp.inf:
        u = log_half(pdf, a, p, 1, s_max)
    else:
        u = mp.quad(lambda x: (x - a) ** (p - 1) * pdf(x), [a] + [m for m in marks if a < m < upper] + [upper])
    if lower == -mp.inf:
        l = log_half(pdf, a, p, -1, s_max)
    else:
        l = mp.quad(lambda x: (a - x) ** (p - 1) * pdf(x), [lower] + [m for m in marks if lower < m < a] + [a])
    return u, l


def pmean(pdf, p, lower, upper, marks, guess, s_max=6):
    def g(a):
        u, l = halves(pdf, a, p, lower, upper, marks, s_max)
        return (u - l) / (u + l)

    return mp.findroot(g, guess, tol=mp.mpf(10) ** -36)


def levy_pdf(x):
    if x <= 0:
        return mp.mpf(0)
    return mp.sqrt(1 / (2 * mp.pi)) * mp.exp(-1 / (2 * x)) / x ** mp.mpf(1.5)


def chi2_pdf(k):
    c = 1 / (mp.mpf(2) ** (mp.mpf(k) / 2) * mp.gamma(mp.mpf(k) / 2))
    return lambda x: c * x ** (mp.mpf(k) / 2 - 1) * mp.exp(-x / 2) if x > 0 else mp.mpf(0)


def skew_normal_pdf(alpha):
    return lambda x: 2 * mp.npdf(x) * mp.ncdf(alpha * x)


def log_logistic_pdf(beta):
    return lambda x: beta * x ** (beta - 1) / (1 + x**beta) ** 2 if x > 0 else mp.mpf(0)


def weibull_pdf(k):
    return lambda x: k * x ** (k - 1) * mp.exp(-(x**k)) if x > 0 else mp.mpf(0)


def main():
    inf = mp.inf
    marks = [mp.mpf(10) ** e for e in range(-2, 13)]
    print("levy nu_1.2  ", mp.nstr(pmean(levy_pdf, mp.mpf("1.2"), 0, inf, marks, 4.5, 400), 17), flush=True)
    print("levy nu_1.4  ", mp.nstr(pmean(levy_pdf, mp.mpf("1.4"), 0, inf, marks, 24, 1000), 17), flush=True)
    print("chi2(5) nu_3 ", mp.nstr(pmean(chi2_pdf(5), 3, 0, inf, [1, 5, 20, 60], 5.2), 17), flush=True)
    print("chi2(5) nu_1 ", mp.nstr(pmean(chi2_pdf(5), 1, 0, inf, [1, 5, 20, 60], 4.3), 17), flush=True)
    print("skewnormal(5) nu_3", mp.nstr(pmean(skew_normal_pdf(5), 3, -inf, inf, [-5, 0, 1, 5], 0.8), 17), flush=True)
    print("skewnormal(5) nu_1", mp.nstr(pmean(skew_normal_pdf(5), 1, -inf, inf, [-5, 0, 1, 5], 0.67), 17), flush=True)
    print("loglogistic(1.5) nu_2", mp.nstr(pmean(log_logistic_pdf(mp.mpf("1.5")), 2, 0, inf, marks, 2.4, 120), 17), flush=True)
    print("weibull(0.5) nu_1.5", mp.nstr(pmean(weibull_pdf(mp.mpf("0.5")), mp.mpf("1.5"), 0, inf, [1, 10, 100], 1.0, 8), 17), flush=True)
    print("weibull(2) nu_4", mp.nstr(pmean(weibull_pdf(2), 4, 0, inf, [1, 3, 6], 0.95), 17), flush=True)


if __name__ == "__main__":
    main()
