"""Independent high-precision double sine for frozen reference values.

Written without importing qkzlab.  It shares the integral representation
with the package but not the method: the package sums a midpoint rule on
a subtracted integrand in double precision, while this evaluates the
plain integral with mpmath's tanh-sinh rule on [0, inf) at a chosen
working precision, after its own shift reduction of Re x into the strip.
"""
import mpmath as mp


def log_s2(x, w1, w2, dps=40):
    """A logarithm of S2(x | w1, w2); only exp() of it is compared."""
    # the subtracted integrand cancels catastrophically as t -> 0: work at twice
    # the precision and use the exact limit below 10^(-dps/2)
    with mp.workdps(2 * dps):
        w1, w2 = mp.mpf(w1), mp.mpf(w2)
        x = mp.mpc(x)
        p, q = min(w1, w2), max(w1, w2)
        W = w1 + w2
        # S2(x) = S2(x + p) * 2 sin(pi x / q)
        acc = mp.mpc(0)
        while mp.re(x) < W / 2 - p / 2:
            acc += mp.log(2 * mp.sin(mp.pi * x / q))
            x += p
        while mp.re(x) > W / 2 + p / 2:
            x -= p
            acc -= mp.log(2 * mp.sin(mp.pi * x / q))
        a = W - 2 * x

        f0 = a * (a * a - w1 * w1 - w2 * w2) / (12 * w1 * w2)
        tiny = mp.mpf(10) ** (-dps // 2)

        def f(t):
            if t < tiny:
                return f0
            return (mp.sinh(a * t) / (2 * mp.sinh(w1 * t) * mp.sinh(w2 * t))
                    - a / (2 * w1 * w2 * t)) / t

        integral = mp.quad(f, [0, 1, 4, 16, mp.inf])
        return acc - integral


def s2(x, w1, w2, dps=40):
    with mp.workdps(dps):
        return mp.exp(log_s2(x, w1, w2, dps))


def agreeing(x, w1, w2, levels=(30, 40, 50)):
    """Value at the highest precision and the relative spread across ``levels``."""
    vals = [s2(x, w1, w2, d) for d in levels]
    spread = max(abs(v - vals[-1]) / abs(vals[-1]) for v in vals)
    return complex(vals[-1]), float(spread)
