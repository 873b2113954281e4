"""Independent reference computations used by the tests.

These deliberately avoid the production code paths they check: the mixture
evaluator goes through the deterministic per-transmittance formulas only, and
the threshold is found by bisection instead of the closed-form root.
"""

import math

from subpoisson.moments import ChannelParams, channel_mean, channel_q


def matched_support(tau_bar, F):
    """Two- or three-point transmittance distribution with the model moments."""
    var = F * (1.0 - tau_bar) * tau_bar
    if var == 0.0:
        return ((tau_bar, 1.0),)
    spread = math.sqrt(var)
    if tau_bar - spread >= 0.0 and tau_bar + spread <= 1.0:
        return ((tau_bar - spread, 0.5), (tau_bar + spread, 0.5))
    return ((0.0, F * (1.0 - tau_bar)), (tau_bar, 1.0 - F), (1.0, F * tau_bar))


def mixture_q(m, n_th, tau_bar, F):
    """Output q of a discrete channel mixture, via per-point propagation only."""
    support = matched_support(tau_bar, F)
    mean_q = mean_n = mean_n_sq = 0.0
    for tau, w in support:
        c = ChannelParams(tau, n_th)
        n_tau = channel_mean(m, c)
        mean_q += w * channel_q(m, c)
        mean_n += w * n_tau
        mean_n_sq += w * n_tau * n_tau
    return mean_q + mean_n_sq - mean_n * mean_n


def bisect_critical(m, n_th, F, iterations=200):
    """Root of the mixture q in [0, 1] by bisection (q > 0 below, < 0 above)."""
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mixture_q(m, n_th, mid, F) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def draw_sub_poissonian(rng, n_max=4.0):
    """Random physical (n_in, q_in) with q_in strictly negative."""
    n = rng.uniform(0.05, n_max)
    q = -rng.uniform(1e-3, 0.999) * n * n
    return n, q
