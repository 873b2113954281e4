"""Closed-form photon-number moment algebra for the thermal-loss channel.

The channel couples a single light mode to a thermal environment mode on a
beam splitter of transmittance ``tau``; the environment carries ``n_th``
thermal photons on average.  Everything here is expressed through two numbers
per state: the mean photon number ``n`` and the q-parameter

    q = <n^2> - <n>^2 - <n>,

which is negative exactly when the photon statistics are sub-Poissonian.

Moment propagation through the deterministic channel:

    n(tau) = tau*n_in + (1 - tau)*n_th
    q(tau) = tau^2*q_in + (1 - tau)^2*n_th^2 + 2*tau*(1 - tau)*n_in*n_th

When the transmittance fluctuates with mean ``tau_bar`` and variance
``Var = F*(1 - tau_bar)*tau_bar`` (fluctuation strength ``F`` in [0, 1]),
the output q-parameter depends on the transmittance distribution only through
those two moments and reduces to a quadratic in ``tau_bar``:

    q_out(tau_bar) = tau_bar^2*(q_in - a) + tau_bar*(a - n_th^2) + n_th^2
    g = q_in - n_in^2 + 2*(n_in - n_th)^2
    a = 2*n_in*n_th - n_th^2 + g*F

For sub-Poissonian input (``q_in < 0``) the output stays sub-Poissonian iff
``tau_bar`` exceeds the critical transmittance, the root of ``q_out`` in
[0, 1] solved by :func:`critical_transmittance`.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InternalConsistencyError

# Closed-form identities are pinned at 1e-12; tau_c excursions beyond [0, 1]
# up to this size are numeric noise and clamped, anything larger is an error.
CLAMP_TOL = 1e-12

# Slack for the physicality bound q >= -n^2 (absorbs roundoff in the
# state-catalog closed forms at the boundary).
_BOUND_SLACK = 1e-12


def _require_finite(value: float, name: str) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


@dataclass(frozen=True)
class InputMoments:
    """Mean photon number and q-parameter of an input state.

    Physicality requires ``n_in >= 0`` and ``q_in >= -n_in**2`` (the latter is
    ``<a+ a+ a a> >= 0``); both are enforced on construction.
    """

    n_in: float
    q_in: float

    def __post_init__(self):
        n = _require_finite(self.n_in, "n_in")
        q = _require_finite(self.q_in, "q_in")
        if n < 0.0:
            raise DomainError(f"n_in must be >= 0, got {n}")
        bound = -n * n
        if q < bound - _BOUND_SLACK * max(1.0, n * n):
            raise DomainError(f"q_in={q} violates the physical bound q_in >= -n_in^2 = {bound}")
        object.__setattr__(self, "n_in", n)
        object.__setattr__(self, "q_in", q)

    @property
    def is_sub_poissonian(self) -> bool:
        return self.q_in < 0.0


@dataclass(frozen=True)
class ChannelParams:
    """Deterministic channel: transmittance ``tau`` and thermal occupancy ``n_th``."""

    tau: float
    n_th: float

    def __post_init__(self):
        tau = _require_finite(self.tau, "tau")
        n_th = _require_finite(self.n_th, "n_th")
        if not 0.0 <= tau <= 1.0:
            raise DomainError(f"tau must be in [0, 1], got {tau}")
        if n_th < 0.0:
            raise DomainError(f"n_th must be >= 0, got {n_th}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "n_th", n_th)


@dataclass(frozen=True)
class FluctuationModel:
    """Fluctuating transmittance with mean ``tau_bar`` and strength ``F``.

    The variance is parameterized as ``Var(tau) = F*(1 - tau_bar)*tau_bar``,
    which saturates the bound ``Var <= (1 - tau_bar)*tau_bar`` at ``F = 1``.
    Only these two moments of the transmittance distribution matter for the
    output q-parameter.
    """

    tau_bar: float
    F: float

    def __post_init__(self):
        tau_bar = _require_finite(self.tau_bar, "tau_bar")
        F = _require_finite(self.F, "F")
        if not 0.0 <= tau_bar <= 1.0:
            raise DomainError(f"tau_bar must be in [0, 1], got {tau_bar}")
        if not 0.0 <= F <= 1.0:
            raise DomainError(f"F must be in [0, 1], got {F}")
        object.__setattr__(self, "tau_bar", tau_bar)
        object.__setattr__(self, "F", F)

    @property
    def variance(self) -> float:
        return self.F * (1.0 - self.tau_bar) * self.tau_bar

    def support(self) -> tuple[tuple[float, float], ...]:
        """A discrete transmittance distribution matching (mean, variance).

        Returns ``((tau_i, weight_i), ...)`` with support inside [0, 1].
        Prefers the symmetric two-point distribution ``tau_bar +/- sqrt(Var)``;
        when that leaves [0, 1], falls back to the three-point distribution on
        ``{0, tau_bar, 1}`` with weights ``{F*(1 - tau_bar), 1 - F, F*tau_bar}``,
        which matches the same two moments for every valid (tau_bar, F).
        """
        var = self.variance
        if var == 0.0:
            return ((self.tau_bar, 1.0),)
        spread = math.sqrt(var)
        lo, hi = self.tau_bar - spread, self.tau_bar + spread
        if lo >= 0.0 and hi <= 1.0:
            return ((lo, 0.5), (hi, 0.5))
        return (
            (0.0, self.F * (1.0 - self.tau_bar)),
            (self.tau_bar, 1.0 - self.F),
            (1.0, self.F * self.tau_bar),
        )


_NO_THRESHOLD = "no_threshold"
_ALWAYS_SUB = "always_sub"
_CRITICAL = "critical"


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of the critical-transmittance solver.

    ``kind`` is one of ``"critical"`` (finite threshold, ``tau_c`` set),
    ``"always_sub"`` (output sub-Poissonian for every tau_bar > 0; ``tau_c``
    is 0), or ``"no_threshold"`` (input is not sub-Poissonian, the question is
    undefined and ``tau_c`` is None).
    """

    kind: str
    tau_c: float | None

    @classmethod
    def critical(cls, tau_c: float) -> "ThresholdResult":
        return cls(_CRITICAL, tau_c)

    @classmethod
    def always_sub(cls) -> "ThresholdResult":
        return cls(_ALWAYS_SUB, 0.0)

    @classmethod
    def no_threshold(cls) -> "ThresholdResult":
        return cls(_NO_THRESHOLD, None)

    @property
    def has_threshold(self) -> bool:
        return self.tau_c is not None


@dataclass(frozen=True)
class DerivedStatistics:
    """Mandel Q, Fano factor and g2(0) derived from one (q, n) pair."""

    mandel_q: float
    fano: float
    g2_zero: float


def thermal_occupancy(beta_hbar_omega: float) -> float:
    """Mean thermal photon number at dimensionless ratio hbar*omega/(kB*T).

    Returns ``1/(exp(x) - 1)``; requires ``x > 0`` (finite positive
    temperature and frequency).
    """
    x = _require_finite(beta_hbar_omega, "beta_hbar_omega")
    if x <= 0.0:
        raise DomainError(f"beta_hbar_omega must be > 0, got {x}")
    return 1.0 / math.expm1(x)


def channel_mean(m: InputMoments, c: ChannelParams) -> float:
    """Output mean photon number: tau*n_in + (1 - tau)*n_th."""
    return c.tau * m.n_in + (1.0 - c.tau) * c.n_th


def channel_q(m: InputMoments, c: ChannelParams) -> float:
    """Output q-parameter of the deterministic channel.

    q(tau) = tau^2*q_in + (1 - tau)^2*n_th^2 + 2*tau*(1 - tau)*n_in*n_th.
    Endpoints: q(1) = q_in and q(0) = n_th^2.
    """
    tau = c.tau
    one = 1.0 - tau
    return tau * tau * m.q_in + one * one * c.n_th**2 + 2.0 * tau * one * m.n_in * c.n_th


def coefficients_a_g(m: InputMoments, n_th: float, F: float) -> tuple[float, float]:
    """Coefficients (a, g) of the fluctuating-channel quadratic.

    g = q_in - n_in^2 + 2*(n_in - n_th)^2 couples the fluctuation strength to
    the output statistics; a = 2*n_in*n_th - n_th^2 + g*F.  The threshold
    grows with F exactly when g > 0 (see :func:`thermal_occupancy_window`).
    """
    n_th = _require_finite(n_th, "n_th")
    F = _require_finite(F, "F")
    if n_th < 0.0:
        raise DomainError(f"n_th must be >= 0, got {n_th}")
    if not 0.0 <= F <= 1.0:
        raise DomainError(f"F must be in [0, 1], got {F}")
    g = m.q_in - m.n_in**2 + 2.0 * (m.n_in - n_th) ** 2
    a = 2.0 * m.n_in * n_th - n_th**2 + g * F
    return a, g


def q_out(m: InputMoments, fluct: FluctuationModel, n_th: float) -> float:
    """Output q-parameter of the fluctuating channel as a function of tau_bar.

    Evaluates the quadratic

        q_out = tau_bar^2*(q_in - a) + tau_bar*(a - n_th^2) + n_th^2

    with ``a`` from :func:`coefficients_a_g`.  Equals the mixture expression
    ``<q(tau)> + Var(n(tau))`` for any transmittance distribution with the
    model's mean and variance (see :func:`q_out_mixture`).
    """
    a, _ = coefficients_a_g(m, n_th, fluct.F)
    tb = fluct.tau_bar
    # Regrouped so the endpoint identities q_out(1) = q_in and
    # q_out(0) = n_th^2 hold exactly in floating point.
    return tb * tb * m.q_in + tb * (1.0 - tb) * a + (1.0 - tb) * n_th * n_th


def q_out_mixture(
    m: InputMoments,
    n_th: float,
    support: tuple[tuple[float, float], ...],
) -> float:
    """Output q-parameter of a discrete mixture of deterministic channels.

    ``support`` is ``((tau_i, weight_i), ...)`` with weights summing to 1.
    Computes ``sum_i w_i*q(tau_i) + Var_i(n(tau_i))`` directly from the
    deterministic propagation formulas; used as an independent route to
    :func:`q_out` (they agree whenever the support matches the model's first
    two moments).
    """
    mean_q = 0.0
    mean_n = 0.0
    mean_n_sq = 0.0
    for tau, w in support:
        c = ChannelParams(tau, n_th)
        n_tau = channel_mean(m, c)
        mean_q += w * channel_q(m, c)
        mean_n += w * n_tau
        mean_n_sq += w * n_tau * n_tau
    return mean_q + (mean_n_sq - mean_n * mean_n)


def _clamp_unit(tau: float, context: str) -> float:
    if -CLAMP_TOL <= tau <= 1.0 + CLAMP_TOL:
        return min(1.0, max(0.0, tau))
    raise InternalConsistencyError(f"{context}: root tau_c={tau} lies outside [0, 1]")


def critical_transmittance(m: InputMoments, n_th: float, F: float) -> ThresholdResult:
    """Critical averaged transmittance above which the output is sub-Poissonian.

    Solves ``q_out(tau_bar) = 0`` for the root in [0, 1].  Returns
    ``no_threshold`` when the input itself is not sub-Poissonian
    (``q_in >= 0``) and ``always_sub`` for the noiseless non-fluctuating
    channel (``n_th = 0`` and ``F = 0``), where losses alone never destroy
    sub-Poissonian statistics.

    The selected root is

        tau_c = -[(a - n_th^2) + sqrt((a + n_th^2)^2 - 4*n_th^2*q_in)]
                / [2*(q_in - a)]

    evaluated in a numerically stable form per branch: for ``n_th = 0`` it
    reduces to ``a/(a - q_in)``; for ``a <= n_th^2`` the algebraically
    equivalent quotient ``2*n_th^2 / (n_th^2 - a + sqrt(disc))`` avoids
    cancellation and continuously covers the degenerate case ``q_in = a``
    (where the quadratic collapses to the linear root ``n_th^2/(n_th^2 - a)``).
    """
    n_th = _require_finite(n_th, "n_th")
    F = _require_finite(F, "F")
    if n_th < 0.0:
        raise DomainError(f"n_th must be >= 0, got {n_th}")
    if not 0.0 <= F <= 1.0:
        raise DomainError(f"F must be in [0, 1], got {F}")

    if m.q_in >= 0.0:
        return ThresholdResult.no_threshold()
    if n_th == 0.0 and F == 0.0:
        return ThresholdResult.always_sub()

    a, _ = coefficients_a_g(m, n_th, F)
    nth_sq = n_th * n_th

    if n_th == 0.0:
        # a = g*F >= 0 here and q_in < 0, so the quotient is in [0, 1).
        tau = a / (a - m.q_in)
        return ThresholdResult.critical(_clamp_unit(tau, "zero-temperature root"))

    disc = (a + nth_sq) ** 2 - 4.0 * nth_sq * m.q_in
    # q_in < 0 makes disc >= (a + n_th^2)^2 >= 0; guard anyway.
    if disc < 0.0:
        raise InternalConsistencyError(f"negative discriminant {disc} for {m}, n_th={n_th}, F={F}")
    root = math.sqrt(disc)

    if a <= nth_sq:
        denom = (nth_sq - a) + root
        if denom == 0.0:
            raise InternalConsistencyError(f"degenerate root equation for {m}, n_th={n_th}, F={F}")
        tau = 2.0 * nth_sq / denom
    else:
        tau = -((a - nth_sq) + root) / (2.0 * (m.q_in - a))
    return ThresholdResult.critical(_clamp_unit(tau, "critical-transmittance root"))


def critical_transmittance_zero_temperature(m: InputMoments, F: float) -> ThresholdResult:
    """Critical transmittance for the zero-temperature channel (n_th = 0).

    tau_c = F*(q_in + n_in^2) / (F*(q_in + n_in^2) - q_in).
    Agrees with ``critical_transmittance(m, 0, F)`` to 1e-12.
    """
    F = _require_finite(F, "F")
    if not 0.0 <= F <= 1.0:
        raise DomainError(f"F must be in [0, 1], got {F}")
    if m.q_in >= 0.0:
        return ThresholdResult.no_threshold()
    scaled = F * (m.q_in + m.n_in**2)
    tau = scaled / (scaled - m.q_in)
    return ThresholdResult.critical(_clamp_unit(tau, "zero-temperature closed form"))


def critical_transmittance_no_fluctuation(m: InputMoments, n_th: float) -> ThresholdResult:
    """Critical transmittance for a non-fluctuating channel (F = 0).

    tau_c = n_th / (n_th + sqrt(n_in^2 - q_in) - n_in).
    Agrees with ``critical_transmittance(m, n_th, 0)`` to 1e-12.
    """
    n_th = _require_finite(n_th, "n_th")
    if n_th < 0.0:
        raise DomainError(f"n_th must be >= 0, got {n_th}")
    if m.q_in >= 0.0:
        return ThresholdResult.no_threshold()
    tau = n_th / (n_th + math.sqrt(m.n_in**2 - m.q_in) - m.n_in)
    return ThresholdResult.critical(_clamp_unit(tau, "no-fluctuation closed form"))


def thermal_occupancy_window(m: InputMoments) -> tuple[float, float]:
    """Thermal-occupancy interval on which the coupling coefficient g is negative.

    Returns ``(n_minus, n_plus) = n_in -/+ sqrt((n_in^2 - q_in)/2)``.  For
    ``n_th`` strictly inside the window, stronger transmittance fluctuations
    lower the critical transmittance instead of raising it; at the endpoints
    the threshold is independent of F.
    """
    radicand = (m.n_in**2 - m.q_in) / 2.0
    if radicand < 0.0:
        raise DomainError(f"n_in^2 - q_in = {m.n_in ** 2 - m.q_in} < 0; window undefined")
    half_width = math.sqrt(radicand)
    return m.n_in - half_width, m.n_in + half_width


def derived_statistics(q: float, n: float) -> DerivedStatistics:
    """Mandel Q (= q/n), Fano factor (= q/n + 1) and g2(0) (= q/n^2 + 1)."""
    q = _require_finite(q, "q")
    n = _require_finite(n, "n")
    if n <= 0.0:
        raise DomainError(f"mean photon number must be > 0, got {n}")
    mandel = q / n
    return DerivedStatistics(mandel_q=mandel, fano=mandel + 1.0, g2_zero=q / (n * n) + 1.0)
