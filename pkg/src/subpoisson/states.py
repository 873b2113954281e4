"""Input-state catalog: closed-form moments for three state families.

Supported families and their (n_in, q_in):

* displaced squeezed vacuum D(beta)S(xi)|0> with xi = r*exp(i*psi) and
  beta = |beta|*exp(i*theta); only the relative phase phi = theta - psi/2
  enters the photon-number moments,
* odd cat states, the normalized antisymmetric superposition |beta> - |-beta>,
* Fock states |n>.

All functions are pure; moments are returned as :class:`InputMoments` ready
for the channel algebra in :mod:`subpoisson.moments`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .moments import InputMoments, _require_finite

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SqueezedDisplaced:
    """Displaced squeezed vacuum with squeezing (r, psi) and displacement (|beta|, theta).

    Phases are stored reduced mod 2*pi.  ``phi = theta - psi/2`` is the only
    phase combination that affects photon-number moments.
    """

    r: float
    psi: float
    beta_abs: float
    theta: float

    def __post_init__(self):
        r = _require_finite(self.r, "r")
        beta_abs = _require_finite(self.beta_abs, "beta_abs")
        if r < 0.0:
            raise DomainError(f"squeezing magnitude r must be >= 0, got {r}")
        if beta_abs < 0.0:
            raise DomainError(f"displacement magnitude must be >= 0, got {beta_abs}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "beta_abs", beta_abs)
        object.__setattr__(self, "psi", _require_finite(self.psi, "psi") % _TWO_PI)
        object.__setattr__(self, "theta", _require_finite(self.theta, "theta") % _TWO_PI)

    @classmethod
    def from_phi(cls, r: float, phi: float, beta_sq: float) -> "SqueezedDisplaced":
        """Build from the relative phase phi and squared displacement |beta|^2."""
        beta_sq = _require_finite(beta_sq, "beta_sq")
        if beta_sq < 0.0:
            raise DomainError(f"beta_sq must be >= 0, got {beta_sq}")
        return cls(r=r, psi=0.0, beta_abs=math.sqrt(beta_sq), theta=phi)

    @property
    def phi(self) -> float:
        return (self.theta - self.psi / 2.0) % _TWO_PI

    @property
    def beta_sq(self) -> float:
        return self.beta_abs**2


@dataclass(frozen=True)
class OddCat:
    """Odd cat state, the normalized |beta> - |-beta> superposition."""

    beta_abs: float

    def __post_init__(self):
        beta_abs = _require_finite(self.beta_abs, "beta_abs")
        if beta_abs < 0.0:
            raise DomainError(f"displacement magnitude must be >= 0, got {beta_abs}")
        object.__setattr__(self, "beta_abs", beta_abs)

    @property
    def beta_sq(self) -> float:
        return self.beta_abs**2


@dataclass(frozen=True)
class FockState:
    """Photon-number eigenstate |n>."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise DomainError(f"Fock index must be an int, got {self.n!r}")
        if self.n < 0:
            raise DomainError(f"Fock index must be >= 0, got {self.n}")


StateSpec = SqueezedDisplaced | OddCat | FockState


def squeezed_q2(r: float, phi: float) -> float:
    """Displacement-coupling coefficient q2 = 2*sinh(r)^2 + sinh(2r)*cos(2*phi)."""
    return 2.0 * math.sinh(r) ** 2 + math.sinh(2.0 * r) * math.cos(2.0 * phi)


def squeezed_moments(r: float, phi: float, beta_sq: float) -> InputMoments:
    """Moments of the displaced squeezed vacuum.

    n_in = |beta|^2 + sinh(r)^2
    q_in = q2*|beta|^2 + sinh(r)^2*cosh(2r),  q2 = 2*sinh(r)^2 + sinh(2r)*cos(2*phi)
    """
    r = _require_finite(r, "r")
    phi = _require_finite(phi, "phi")
    beta_sq = _require_finite(beta_sq, "beta_sq")
    if r < 0.0:
        raise DomainError(f"squeezing magnitude r must be >= 0, got {r}")
    if beta_sq < 0.0:
        raise DomainError(f"beta_sq must be >= 0, got {beta_sq}")
    sinh_sq = math.sinh(r) ** 2
    n_in = beta_sq + sinh_sq
    q_in = squeezed_q2(r, phi) * beta_sq + sinh_sq * math.cosh(2.0 * r)
    return InputMoments(n_in=n_in, q_in=q_in)


def squeezed_sub_poisson_condition(r: float, phi: float) -> bool:
    """Whether (r, phi) admits sub-Poissonian statistics: |tan(phi)| > exp(r).

    Evaluated as |sin(phi)| > exp(r)*|cos(phi)| so that phi = pi/2 + k*pi
    (infinite tangent) is true for every finite r.  For r > 0 this is
    equivalent to q2 < 0.
    """
    r = _require_finite(r, "r")
    phi = _require_finite(phi, "phi")
    if r < 0.0:
        raise DomainError(f"squeezing magnitude r must be >= 0, got {r}")
    return abs(math.sin(phi)) > math.exp(r) * abs(math.cos(phi))


def squeezed_beta_critical_sq(r: float, phi: float) -> float:
    """Squared displacement above which the squeezed state is sub-Poissonian.

    beta_c^2 = exp(r)*sinh(r)*cosh(2r) / (2*(sin(phi)^2 - exp(2r)*cos(phi)^2));
    defined only where :func:`squeezed_sub_poisson_condition` holds (otherwise
    the denominator is not positive and a DomainError is raised).
    """
    r = _require_finite(r, "r")
    phi = _require_finite(phi, "phi")
    if r < 0.0:
        raise DomainError(f"squeezing magnitude r must be >= 0, got {r}")
    denom = 2.0 * (math.sin(phi) ** 2 - math.exp(2.0 * r) * math.cos(phi) ** 2)
    if denom <= 0.0:
        raise DomainError(
            f"no sub-Poissonian displacement threshold at r={r}, phi={phi}: "
            "|tan(phi)| > exp(r) required"
        )
    return math.exp(r) * math.sinh(r) * math.cosh(2.0 * r) / denom


def cat_moments(beta_sq: float) -> InputMoments:
    """Moments of the odd cat state with squared amplitude |beta|^2.

    With bt = |beta|^2/sinh(|beta|^2):  n_in = bt*cosh(|beta|^2), q_in = -bt^2.
    At beta = 0 the state is the single photon, (n_in, q_in) = (1, -1); odd
    cats are sub-Poissonian for every amplitude (q_in < 0).
    """
    beta_sq = _require_finite(beta_sq, "beta_sq")
    if beta_sq < 0.0:
        raise DomainError(f"beta_sq must be >= 0, got {beta_sq}")
    if beta_sq == 0.0:
        return InputMoments(n_in=1.0, q_in=-1.0)
    bt = beta_sq / math.sinh(beta_sq)
    return InputMoments(n_in=bt * math.cosh(beta_sq), q_in=-(bt * bt))


def fock_moments(n: int) -> InputMoments:
    """Moments of the Fock state |n>: zero photon-number variance gives q_in = -n."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise DomainError(f"Fock index must be an int, got {n!r}")
    if n < 0:
        raise DomainError(f"Fock index must be >= 0, got {n}")
    return InputMoments(n_in=float(n), q_in=-float(n))


def input_moments(spec: StateSpec) -> InputMoments:
    """Closed-form moments for any supported state spec."""
    if isinstance(spec, SqueezedDisplaced):
        return squeezed_moments(spec.r, spec.phi, spec.beta_sq)
    if isinstance(spec, OddCat):
        return cat_moments(spec.beta_sq)
    if isinstance(spec, FockState):
        return fock_moments(spec.n)
    raise DomainError(f"unsupported state spec: {spec!r}")


def state_family(spec: StateSpec) -> str:
    """Short family label ("squeezed", "cat" or "fock") used in sweep output."""
    if isinstance(spec, SqueezedDisplaced):
        return "squeezed"
    if isinstance(spec, OddCat):
        return "cat"
    if isinstance(spec, FockState):
        return "fock"
    raise DomainError(f"unsupported state spec: {spec!r}")
