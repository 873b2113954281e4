"""Brute-force verifier on a truncated Fock space.

Everything in this module measures photon statistics directly from density
matrices instead of trusting the closed forms in :mod:`subpoisson.moments`
and :mod:`subpoisson.states`: states are built as vectors/matrices on the
first ``dim`` Fock levels, the channel is applied as an explicit two-mode
beam-splitter unitary, the environment is traced out, and moments are read
off the diagonal.

Conventions
-----------
* ``dim`` counts retained Fock levels, indices ``0 .. dim-1``.
* Two-mode states live on the tensor-product basis ordered
  (light, environment); the flat index of ``|j, k>`` is ``j*dim + k``.
* The channel unitary is ``U = exp[theta*(a+ b - a b+)]`` with
  ``cos(theta) = sqrt(tau)``, so the light operator evolves as
  ``U+ a U = sqrt(tau)*a + sqrt(1-tau)*b``.  The generator conserves total
  photon number, so its matrix exponential is computed exactly block by
  block on the total-photon-number subspaces.

Truncation control
------------------
Builders reject states whose photon-number tail at ``dim`` exceeds
``tail_tol`` and report a usable larger truncation via
:class:`~subpoisson.errors.TruncationError`.  The ``oracle_*`` drivers start
from a size heuristic, keep doubling ``dim`` until the reported moments move
by less than ``CONVERGENCE_TOL``, and give up at ``MAX_DIM``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal, expm

from .errors import DomainError, TruncationError
from .moments import ChannelParams, FluctuationModel
from .states import FockState, OddCat, SqueezedDisplaced, StateSpec, input_moments

DEFAULT_TAIL_TOL = 1e-12
CONVERGENCE_TOL = 1e-10
MAX_DIM = 256
HERMITICITY_TOL = 1e-12

# Pairs of light/environment eigenvectors are pushed through the unitary in
# batches of this many two-mode vectors to bound peak memory.
_PAIR_CHUNK = 128


@dataclass(frozen=True)
class TruncatedState:
    """Density operator on the first ``dim`` Fock levels.

    ``build_deficit`` records probability mass known to be missing or
    distorted by the truncation (tail mass of the constructed state plus any
    mass dropped along the way); it is carried into
    :class:`OracleReport.trace_deficit`.
    """

    dim: int
    matrix: np.ndarray
    build_deficit: float = field(default=0.0, compare=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (self.dim, self.dim):
            raise DomainError(f"matrix shape {matrix.shape} does not match dim={self.dim}")
        if np.abs(matrix - matrix.conj().T).max() > HERMITICITY_TOL:
            raise DomainError("density matrix is not Hermitian within 1e-12")
        trace = matrix.trace().real
        if abs(trace - 1.0) > 1e-9:
            raise DomainError(f"density matrix trace {trace} is not 1")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    def probabilities(self) -> np.ndarray:
        """Photon-number distribution (real diagonal)."""
        return np.real(np.diag(self.matrix))

    def validate(self, tail_tol: float = DEFAULT_TAIL_TOL) -> None:
        """Full physicality check: trace, positivity floor, tail mass."""
        trace = self.matrix.trace().real
        if abs(trace - 1.0) > max(tail_tol, 1e-12):
            raise DomainError(f"trace deficit {abs(trace - 1.0)} exceeds {tail_tol}")
        floor = np.linalg.eigvalsh(self.matrix).min()
        if floor < -1e-10:
            raise DomainError(f"negative eigenvalue {floor} below -1e-10")


@dataclass(frozen=True)
class TwoModeState:
    """Density operator on the (light, environment) product basis."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        expected = self.dim * self.dim
        if matrix.shape != (expected, expected):
            raise DomainError(f"matrix shape {matrix.shape} does not match dim={self.dim}")
        if np.abs(matrix - matrix.conj().T).max() > HERMITICITY_TOL:
            raise DomainError("two-mode density matrix is not Hermitian within 1e-12")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)


@dataclass(frozen=True)
class OracleReport:
    """Directly measured photon statistics of a truncated state."""

    n_mean: float
    q_param: float
    truncation_used: int
    trace_deficit: float


def destroy(dim: int) -> np.ndarray:
    """Annihilation operator on ``dim`` Fock levels."""
    return np.diag(np.sqrt(np.arange(1.0, dim)), k=1).astype(complex)


def _coherent_vector(beta: complex, dim: int) -> np.ndarray:
    """Coherent-state amplitudes via the overflow-free recurrence."""
    v = np.zeros(dim, dtype=complex)
    v[0] = math.exp(-0.5 * abs(beta) ** 2)
    for k in range(1, dim):
        v[k] = v[k - 1] * beta / math.sqrt(k)
    return v


def _tail_guard(vector: np.ndarray, dim: int, tail_tol: float, label: str) -> None:
    top_mass = float(np.sum(np.abs(vector[dim - 2 :]) ** 2))
    if top_mass > tail_tol:
        raise TruncationError(
            f"{label}: top-level occupancy {top_mass:.3e} exceeds tail tolerance "
            f"{tail_tol:.1e} at dim={dim}",
            suggested_dim=2 * dim,
        )


def build_state(spec: StateSpec, dim: int, tail_tol: float = DEFAULT_TAIL_TOL) -> TruncatedState:
    """Density matrix of a pure input state on ``dim`` Fock levels.

    Squeezed states are produced by applying the matrix exponentials of the
    squeezing and displacement generators to the vacuum vector; cat states as
    the normalized difference of two coherent vectors; Fock states directly.

    Raises:
        TruncationError: the state's photon-number tail at ``dim`` exceeds
            ``tail_tol`` (``suggested_dim`` holds a retry size).
    """
    if dim < 2:
        raise DomainError(f"dim must be >= 2, got {dim}")
    deficit = 0.0

    if isinstance(spec, FockState):
        if spec.n >= dim - 1:
            raise TruncationError(
                f"Fock level {spec.n} does not fit below dim={dim}",
                suggested_dim=max(2 * dim, spec.n + 8),
            )
        vector = np.zeros(dim, dtype=complex)
        vector[spec.n] = 1.0
    elif isinstance(spec, OddCat):
        if spec.beta_abs == 0.0:
            # Zero-amplitude limit of the odd cat is the single photon.
            vector = np.zeros(dim, dtype=complex)
            vector[1] = 1.0
        else:
            vector = _coherent_vector(spec.beta_abs, dim) - _coherent_vector(-spec.beta_abs, dim)
            norm_sq = float(np.sum(np.abs(vector) ** 2))
            exact_norm_sq = 2.0 * -math.expm1(-2.0 * spec.beta_sq)
            deficit = abs(exact_norm_sq - norm_sq) / exact_norm_sq
            if deficit > tail_tol:
                raise TruncationError(
                    f"odd cat |beta|^2={spec.beta_sq}: truncated tail mass {deficit:.3e} "
                    f"exceeds {tail_tol:.1e} at dim={dim}",
                    suggested_dim=2 * dim,
                )
            vector = vector / math.sqrt(norm_sq)
    elif isinstance(spec, SqueezedDisplaced):
        a = destroy(dim)
        a_dag = a.conj().T
        xi = spec.r * np.exp(1j * spec.psi)
        beta = spec.beta_abs * np.exp(1j * spec.theta)
        squeeze_gen = 0.5 * (xi * (a_dag @ a_dag) - np.conj(xi) * (a @ a))
        displace_gen = beta * a_dag - np.conj(beta) * a
        vector = expm(displace_gen) @ expm(squeeze_gen)[:, 0]
        # The truncated generators are anti-Hermitian, so the norm stays 1 and
        # truncation error shows up only in the top-level occupancy.
        vector = vector / np.linalg.norm(vector)
    else:
        raise DomainError(f"unsupported state spec: {spec!r}")

    _tail_guard(vector, dim, tail_tol, type(spec).__name__)
    return TruncatedState(dim, np.outer(vector, vector.conj()), build_deficit=deficit)


def build_thermal(n_th: float, dim: int, tail_tol: float = DEFAULT_TAIL_TOL) -> TruncatedState:
    """Thermal state: diagonal geometric distribution with mean ``n_th``.

    The truncated tail ``(n_th/(n_th+1))**dim`` must stay below ``tail_tol``;
    the retained probabilities are renormalized and the tail is reported as
    the state's ``build_deficit``.
    """
    if dim < 2:
        raise DomainError(f"dim must be >= 2, got {dim}")
    if not math.isfinite(n_th) or n_th < 0.0:
        raise DomainError(f"n_th must be finite and >= 0, got {n_th}")
    if n_th == 0.0:
        matrix = np.zeros((dim, dim), dtype=complex)
        matrix[0, 0] = 1.0
        return TruncatedState(dim, matrix)
    ratio = n_th / (n_th + 1.0)
    tail = ratio**dim
    if tail >= tail_tol:
        needed = math.ceil(math.log(0.1 * tail_tol) / math.log(ratio))
        raise TruncationError(
            f"thermal n_th={n_th}: tail mass {tail:.3e} exceeds {tail_tol:.1e} at dim={dim}",
            suggested_dim=max(2 * dim, needed),
        )
    probs = (1.0 - ratio) * ratio ** np.arange(dim)
    probs = probs / probs.sum()
    return TruncatedState(dim, np.diag(probs).astype(complex), build_deficit=tail)


@functools.lru_cache(maxsize=16)
def _beam_splitter_blocks(dim: int, theta: float) -> tuple[np.ndarray, ...]:
    """Unitary blocks of exp[theta*(a+ b - a b+)] on total-photon subspaces.

    The truncated generator never couples different total photon numbers, so
    its exponential is block diagonal.  Each block is the exponential of a
    real antisymmetric tridiagonal matrix, computed exactly through the
    eigendecomposition of the equivalent real symmetric tridiagonal form.
    """
    blocks = []
    for total in range(2 * dim - 1):
        j_lo = max(0, total - dim + 1)
        j_hi = min(dim - 1, total)
        size = j_hi - j_lo + 1
        if size == 1 or theta == 0.0:
            blocks.append(np.eye(size, dtype=complex))
            continue
        j = np.arange(j_lo, j_hi, dtype=float)
        couplings = np.sqrt((j + 1.0) * (total - j))
        eigvals, vecs = eigh_tridiagonal(np.zeros(size), -couplings)
        phases = (1j) ** np.arange(size)
        block = (phases.conj()[:, None] * vecs) @ (
            np.exp(-1j * theta * eigvals)[:, None] * vecs.T
        ) * phases[None, :]
        blocks.append(block)
    return tuple(blocks)


def _block_indices(dim: int, total: int) -> tuple[np.ndarray, np.ndarray]:
    j_lo = max(0, total - dim + 1)
    j_hi = min(dim - 1, total)
    rows = np.arange(j_lo, j_hi + 1)
    return rows, total - rows


@functools.lru_cache(maxsize=16)
def _block_index_table(dim: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    return tuple(_block_indices(dim, total) for total in range(2 * dim - 1))


def beam_splitter_unitary(dim: int, tau: float) -> np.ndarray:
    """Dense two-mode beam-splitter unitary on the ``dim**2`` product basis.

    Intended for small truncations (the matrix has ``dim**4`` entries); the
    channel itself uses the block form through :func:`beam_splitter_apply`.
    """
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"tau must be in [0, 1], got {tau}")
    theta = math.acos(min(1.0, math.sqrt(tau)))
    blocks = _beam_splitter_blocks(dim, theta)
    unitary = np.zeros((dim * dim, dim * dim), dtype=complex)
    for total, block in enumerate(blocks):
        rows, cols = _block_indices(dim, total)
        flat = rows * dim + cols
        unitary[np.ix_(flat, flat)] = block
    return unitary


def two_mode_product(light: TruncatedState, env: TruncatedState) -> TwoModeState:
    """Product state light (x) environment."""
    if light.dim != env.dim:
        raise DomainError(f"dim mismatch: light {light.dim} vs environment {env.dim}")
    return TwoModeState(light.dim, np.kron(light.matrix, env.matrix))


def partial_trace_environment(state: TwoModeState) -> TruncatedState:
    """Reduced state of the light mode (trace over the second factor)."""
    dim = state.dim
    reshaped = state.matrix.reshape(dim, dim, dim, dim)
    return TruncatedState(dim, np.trace(reshaped, axis1=1, axis2=3))


def _rank_factors(state: TruncatedState, cut: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Eigen-decomposition of a density matrix, discarding weights below ``cut``."""
    diagonal = np.diag(np.diag(state.matrix))
    if np.count_nonzero(state.matrix - diagonal) == 0:
        weights = np.real(np.diag(state.matrix))
        vectors = np.eye(state.dim, dtype=complex)
    else:
        weights, vectors = eigh(state.matrix)
    keep = weights > cut
    dropped = float(np.clip(weights[~keep], 0.0, None).sum())
    return weights[keep], vectors[:, keep], dropped


def beam_splitter_apply(
    light: TruncatedState,
    env: TruncatedState,
    tau: float,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> TruncatedState:
    """Send ``light`` through the beam-splitter channel against ``env``.

    Forms the product state, applies the two-mode unitary with
    ``cos(theta) = sqrt(tau)`` and traces out the environment.  The product
    state is processed as a weighted sum of product vectors (eigenvectors of
    the two factors), which avoids materializing the ``dim**2 x dim**2``
    two-mode matrix while applying exactly the same block unitaries as
    :func:`beam_splitter_unitary`.

    Raises:
        TruncationError: the inputs put more than ``tail_tol`` probability on
            total photon numbers >= ``dim`` (those amplitudes cannot leak into
            the truncated levels they would reach), or the output occupies the
            top Fock levels beyond ``tail_tol``.
    """
    if light.dim != env.dim:
        raise DomainError(f"dim mismatch: light {light.dim} vs environment {env.dim}")
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"tau must be in [0, 1], got {tau}")
    dim = light.dim
    theta = math.acos(min(1.0, math.sqrt(tau)))
    blocks = _beam_splitter_blocks(dim, theta)

    rank_cut = tail_tol / (4.0 * dim)
    light_w, light_v, light_dropped = _rank_factors(light, rank_cut)
    env_w, env_v, env_dropped = _rank_factors(env, rank_cut)

    index_table = _block_index_table(dim)
    cut_mask = np.add.outer(np.arange(dim), np.arange(dim)) >= dim
    reduced = np.zeros((dim, dim), dtype=complex)
    cut_mass = 0.0

    for i in range(light_w.size):
        u = light_v[:, i]
        for start in range(0, env_w.size, _PAIR_CHUNK):
            env_chunk = env_v[:, start : start + _PAIR_CHUNK]
            weights = light_w[i] * env_w[start : start + _PAIR_CHUNK]
            # psi[p, j, k] = u[j] * v_p[k], one two-mode vector per kept pair
            psi = u[None, :, None] * env_chunk.T[:, None, :]
            cut_mass += float(weights @ np.sum(np.abs(psi[:, cut_mask]) ** 2, axis=1))
            for block, (rows, cols) in zip(blocks, index_table):
                if block.shape[0] == 1:
                    continue
                psi[:, rows, cols] = psi[:, rows, cols] @ block.T
            scaled = np.sqrt(weights)[:, None, None] * psi
            stacked = scaled.transpose(1, 0, 2).reshape(dim, -1)
            reduced += stacked @ stacked.conj().T

    if cut_mass > tail_tol:
        raise TruncationError(
            f"beam splitter at dim={dim}: {cut_mass:.3e} probability sits on total "
            f"photon number >= {dim} and would leak out of the truncation",
            suggested_dim=2 * dim,
        )

    reduced = 0.5 * (reduced + reduced.conj().T)
    out = TruncatedState(
        dim,
        reduced,
        build_deficit=light.build_deficit + env.build_deficit + light_dropped + env_dropped
        + cut_mass,
    )
    top_mass = float(out.probabilities()[dim - 2 :].sum())
    if top_mass > tail_tol:
        raise TruncationError(
            f"beam splitter output at dim={dim}: top-level occupancy {top_mass:.3e} "
            f"exceeds {tail_tol:.1e}",
            suggested_dim=2 * dim,
        )
    return out


def measure_moments(state: TruncatedState) -> OracleReport:
    """Mean photon number and q-parameter read directly off the diagonal."""
    probs = state.probabilities()
    levels = np.arange(state.dim, dtype=float)
    n_mean = float(levels @ probs)
    second = float((levels * levels) @ probs)
    q_param = second - n_mean - n_mean * n_mean
    deficit = max(abs(1.0 - float(probs.sum())), state.build_deficit)
    return OracleReport(
        n_mean=n_mean, q_param=q_param, truncation_used=state.dim, trace_deficit=deficit
    )


def char_fn(state: TruncatedState, alpha: complex) -> complex:
    """Normally ordered characteristic function Tr{exp(alpha a+) exp(-alpha* a) rho}.

    The truncated ladder exponentials only converge while the displaced tail
    stays inside the truncation, enforced as
    ``|alpha|^2 * n_occupied <= dim/4``.
    """
    alpha = complex(alpha)
    dim = state.dim
    probs = state.probabilities()
    occupied = np.nonzero(probs > DEFAULT_TAIL_TOL)[0]
    n_occupied = int(occupied[-1]) if occupied.size else 0
    if abs(alpha) ** 2 * max(1, n_occupied) > 0.25 * dim:
        raise DomainError(
            f"|alpha|^2={abs(alpha) ** 2:.3g} too large for occupied level {n_occupied} "
            f"at dim={dim}; increase the truncation"
        )
    a = destroy(dim)
    left = expm(alpha * a.conj().T)
    right = expm(-np.conj(alpha) * a)
    return complex(np.trace(left @ right @ state.matrix))


def initial_truncation(n_scale: float) -> int:
    """Starting Fock-space size for a state/environment of mean scale ``n_scale``."""
    return math.ceil(8.0 * (n_scale + 1.0)) + 16


# States are immutable (read-only matrices), so repeated oracle runs over the
# same spec/truncation reuse one build.
_build_state_cached = functools.lru_cache(maxsize=128)(build_state)
_build_thermal_cached = functools.lru_cache(maxsize=128)(build_thermal)


def _simulate(
    spec: StateSpec,
    channel: ChannelParams | None,
    dim: int,
    tail_tol: float,
) -> OracleReport:
    light = _build_state_cached(spec, dim, tail_tol)
    if channel is None:
        return measure_moments(light)
    env = _build_thermal_cached(channel.n_th, dim, tail_tol)
    return measure_moments(beam_splitter_apply(light, env, channel.tau, tail_tol))


def _converged_report(
    spec: StateSpec,
    channel: ChannelParams | None,
    tail_tol: float,
) -> OracleReport:
    n_scale = input_moments(spec).n_in
    if channel is not None:
        n_scale = max(n_scale, channel.n_th)
    dim = initial_truncation(n_scale)
    previous = None
    while dim <= MAX_DIM:
        try:
            report = _simulate(spec, channel, dim, tail_tol)
        except TruncationError:
            report = None
            previous = None
        if report is not None:
            if previous is not None:
                if (
                    abs(report.n_mean - previous.n_mean) < CONVERGENCE_TOL
                    and abs(report.q_param - previous.q_param) < CONVERGENCE_TOL
                ):
                    # the smaller size is accepted; the larger run only verified it
                    return previous
            previous = report
        if dim == MAX_DIM:
            break
        # the last step snaps to the cap so near-cap sizes still get checked
        dim = min(2 * dim, MAX_DIM)
    raise TruncationError(
        f"moments did not converge below dim={MAX_DIM} for {spec!r}"
        + (f" through {channel!r}" if channel is not None else ""),
        suggested_dim=None,
    )


def oracle_input_moments(spec: StateSpec, tail_tol: float = DEFAULT_TAIL_TOL) -> OracleReport:
    """Converged direct measurement of an input state's (n, q)."""
    return _converged_report(spec, None, tail_tol)


def oracle_channel_moments(
    spec: StateSpec,
    channel: ChannelParams,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> OracleReport:
    """Converged direct measurement of the channel output's (n, q)."""
    return _converged_report(spec, channel, tail_tol)


def fluctuating_q_oracle(
    spec: StateSpec,
    n_th: float,
    tau_bar: float,
    F: float,
    dim: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> float:
    """Output q-parameter of the fluctuating channel, measured by simulation.

    Simulates the channel at each support point of a discrete transmittance
    distribution matching (tau_bar, Var) -- see
    :meth:`FluctuationModel.support` -- and mixes the measured moments:
    ``q_out = sum_i w_i*(q_i + n_i^2) - (sum_i w_i*n_i)^2``.

    With ``dim=None`` every support point is simulated at its own converged
    truncation; otherwise the given truncation is used as is.
    """
    support = FluctuationModel(tau_bar, F).support()
    reports = []
    for tau, _ in support:
        channel = ChannelParams(tau, n_th)
        if dim is None:
            reports.append(oracle_channel_moments(spec, channel, tail_tol))
        else:
            reports.append(_simulate(spec, channel, dim, tail_tol))
    mean_n = sum(w * rep.n_mean for (_, w), rep in zip(support, reports))
    normal_second = sum(
        w * (rep.q_param + rep.n_mean * rep.n_mean) for (_, w), rep in zip(support, reports)
    )
    return normal_second - mean_n * mean_n


def char_factorization_residual(
    spec: StateSpec,
    tau: float,
    n_th: float,
    alphas: tuple[complex, ...],
    dim: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> float:
    """Worst deviation from the characteristic-function factorization.

    The channel output must satisfy
    ``chi_out(alpha) = chi_in(sqrt(tau)*alpha) * exp(-n_th*(1-tau)*|alpha|^2)``
    with ``chi_in`` measured on the input state.  Returns the max absolute
    residual over ``alphas``.
    """
    if dim is None:
        dim = oracle_channel_moments(spec, ChannelParams(tau, n_th), tail_tol).truncation_used
    light = _build_state_cached(spec, dim, tail_tol)
    env = _build_thermal_cached(n_th, dim, tail_tol)
    out = beam_splitter_apply(light, env, tau, tail_tol)
    worst = 0.0
    for alpha in alphas:
        alpha = complex(alpha)
        measured = char_fn(out, alpha)
        expected = char_fn(light, math.sqrt(tau) * alpha) * math.exp(
            -n_th * (1.0 - tau) * abs(alpha) ** 2
        )
        worst = max(worst, abs(measured - expected))
    return worst
