"""Parameter sweeps over state families, fluctuation strengths and temperatures.

A sweep evaluates the critical transmittance on the Cartesian product of a
``beta_sq`` grid, an ``F`` list and an ``n_th`` list for one input-state
family, producing figure-ready CSV rows.  Row order is deterministic:
row-major over F, then n_th, then beta_sq.  Optional verification replays a
subsample of grid points through the truncated Fock-space oracle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, DomainError, InternalConsistencyError, TruncationError
from .fock import fluctuating_q_oracle
from .moments import (
    FluctuationModel,
    InputMoments,
    coefficients_a_g,
    critical_transmittance,
    q_out,
    thermal_occupancy,
)
from .states import (
    FockState,
    OddCat,
    SqueezedDisplaced,
    StateSpec,
    cat_moments,
    fock_moments,
    squeezed_moments,
)

FAMILIES = ("squeezed", "cat", "fock")

CSV_HEADER = "state,r,phi,beta_sq,F,n_th,n_in,q_in,g,tau_c"


@dataclass(frozen=True)
class SweepConfig:
    """Validated sweep request.

    For the squeezed family ``r`` and ``phi`` are required; for ``fock`` the
    ``beta_sq_grid`` entries are interpreted as photon numbers and must be
    non-negative integers.  ``truncation`` pins the oracle's Fock-space size
    during verification (None lets it converge automatically).
    """

    state: str
    beta_sq_grid: tuple[float, ...]
    f_list: tuple[float, ...]
    nth_list: tuple[float, ...]
    r: float | None = None
    phi: float | None = None
    out: Path = Path("sweep.csv")
    verify: bool = False
    verify_tolerance: float = 1e-8
    verify_samples: int = 5
    truncation: int | None = None

    def __post_init__(self):
        if self.state not in FAMILIES:
            raise ConfigError(f"state: must be one of {FAMILIES}, got {self.state!r}")
        for name in ("beta_sq_grid", "f_list", "nth_list"):
            grid = getattr(self, name)
            if not grid:
                raise ConfigError(f"{name}: must be non-empty")
            for i, value in enumerate(grid):
                if not math.isfinite(value):
                    raise ConfigError(f"{name}[{i}]: must be finite, got {value}")
        for i, value in enumerate(self.f_list):
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"f_list[{i}]: must be in [0, 1], got {value}")
        for i, value in enumerate(self.nth_list):
            if value < 0.0:
                raise ConfigError(f"nth_list[{i}]: must be >= 0, got {value}")
        for i, value in enumerate(self.beta_sq_grid):
            if value < 0.0:
                raise ConfigError(f"beta_sq_grid[{i}]: must be >= 0, got {value}")
        if self.state == "squeezed":
            if self.r is None or self.phi is None:
                raise ConfigError("r, phi: required for the squeezed family")
            if self.r < 0.0:
                raise ConfigError(f"r: must be >= 0, got {self.r}")
        if self.state == "fock":
            for i, value in enumerate(self.beta_sq_grid):
                if value != int(value):
                    raise ConfigError(
                        f"beta_sq_grid[{i}]: fock sweeps take integer photon numbers, got {value}"
                    )
        if self.verify_tolerance <= 0.0:
            raise ConfigError(f"verify_tolerance: must be > 0, got {self.verify_tolerance}")
        if self.verify_samples < 1:
            raise ConfigError(f"verify_samples: must be >= 1, got {self.verify_samples}")
        if self.truncation is not None and self.truncation < 2:
            raise ConfigError(f"truncation: must be >= 2, got {self.truncation}")
        object.__setattr__(self, "out", Path(self.out))


@dataclass(frozen=True)
class CurvePoint:
    """One sweep row; ``tau_c`` is None when the input is not sub-Poissonian."""

    state: str
    r: float | None
    phi: float | None
    beta_sq: float
    F: float
    n_th: float
    n_in: float
    q_in: float
    tau_c: float | None
    g_coefficient: float


@dataclass(frozen=True)
class VerifyEntry:
    point: CurvePoint
    tau_bar: float
    q_closed_form: float
    q_oracle: float | None
    deviation: float | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class VerifyReport:
    entries: tuple[VerifyEntry, ...]
    tolerance: float

    @property
    def worst_deviation(self) -> float:
        deviations = [e.deviation for e in self.entries if e.deviation is not None]
        return max(deviations) if deviations else math.inf

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries) and self.worst_deviation <= self.tolerance

    def summary_lines(self) -> list[str]:
        lines = []
        for e in self.entries:
            p = e.point
            where = f"{p.state} beta_sq={p.beta_sq!r} F={p.F!r} n_th={p.n_th!r} tau_bar={e.tau_bar!r}"
            if e.error is not None:
                lines.append(f"FAIL {where}: {e.error}")
            else:
                status = "ok" if e.deviation <= self.tolerance else "FAIL"
                lines.append(f"{status:>4} {where}: |q_oracle - q_closed| = {e.deviation:.3e}")
        lines.append(
            f"worst deviation {self.worst_deviation:.3e} "
            f"({'within' if self.ok else 'EXCEEDS'} tolerance {self.tolerance:.1e})"
        )
        return lines


def state_spec_for(cfg: SweepConfig, beta_sq: float) -> StateSpec:
    """State spec of the grid point with squared displacement ``beta_sq``."""
    if cfg.state == "squeezed":
        return SqueezedDisplaced.from_phi(cfg.r, cfg.phi, beta_sq)
    if cfg.state == "cat":
        return OddCat(math.sqrt(beta_sq))
    return FockState(int(beta_sq))


def _point_moments(cfg: SweepConfig, beta_sq: float) -> InputMoments:
    if cfg.state == "squeezed":
        return squeezed_moments(cfg.r, cfg.phi, beta_sq)
    if cfg.state == "cat":
        return cat_moments(beta_sq)
    return fock_moments(int(beta_sq))


def run_sweep(cfg: SweepConfig) -> list[CurvePoint]:
    """Evaluate the full grid; deterministic row order (F, n_th, beta_sq)."""
    points = []
    for F in cfg.f_list:
        for n_th in cfg.nth_list:
            for beta_sq in cfg.beta_sq_grid:
                try:
                    m = _point_moments(cfg, beta_sq)
                    a, g = coefficients_a_g(m, n_th, F)
                    threshold = critical_transmittance(m, n_th, F)
                except InternalConsistencyError as exc:
                    raise InternalConsistencyError(
                        f"grid point state={cfg.state} beta_sq={beta_sq} F={F} n_th={n_th}: {exc}"
                    ) from exc
                points.append(
                    CurvePoint(
                        state=cfg.state,
                        r=cfg.r if cfg.state == "squeezed" else None,
                        phi=cfg.phi if cfg.state == "squeezed" else None,
                        beta_sq=beta_sq,
                        F=F,
                        n_th=n_th,
                        n_in=m.n_in,
                        q_in=m.q_in,
                        tau_c=threshold.tau_c,
                        g_coefficient=g,
                    )
                )
    return points


def _format(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def emit_csv(points: list[CurvePoint], path: Path | str) -> None:
    """Write sweep rows as UTF-8 CSV in the produced order.

    Numbers use the shortest round-trip decimal form; missing thresholds and
    inapplicable state parameters are empty fields.
    """
    if not points:
        raise DomainError("no points to write")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for p in points:
            writer.writerow(
                [
                    p.state,
                    _format(p.r),
                    _format(p.phi),
                    _format(p.beta_sq),
                    _format(p.F),
                    _format(p.n_th),
                    _format(p.n_in),
                    _format(p.q_in),
                    _format(p.g_coefficient),
                    _format(p.tau_c),
                ]
            )


def _sample_indices(count: int, samples: int) -> list[int]:
    if count <= samples:
        return list(range(count))
    picked = [round(i * (count - 1) / (samples - 1)) for i in range(samples)]
    return sorted(set(picked))


def verify_mode(cfg: SweepConfig, points: list[CurvePoint] | None = None) -> VerifyReport:
    """Replay a deterministic subsample of grid points through the Fock oracle.

    Each sampled point is checked at its own critical transmittance when one
    exists (where the closed-form output q vanishes), otherwise at
    tau_bar = 0.5; the oracle's mixed-channel q must match the closed form
    within the configured tolerance.
    """
    if points is None:
        points = run_sweep(cfg)
    entries = []
    for index in _sample_indices(len(points), cfg.verify_samples):
        p = points[index]
        spec = state_spec_for(cfg, p.beta_sq)
        m = InputMoments(p.n_in, p.q_in)
        tau_bar = p.tau_c if p.tau_c is not None and 0.0 < p.tau_c < 1.0 else 0.5
        closed = q_out(m, FluctuationModel(tau_bar, p.F), p.n_th)
        try:
            oracle = fluctuating_q_oracle(spec, p.n_th, tau_bar, p.F, dim=cfg.truncation)
        except TruncationError as exc:
            entries.append(
                VerifyEntry(
                    point=p,
                    tau_bar=tau_bar,
                    q_closed_form=closed,
                    q_oracle=None,
                    deviation=None,
                    error=str(exc),
                )
            )
            continue
        entries.append(
            VerifyEntry(
                point=p,
                tau_bar=tau_bar,
                q_closed_form=closed,
                q_oracle=oracle,
                deviation=abs(oracle - closed),
            )
        )
    return VerifyReport(entries=tuple(entries), tolerance=cfg.verify_tolerance)


def parse_grid(text: str, key: str) -> tuple[float, ...]:
    """Parse a grid spec: comma-separated values or ``start:stop:count``."""
    text = text.strip()
    if not text:
        raise ConfigError(f"{key}: empty grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: range spec must be start:stop:count, got {text!r}")
        try:
            start, stop = float(parts[0]), float(parts[1])
            count = int(parts[2])
        except ValueError as exc:
            raise ConfigError(f"{key}: bad range spec {text!r}") from exc
        if count < 2:
            raise ConfigError(f"{key}: range count must be >= 2, got {count}")
        step = (stop - start) / (count - 1)
        return tuple(start + i * step for i in range(count))
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"{key}: bad grid value in {text!r}") from exc


_BOOL_STRINGS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}

#: Keys accepted in a config file (SweepConfig fields plus the phase pair and
#: temperature-list alternatives resolved by :func:`build_config`).
CONFIG_KEYS = tuple(f.name for f in fields(SweepConfig)) + ("theta", "psi", "beta_hw_list")


def _as_float(raw, key: str) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from exc


def _as_int(raw, key: str) -> int:
    try:
        return int(str(raw))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from exc


def _as_bool(raw, key: str) -> bool:
    if isinstance(raw, bool):
        return raw
    value = _BOOL_STRINGS.get(str(raw).strip().lower())
    if value is None:
        raise ConfigError(f"{key}: expected true/false, got {raw!r}")
    return value


def _as_grid(raw, key: str) -> tuple[float, ...]:
    if isinstance(raw, str):
        return parse_grid(raw, key)
    try:
        return tuple(float(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: expected a grid, got {raw!r}") from exc


def build_config(mapping: dict) -> SweepConfig:
    """Build a validated SweepConfig from string-or-typed key/value pairs.

    Accepts the SweepConfig field names plus two alternative spellings:
    ``theta``/``psi`` instead of ``phi`` (converted as phi = theta - psi/2)
    and ``beta_hw_list`` (photon energies over k_B*T) instead of ``nth_list``,
    converted through :func:`thermal_occupancy`.
    """
    data = {key: value for key, value in mapping.items() if value is not None}
    for key in data:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{key}: unknown configuration key")

    if "state" not in data:
        raise ConfigError("state: required")
    if "beta_sq_grid" not in data:
        raise ConfigError("beta_sq_grid: required")

    if "phi" in data and ("theta" in data or "psi" in data):
        raise ConfigError("phi: give either phi or the pair theta, psi, not both")
    phi = _as_float(data["phi"], "phi") if "phi" in data else None
    if "theta" in data or "psi" in data:
        if not ("theta" in data and "psi" in data):
            raise ConfigError("theta, psi: both are required when phi is not given")
        phi = _as_float(data["theta"], "theta") - _as_float(data["psi"], "psi") / 2.0

    if "nth_list" in data and "beta_hw_list" in data:
        raise ConfigError("nth_list: give either nth_list or beta_hw_list, not both")
    if "beta_hw_list" in data:
        nth_list = []
        for i, value in enumerate(_as_grid(data["beta_hw_list"], "beta_hw_list")):
            try:
                nth_list.append(thermal_occupancy(value))
            except DomainError as exc:
                raise ConfigError(f"beta_hw_list[{i}]: {exc}") from exc
        nth_list = tuple(nth_list)
    elif "nth_list" in data:
        nth_list = _as_grid(data["nth_list"], "nth_list")
    else:
        raise ConfigError("nth_list: required (directly or via beta_hw_list)")

    return SweepConfig(
        state=str(data["state"]),
        beta_sq_grid=_as_grid(data["beta_sq_grid"], "beta_sq_grid"),
        f_list=_as_grid(data["f_list"], "f_list") if "f_list" in data else (0.0,),
        nth_list=nth_list,
        r=_as_float(data["r"], "r") if "r" in data else None,
        phi=phi,
        out=Path(str(data["out"])) if "out" in data else Path("sweep.csv"),
        verify=_as_bool(data["verify"], "verify") if "verify" in data else False,
        verify_tolerance=(
            _as_float(data["verify_tolerance"], "verify_tolerance")
            if "verify_tolerance" in data
            else 1e-8
        ),
        verify_samples=(
            _as_int(data["verify_samples"], "verify_samples") if "verify_samples" in data else 5
        ),
        truncation=_as_int(data["truncation"], "truncation") if "truncation" in data else None,
    )


def read_config_file(path: Path | str) -> dict[str, str]:
    """Parse a ``key = value`` config file; '#' starts a comment."""
    mapping: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
            key, _, value = stripped.partition("=")
            mapping[key.strip()] = value.strip()
    return mapping
