"""Parameter sweeps over time and coupling ratio, figure presets, and output."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import numpy as np

from .core import (
    EVOLUTION_MODES,
    PROPAGATOR_FORMS,
    AtomPair,
    SystemConfig,
    coherent_amplitudes,
    excited_state,
    ground_state,
    partial_entangled_preparation,
    product_preparation,
)
from .errors import CavityPairError, InvalidInputError
from .evolution import ExactEvolver, PaperEvolver, reduce_single, reduce_two_qubit, TwoQubitDensity
from .measures import degree_of_entanglement, info_report
from .propagator import BlockSpectrum

log = logging.getLogger(__name__)

DISCREPANCY_LOG_THRESHOLD = 1e-8
_THETA_FIG = math.pi / 3


@dataclass(frozen=True)
class TimeGrid:
    start: float
    stop: float
    num: int

    def values(self) -> tuple[float, ...]:
        return tuple(np.linspace(self.start, self.stop, self.num).tolist())


_RUN_SETTINGS = ("output", "format", "jobs")


@dataclass(frozen=True)
class SweepConfig:
    r_values: tuple[float, ...]
    nbar: float
    t_grid: TimeGrid | tuple[float, ...]
    preparation: dict = field(default_factory=lambda: {"kind": "ground"})
    evolution_mode: str = "paper"
    propagator_form: str = "spectral"
    truncation_epsilon: float = 1e-12
    output: str | None = None
    format: str = "csv"
    jobs: int = 1
    name: str = "custom"
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "r_values", tuple(float(r) for r in self.r_values))
        if not self.r_values:
            raise InvalidInputError("at least one coupling ratio is required")
        if not isinstance(self.t_grid, TimeGrid):
            object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))
        if self.format not in ("csv", "json"):
            raise InvalidInputError(f"unknown output format {self.format!r}")
        if int(self.jobs) < 1:
            raise InvalidInputError("jobs must be >= 1")
        # resolving both catches every field-level error up front
        self.atoms()
        for r in self.r_values:
            self.system(r)

    def times(self) -> tuple[float, ...]:
        return self.t_grid.values() if isinstance(self.t_grid, TimeGrid) else self.t_grid

    def system(self, r: float) -> SystemConfig:
        return SystemConfig(
            r=r,
            nbar=self.nbar,
            t_grid=self.times(),
            evolution_mode=self.evolution_mode,
            propagator_form=self.propagator_form,
            truncation_epsilon=self.truncation_epsilon,
        )

    def atoms(self) -> AtomPair:
        return resolve_preparation(self.preparation)

    def to_dict(self, run_settings: bool = True) -> dict[str, Any]:
        """Plain-data form; ``run_settings=False`` drops output, format and jobs."""
        d = asdict(self)
        if not run_settings:
            for key in _RUN_SETTINGS:
                d.pop(key)
        d["r_values"] = list(self.r_values)
        d["t_grid"] = asdict(self.t_grid) if isinstance(self.t_grid, TimeGrid) else list(self.t_grid)
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SweepConfig":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known - {"r"}
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
        if "r" in data:
            data["r_values"] = [data.pop("r")]
        grid = data.get("t_grid")
        if isinstance(grid, dict):
            data["t_grid"] = TimeGrid(float(grid["start"]), float(grid["stop"]), int(grid["num"]))
        for key in ("r_values", "nbar", "t_grid"):
            if key not in data:
                raise InvalidInputError(f"config is missing {key!r}")
        return cls(**data)


def _complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(re, im)
    return complex(value)


def resolve_preparation(prep: dict) -> AtomPair:
    kind = prep.get("kind")
    if kind == "ground":
        return ground_state()
    if kind == "excited":
        return excited_state()
    if kind == "partial":
        return partial_entangled_preparation(float(prep["theta"]))
    if kind == "product":
        return product_preparation(*(_complex(prep[k]) for k in ("a1", "b1", "a2", "b2")))
    raise InvalidInputError(f"unknown preparation {prep!r}")


@dataclass(frozen=True)
class MetricsRow:
    tau: float
    r: float
    ppt_min: float
    doe: float
    xi1: float
    xi2: float
    xi12: float
    I_l1: float
    I_l2: float
    I_total: float
    I_nl: float
    mode: str
    propagator_form: str
    max_propagator_discrepancy: float


ROW_FIELDS = tuple(f.name for f in fields(MetricsRow))
_STR_FIELDS = ("mode", "propagator_form")


# (description, preparation, nbar, r values, grid)
_LONG = TimeGrid(0.0, 25.0, 400)
_LONGER = TimeGrid(0.0, 50.0, 400)
_SHORT = TimeGrid(0.0, 1.0, 200)
_GROUND = {"kind": "ground"}
_PARTIAL = {"kind": "partial", "theta": _THETA_FIG}
_PRESETS: dict[str, tuple[str, dict, float, tuple[float, ...], TimeGrid]] = {
    "fig1a": ("PPT minimum eigenvalue, ground start", _GROUND, 5, (0.1, 0.8), _LONG),
    "fig1b": ("PPT minimum eigenvalue, ground start", _GROUND, 10, (0.1, 0.8), _LONG),
    "fig2a": ("PPT minimum eigenvalue, partially entangled start", _PARTIAL, 5, (0.1, 0.8), _LONG),
    "fig2b": ("PPT minimum eigenvalue, partially entangled start", _PARTIAL, 10, (0.1, 0.8), _LONG),
    "fig3a": ("DOE, ground start", _GROUND, 5, (0.1, 0.8), _LONGER),
    "fig3b": ("DOE, ground start", _GROUND, 10, (0.1, 0.8), _LONGER),
    "fig3c": ("DOE at short times, ground start", _GROUND, 5, (0.1, 0.8), _SHORT),
    "fig4a": ("DOE, partially entangled start", _PARTIAL, 5, (0.1, 0.8), _LONGER),
    "fig4b": ("DOE, partially entangled start", _PARTIAL, 10, (0.1, 0.8), _LONGER),
    "fig4c": ("DOE at short times, partially entangled start", _PARTIAL, 5, (0.1, 0.8), _SHORT),
    # panels a,b use r=0.1 and c,d use r=0.8 (body text); both series are emitted
    "fig5": ("impurities and information, ground start", _GROUND, 10, (0.1, 0.8), _LONG),
    # body text: nbar=5 for panels a,b and nbar=7 for c,d, all at r=0.1
    "fig6a": ("impurities, ground start", _GROUND, 5, (0.1,), _LONG),
    "fig6b": ("local and non-local information, ground start", _GROUND, 5, (0.1,), _LONG),
    "fig6c": ("impurities, ground start", _GROUND, 7, (0.1,), _LONG),
    "fig6d": ("local and non-local information, ground start", _GROUND, 7, (0.1,), _LONG),
    "fig7a": ("impurities, partially entangled start", _PARTIAL, 7, (0.1,), _LONG),
    "fig7b": ("local and non-local information, partially entangled start", _PARTIAL, 7, (0.1,), _LONG),
}
PRESET_NAMES = tuple(_PRESETS)


def figure_preset(name: str) -> SweepConfig:
    try:
        description, prep, nbar, rs, grid = _PRESETS[name]
    except KeyError:
        raise InvalidInputError(
            f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}"
        ) from None
    return SweepConfig(
        r_values=rs,
        nbar=float(nbar),
        t_grid=grid,
        preparation=dict(prep),
        name=name,
        description=description,
    )


def _reference_states(atoms: AtomPair) -> tuple[np.ndarray, np.ndarray]:
    """Dominant eigenvector of each atom's initial marginal."""
    rho12 = TwoQubitDensity(atoms.density())
    return tuple(np.linalg.eigh(reduce_single(rho12, k).rho)[1][:, -1] for k in (1, 2))


class SweepPointError(CavityPairError):
    """A numerical check failed at one sweep point."""


@dataclass
class _Series:
    r: float
    nbar: float
    mode: str
    form: str
    evolver: PaperEvolver | ExactEvolver
    checker: BlockSpectrum
    phi1: np.ndarray
    phi2: np.ndarray

    def row(self, tau: float) -> MetricsRow:
        try:
            state = self.evolver.state(tau)
            rho12 = reduce_two_qubit(state)
            rho12.validate(f"tau={tau}, r={self.r}, nbar={self.nbar}")
            ppt = degree_of_entanglement(rho12)
            info = info_report(rho12, self.phi1, self.phi2)
        except CavityPairError as exc:
            raise SweepPointError(f"tau={tau}, r={self.r}, nbar={self.nbar}: {exc}") from exc
        check_form = "analytic_corrected" if self.form == "spectral" else self.form
        row = MetricsRow(
            tau=tau,
            r=self.r,
            ppt_min=ppt.min_eigenvalue,
            doe=ppt.doe,
            xi1=info.xi1,
            xi2=info.xi2,
            xi12=info.xi12,
            I_l1=info.I_local_1,
            I_l2=info.I_local_2,
            I_total=info.I_local_total,
            I_nl=info.I_nonlocal,
            mode=self.mode,
            propagator_form=self.form,
            max_propagator_discrepancy=self.checker.discrepancy(tau, check_form),
        )
        bad = [k for k in ROW_FIELDS if k not in _STR_FIELDS and not math.isfinite(getattr(row, k))]
        if bad:
            raise SweepPointError(f"tau={tau}, r={self.r}, nbar={self.nbar}: non-finite {bad}")
        return row


def _build_series(config: SweepConfig, r: float) -> _Series:
    system = config.system(r)
    atoms = config.atoms()
    field_ = coherent_amplitudes(system.alpha, system.truncation_epsilon)
    if system.evolution_mode == "paper":
        evolver = PaperEvolver(atoms, field_, r, system.propagator_form)
        checker = evolver.spectrum
    else:
        evolver = ExactEvolver(atoms, field_, r)
        checker = BlockSpectrum(field_.n_max, r)
    phi1, phi2 = _reference_states(atoms)
    return _Series(r, system.nbar, system.evolution_mode, system.propagator_form, evolver, checker, phi1, phi2)


def _run_chunk(series: _Series, taus: list[float]) -> list[MetricsRow]:
    return [series.row(t) for t in taus]


def _chunks(items: list[float], n: int) -> list[list[float]]:
    size = max(1, math.ceil(len(items) / n))
    return [items[i : i + size] for i in range(0, len(items), size)]


def run_sweep(config: SweepConfig) -> list[MetricsRow]:
    """Metrics for every (r, tau) cell, ordered by r then tau.

    Decompositions are computed once in this process and shipped to the
    workers, so the rows do not depend on ``config.jobs``.
    """
    taus = list(config.times())
    all_series = [_build_series(config, r) for r in config.r_values]
    if config.jobs == 1:
        return [row for s in all_series for row in _run_chunk(s, taus)]
    tasks = [(s, chunk) for s in all_series for chunk in _chunks(taus, config.jobs)]
    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
        results = pool.map(_run_chunk, *zip(*tasks))
        return [row for chunk in results for row in chunk]


def max_discrepancy(rows: list[MetricsRow]) -> float:
    return max((row.max_propagator_discrepancy for row in rows), default=0.0)


def _fmt(value) -> str:
    return value if isinstance(value, str) else format(value, ".17g")


def _config_line(config: SweepConfig | dict) -> str:
    data = config.to_dict(run_settings=False) if isinstance(config, SweepConfig) else config
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def render(rows: list[MetricsRow], config: SweepConfig | dict, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# config: {_config_line(config)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ROW_FIELDS)
        for row in rows:
            writer.writerow([_fmt(getattr(row, k)) for k in ROW_FIELDS])
        return buf.getvalue()
    if fmt == "json":
        data = config.to_dict(run_settings=False) if isinstance(config, SweepConfig) else config
        payload = {"config": data, "rows": [asdict(row) for row in rows]}
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"
    raise InvalidInputError(f"unknown output format {fmt!r}")


def emit(rows: list[MetricsRow], config: SweepConfig | dict, fmt: str, path: str | Path) -> Path:
    path = Path(path)
    text = render(rows, config, fmt)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def _row_from_strings(record: dict[str, str]) -> MetricsRow:
    return MetricsRow(**{k: (record[k] if k in _STR_FIELDS else float(record[k])) for k in ROW_FIELDS})


def parse(text: str, fmt: str = "csv") -> tuple[dict, list[MetricsRow]]:
    """Inverse of :func:`render`."""
    if fmt == "json":
        payload = json.loads(text)
        return payload["config"], [MetricsRow(**row) for row in payload["rows"]]
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# config: "):
        raise InvalidInputError("missing config metadata line")
    config = json.loads(lines[0][len("# config: ") :])
    reader = csv.DictReader(lines[1:])
    return config, [_row_from_strings(rec) for rec in reader]


def load(path: str | Path) -> tuple[dict, list[MetricsRow]]:
    path = Path(path)
    fmt = "json" if path.suffix == ".json" else "csv"
    return parse(path.read_text(encoding="utf-8"), fmt)


def load_config(path: str | Path) -> SweepConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"config {path} is not valid JSON: {exc}") from exc
    return SweepConfig.from_dict(data)


def with_overrides(config: SweepConfig, **overrides) -> SweepConfig:
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})


__all__ = [
    "EVOLUTION_MODES",
    "PROPAGATOR_FORMS",
    "MetricsRow",
    "PRESET_NAMES",
    "SweepConfig",
    "TimeGrid",
    "emit",
    "figure_preset",
    "load",
    "load_config",
    "parse",
    "render",
    "run_sweep",
]
