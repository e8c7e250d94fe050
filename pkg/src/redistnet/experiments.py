"""Experiment orchestration: configs, parameter grids, presets, results I/O.

An experiment is a grid of cells (network kind x temptation x taxation level
x threshold x bracket schedule x assignment rule); each cell runs a batch of
replicates spread evenly over independently generated network instances and
aggregates them into one result row.  Everything is deterministic given the
master seed: networks, beneficiary sets, and replicates all draw their seeds
from per-item spawn keys, so neither scheduling order nor resuming a partial
run changes any number.
"""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__ as _pkg_version
from .dynamics import DynamicsParams, run_replicate
from .game import GameParams, critical_alpha_rows
from .metrics import aggregate, inequality_ratio
from .network import Network, generate_homogeneous, generate_scale_free
from .redistribution import Extended, Nearest, Random, TaxPolicy, assign

ResultRow = dict[str, Any]

_MODES = ("dynamics", "inequality", "analytic")
_FORMATS = ("csv", "json")

# Statistics columns in emitted order, per mode (parameters come first,
# alphabetically).  duration_s is kept on in-memory rows but never written:
# output files must be byte-identical across reruns with the same seed.
_DYNAMICS_STATS = (
    "cooperation_level",
    "coop_stderr",
    "fixation_time_mean",
    "fixation_count",
    "replicate_count",
)
_INEQUALITY_STATS = ("var_payoff", "var_fitness", "ratio", "ratio_spread", "instance_count")
_VOLATILE_FIELDS = ("duration_s",)


class ConfigError(ValueError):
    """Invalid experiment configuration; names the offending field."""

    def __init__(self, fieldname: str, message: str):
        super().__init__(f"{fieldname}: {message}")
        self.fieldname = fieldname


@dataclass(frozen=True)
class NetworkSpec:
    kind: str  # "homogeneous" | "scale_free"
    degree: int = 4  # homogeneous only
    m: int = 2  # scale_free only

    @property
    def label(self) -> str:
        if self.kind == "homogeneous":
            return f"homogeneous-z{self.degree}"
        return f"scale_free-m{self.m}"

    def generate(self, node_count: int, rng) -> Network:
        if self.kind == "homogeneous":
            return generate_homogeneous(node_count, self.degree, rng)
        return generate_scale_free(node_count, self.m, rng)

    def validate(self, node_count: int):
        if self.kind not in ("homogeneous", "scale_free"):
            raise ConfigError("networks", f"unknown network kind {self.kind!r}")
        if self.kind == "homogeneous":
            if self.degree < 2:
                raise ConfigError("networks", "homogeneous degree must be >= 2")
            if node_count <= self.degree + 1:
                raise ConfigError("networks", "node_count must exceed degree + 1")
            if (node_count * self.degree) % 2 != 0:
                raise ConfigError("networks", "node_count * degree must be even")
        else:
            if node_count <= 3:
                raise ConfigError("node_count", "scale-free networks need node_count > 3")
            if not 1 <= self.m < node_count:
                raise ConfigError("networks", "m must satisfy 1 <= m < node_count")

    def to_dict(self) -> dict:
        if self.kind == "homogeneous":
            return {"kind": self.kind, "degree": self.degree}
        return {"kind": self.kind, "m": self.m}

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkSpec":
        known = {"kind", "degree", "m"}
        extra = set(d) - known
        if extra:
            raise ConfigError("networks", f"unknown network field(s) {sorted(extra)}")
        return cls(**d)


def parse_rule(text: str):
    """"nearest" | "random" | "extended:<d>" -> assignment rule object."""
    if text == "nearest":
        return Nearest()
    if text == "random":
        return Random()
    if text.startswith("extended:"):
        try:
            d = int(text.split(":", 1)[1])
        except ValueError:
            raise ConfigError("rules", f"bad extended distance in {text!r}") from None
        if d < 1:
            raise ConfigError("rules", "extended distance d must be >= 1")
        return Extended(d)
    raise ConfigError("rules", f"unknown assignment rule {text!r}")


@dataclass
class ExperimentConfig:
    name: str
    mode: str = "dynamics"
    networks: list[NetworkSpec] = field(
        default_factory=lambda: [NetworkSpec("homogeneous"), NetworkSpec("scale_free")]
    )
    node_count: int = 1000
    network_instances: int = 20
    replicates_per_cell: int = 500  # per network instance
    temptations: list[float] = field(default_factory=lambda: [1.5])
    alphas: list[float] = field(default_factory=lambda: [0.0])
    thetas: list[float] = field(default_factory=lambda: [1.0])
    bracket_specs: list = field(default_factory=lambda: ["legacy"])
    rules: list[str] = field(default_factory=lambda: ["nearest"])
    beta: float = 1.0
    max_iterations: int = 2_500_000
    master_seed: int = 0
    output_format: str = "csv"

    def validate(self):
        if self.mode not in _MODES:
            raise ConfigError("mode", f"must be one of {_MODES}")
        if self.output_format not in _FORMATS:
            raise ConfigError("output_format", f"must be one of {_FORMATS}")
        if not self.networks:
            raise ConfigError("networks", "at least one network spec required")
        for spec in self.networks:
            spec.validate(self.node_count)
        if len({s.label for s in self.networks}) != len(self.networks):
            raise ConfigError("networks", "duplicate network specs")
        if self.network_instances < 1:
            raise ConfigError("network_instances", "must be >= 1")
        if self.replicates_per_cell < 1:
            raise ConfigError("replicates_per_cell", "must be >= 1")
        if not self.temptations:
            raise ConfigError("temptations", "empty grid")
        for t in self.temptations:
            if not 1.0 < t <= 2.0:
                raise ConfigError("temptations", f"T={t} outside (1, 2]")
        if not self.alphas:
            raise ConfigError("alphas", "empty grid")
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise ConfigError("alphas", f"alpha={a} outside [0, 1]")
        if not self.thetas:
            raise ConfigError("thetas", "empty grid")
        for th in self.thetas:
            if th < 0.0:
                raise ConfigError("thetas", f"theta={th} must be >= 0")
        if not self.bracket_specs:
            raise ConfigError("bracket_specs", "empty grid")
        for b in self.bracket_specs:
            if b == "legacy":
                continue
            if not isinstance(b, int) or isinstance(b, bool) or b < 0:
                raise ConfigError("bracket_specs", f"bad bracket spec {b!r}")
        if not self.rules:
            raise ConfigError("rules", "empty grid")
        for r in self.rules:
            parse_rule(r)
        if self.beta < 0.0:
            raise ConfigError("beta", "must be >= 0")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations", "must be >= 1")
        if not isinstance(self.master_seed, int):
            raise ConfigError("master_seed", "must be an integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["networks"] = [s.to_dict() for s in self.networks]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ConfigError(sorted(extra)[0], "unknown config field")
        if "networks" in d:
            d["networks"] = [NetworkSpec.from_dict(s) for s in d["networks"]]
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError("config", str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be a JSON object")
        return cls.from_dict(data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _policy_for(alpha: float, theta: float, bracket_spec) -> TaxPolicy:
    if bracket_spec == "legacy":
        return TaxPolicy(alpha=alpha, theta=theta, brackets=2, legacy_two_bracket=True)
    return TaxPolicy(alpha=alpha, theta=theta, brackets=int(bracket_spec),
                     legacy_two_bracket=False)


def _network_seed(master_seed: int, spec_idx: int, instance: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(0, spec_idx, instance))


def _replicate_seed(master_seed: int, cell_idx: int, instance: int, rep: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(1, cell_idx, instance, rep))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _assignment_seed(master_seed: int, cell_idx: int, instance: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(2, cell_idx, instance))


class _NetworkCache:
    """Network instances shared across grid cells (same 20 networks serve the
    whole sweep, as in the source experiments)."""

    def __init__(self, config: ExperimentConfig):
        self._config = config
        self._nets: dict[tuple[int, int], Network] = {}

    def get(self, spec_idx: int, instance: int) -> Network:
        key = (spec_idx, instance)
        if key not in self._nets:
            spec = self._config.networks[spec_idx]
            rng = np.random.default_rng(
                _network_seed(self._config.master_seed, spec_idx, instance)
            )
            self._nets[key] = spec.generate(self._config.node_count, rng)
        return self._nets[key]


def _dynamics_cells(config: ExperimentConfig):
    return itertools.product(
        range(len(config.networks)),
        config.temptations,
        config.alphas,
        config.thetas,
        config.bracket_specs,
        config.rules,
    )


def _inequality_cells(config: ExperimentConfig):
    return itertools.product(
        range(len(config.networks)),
        config.alphas,
        config.thetas,
        config.bracket_specs,
        config.rules,
    )


def _rule_columns(rule_text: str) -> tuple[str, int | None]:
    rule = parse_rule(rule_text)
    if isinstance(rule, Extended):
        return "extended", rule.d
    return rule_text, None


def _run_dynamics_cell(config, nets_cache, cell_idx, cell, workers) -> ResultRow:
    spec_idx, temptation, alpha, theta, bracket_spec, rule_text = cell
    spec = config.networks[spec_idx]
    rule = parse_rule(rule_text)
    policy = _policy_for(alpha, theta, bracket_spec)
    game = GameParams(temptation)
    started = time.perf_counter()

    jobs = []
    for k in range(config.network_instances):
        net = nets_cache.get(spec_idx, k)
        if isinstance(rule, Random):
            assignment = None  # sampled once per replicate from its own seed
        else:
            assignment = assign(net, rule)
        for r in range(config.replicates_per_cell):
            seed = _replicate_seed(config.master_seed, cell_idx, k, r)
            dyn = DynamicsParams(beta=config.beta, max_iterations=config.max_iterations,
                                 rng_seed=seed)
            jobs.append((net, dyn, assignment))

    def run_one(job):
        net, dyn, assignment = job
        return run_replicate(net, rule, policy, game, dyn, assignment=assignment)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_one, jobs))
    else:
        outcomes = [run_one(job) for job in jobs]

    stats = aggregate(outcomes, config.node_count)
    rule_name, d = _rule_columns(rule_text)
    row: ResultRow = {
        "alpha": alpha,
        "brackets": bracket_spec,
        "d": d,
        "kind": spec.label,
        "rule": rule_name,
        "temptation": temptation,
        "theta": theta,
        "cooperation_level": stats.cooperation_level,
        "coop_stderr": stats.coop_stderr,
        "fixation_time_mean": stats.fixation_time_mean,
        "fixation_count": stats.fixation_count,
        "replicate_count": stats.replicate_count,
        "duration_s": time.perf_counter() - started,
    }
    return row


def _run_inequality_cell(config, nets_cache, cell_idx, cell) -> ResultRow:
    spec_idx, alpha, theta, bracket_spec, rule_text = cell
    spec = config.networks[spec_idx]
    rule = parse_rule(rule_text)
    policy = _policy_for(alpha, theta, bracket_spec)
    game = GameParams(config.temptations[0])  # all-C payoffs do not depend on T
    started = time.perf_counter()

    var_p, var_f, ratios = [], [], []
    for k in range(config.network_instances):
        net = nets_cache.get(spec_idx, k)
        rng = np.random.default_rng(_assignment_seed(config.master_seed, cell_idx, k))
        assignment = assign(net, rule, rng)
        report = inequality_ratio(net, assignment, policy, game)
        var_p.append(report.var_payoff)
        var_f.append(report.var_fitness)
        if report.ratio is not None:
            ratios.append(report.ratio)

    rule_name, d = _rule_columns(rule_text)
    row: ResultRow = {
        "alpha": alpha,
        "brackets": bracket_spec,
        "d": d,
        "kind": spec.label,
        "rule": rule_name,
        "theta": theta,
        "var_payoff": float(np.mean(var_p)),
        "var_fitness": float(np.mean(var_f)),
        "ratio": float(np.mean(ratios)) if ratios else None,
        "ratio_spread": float(np.max(ratios) - np.min(ratios)) if ratios else None,
        "instance_count": config.network_instances,
        "duration_s": time.perf_counter() - started,
    }
    return row


def _cell_key(row: ResultRow, param_names: tuple[str, ...]) -> tuple:
    return tuple(str(row[p]) for p in param_names)


def _param_names(mode: str) -> tuple[str, ...]:
    if mode == "dynamics":
        return ("alpha", "brackets", "d", "kind", "rule", "temptation", "theta")
    if mode == "inequality":
        return ("alpha", "brackets", "d", "kind", "rule", "theta")
    return ("theta", "T")


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    workers: int = 1,
    progress: bool = False,
) -> list[ResultRow]:
    """Run all grid cells and return one result row per cell.

    With ``out_dir`` set, every completed cell is appended to a progress CSV
    so an interrupted run can resume (already-present cells are loaded, not
    recomputed; per-cell seeding makes the numbers identical either way), and
    the final rows are emitted as ``<name>.<format>`` plus a ``runinfo`` JSON
    carrying the resolved config and wall-clock timing.
    """
    config.validate()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    started = time.perf_counter()

    if config.mode == "analytic":
        rows = critical_alpha_rows(config.thetas, config.temptations)
        if out_dir is not None:
            _write_outputs(config, rows, out_dir, started)
        return rows

    param_names = _param_names(config.mode)
    done: dict[tuple, ResultRow] = {}
    progress_path = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        progress_path = out_dir / f"{config.name}.progress.csv"
        if progress_path.exists():
            for row in read_rows(progress_path):
                done[_cell_key(row, param_names)] = row

    nets_cache = _NetworkCache(config)
    cells = list(_dynamics_cells(config) if config.mode == "dynamics"
                 else _inequality_cells(config))
    rows: list[ResultRow] = []
    for cell_idx, cell in enumerate(cells):
        key = _run_key(config, cell)
        if key in done:
            rows.append(done[key])
            continue
        if config.mode == "dynamics":
            fresh = _run_dynamics_cell(config, nets_cache, cell_idx, cell, workers)
        else:
            fresh = _run_inequality_cell(config, nets_cache, cell_idx, cell)
        rows.append(fresh)
        if progress_path is not None:
            _append_progress(progress_path, fresh)
        if progress:
            print(f"[{cell_idx + 1}/{len(cells)}] {_describe_cell(fresh, param_names)}")

    if out_dir is not None:
        _write_outputs(config, rows, out_dir, started)
    return rows


def _run_key(config: ExperimentConfig, cell) -> tuple:
    if config.mode == "dynamics":
        spec_idx, temptation, alpha, theta, bracket_spec, rule_text = cell
        rule_name, d = _rule_columns(rule_text)
        probe = {
            "alpha": alpha, "brackets": bracket_spec, "d": d,
            "kind": config.networks[spec_idx].label, "rule": rule_name,
            "temptation": temptation, "theta": theta,
        }
    else:
        spec_idx, alpha, theta, bracket_spec, rule_text = cell
        rule_name, d = _rule_columns(rule_text)
        probe = {
            "alpha": alpha, "brackets": bracket_spec, "d": d,
            "kind": config.networks[spec_idx].label, "rule": rule_name,
            "theta": theta,
        }
    return _cell_key(probe, _param_names(config.mode))


def _describe_cell(row: ResultRow, param_names) -> str:
    return " ".join(f"{p}={row[p]}" for p in param_names if row.get(p) is not None)


def _append_progress(path: Path, row: ResultRow):
    new_file = not path.exists()
    with open(path, "a", encoding="utf-8") as fh:
        keys = [k for k in row if k not in _VOLATILE_FIELDS]
        if new_file:
            fh.write(",".join(keys) + "\n")
        fh.write(",".join(_csv_value(row[k]) for k in keys) + "\n")


def _write_outputs(config: ExperimentConfig, rows: list[ResultRow], out_dir, started):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result_path = out_dir / f"{config.name}.{config.output_format}"
    emit(rows, config.output_format, result_path)
    runinfo = {
        "config": config.to_dict(),
        "version": _pkg_version,
        "rows": len(rows),
        "duration_s": time.perf_counter() - started,
    }
    with open(out_dir / f"{config.name}.runinfo.json", "w", encoding="utf-8") as fh:
        json.dump(runinfo, fh, indent=2)
        fh.write("\n")


def _csv_value(v) -> str:
    if v is None:
        return ""
    return str(v)


def emit(rows: list[ResultRow], output_format: str, destination) -> None:
    """Write rows as CSV (single header row) or JSON (array of flat objects).

    Volatile fields (wall-clock durations) are dropped so files produced from
    the same seed are byte-identical.  Numbers are written with full
    round-trip precision.
    """
    if output_format not in _FORMATS:
        raise ValueError(f"unknown format {output_format!r}")
    if not rows:
        raise ValueError("no rows to emit")
    clean = [{k: v for k, v in row.items() if k not in _VOLATILE_FIELDS} for row in rows]

    own = not hasattr(destination, "write")
    fh = open(destination, "w", encoding="utf-8") if own else destination
    try:
        if output_format == "csv":
            keys = list(clean[0].keys())
            fh.write(",".join(keys) + "\n")
            for row in clean:
                fh.write(",".join(_csv_value(row.get(k)) for k in keys) + "\n")
        else:
            json.dump(clean, fh, indent=2)
            fh.write("\n")
    finally:
        if own:
            fh.close()


def _parse_scalar(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_rows(path) -> list[ResultRow]:
    """Read back an emitted file (CSV or JSON by extension)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return json.loads(text)
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    return [
        {k: _parse_scalar(v) for k, v in zip(header, line.split(","))}
        for line in lines[1:]
    ]


# --- presets -----------------------------------------------------------------

_PAPER_Z = 1000
_PAPER_INSTANCES = 20
_PAPER_REPLICATES = 500  # per instance: 20 x 500 = 1e4 simulations per cell
_PAPER_ITERATIONS = 2_500_000

_T_GRID = [round(1.0 + 0.1 * k, 10) for k in range(1, 11)]  # 1.1 .. 2.0
_ALPHA_GRID = [round(0.1 * k, 10) for k in range(11)]  # 0.0 .. 1.0

PRESETS = {
    "fig2": "critical taxation curves (analytic, no simulation)",
    "fig4": "cooperation heatmap over (alpha, T) at theta=1, both networks",
    "fig5": "threshold sweep: theta in 0..2 at alpha=0.5, both networks",
    "fig6": "nearest vs random beneficiary sets at theta=0.5, alpha=0.9",
    "fig7": "extended beneficiary sets d=1..4 at theta=0.5, alpha=0.9",
    "fig8": "fixation-time map over (alpha, T) at theta=1 (same grid as fig4)",
    "fig10": "wealth-inequality variance ratio on scale-free all-C populations",
    "brackets": "bracket schedules B=3,4,5 vs the single-threshold baseline",
}


def preset(name: str, scale: float = 1.0) -> ExperimentConfig:
    """Experiment config for one of the source figures.

    ``scale`` multiplies population size, instance count, replicate count,
    and the iteration cap; the parameter grids themselves are fixed.
    ``scale=1`` is the full-size setup (Z=1e3, 1e4 simulations per cell) and
    is expensive; around 0.1-0.2 is a desk-scale run.
    """
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r} (try: {', '.join(PRESETS)})")
    if scale <= 0:
        raise ConfigError("scale", "must be > 0")

    z = max(10, round(_PAPER_Z * scale))
    if z % 2:
        z += 1  # keep node_count * degree even for the 4-regular generator
    base = dict(
        node_count=z,
        network_instances=max(1, round(_PAPER_INSTANCES * scale)),
        replicates_per_cell=max(1, round(_PAPER_REPLICATES * scale)),
        max_iterations=max(1000, round(_PAPER_ITERATIONS * scale)),
    )
    both = [NetworkSpec("homogeneous", degree=4), NetworkSpec("scale_free", m=2)]
    sf = [NetworkSpec("scale_free", m=2)]

    if name == "fig2":
        return ExperimentConfig(
            name="fig2", mode="analytic",
            networks=both, temptations=[round(1.0 + 0.02 * k, 10) for k in range(1, 51)],
            thetas=[0.0, 0.25, 0.5, 0.75, 1.0], **base,
        )
    if name in ("fig4", "fig8"):
        return ExperimentConfig(
            name=name, networks=both, temptations=_T_GRID, alphas=_ALPHA_GRID,
            thetas=[1.0], **base,
        )
    if name == "fig5":
        return ExperimentConfig(
            name="fig5", networks=both, temptations=_T_GRID, alphas=[0.5],
            thetas=[0.0, 0.4, 0.8, 1.2, 1.6, 2.0], **base,
        )
    if name == "fig6":
        return ExperimentConfig(
            name="fig6", networks=both, temptations=_T_GRID, alphas=[0.9],
            thetas=[0.5], rules=["nearest", "random"], **base,
        )
    if name == "fig7":
        return ExperimentConfig(
            name="fig7", networks=both, temptations=_T_GRID, alphas=[0.9],
            thetas=[0.5], rules=["extended:1", "extended:2", "extended:3", "extended:4"],
            **base,
        )
    if name == "fig10":
        return ExperimentConfig(
            name="fig10", mode="inequality", networks=sf, temptations=[1.2],
            alphas=_ALPHA_GRID, thetas=[round(0.2 * k, 10) for k in range(11)], **base,
        )
    # brackets
    return ExperimentConfig(
        name="brackets", networks=sf, temptations=_T_GRID, alphas=[0.8], thetas=[1.0],
        bracket_specs=["legacy", 3, 4, 5], **base,
    )


def scaled(config: ExperimentConfig, scale: float) -> ExperimentConfig:
    """Apply the preset scale rule to an arbitrary config."""
    if scale <= 0:
        raise ConfigError("scale", "must be > 0")
    if scale == 1.0:
        return config
    z = max(10, round(config.node_count * scale))
    if z % 2:
        z += 1
    return replace(
        config,
        node_count=z,
        network_instances=max(1, round(config.network_instances * scale)),
        replicates_per_cell=max(1, round(config.replicates_per_cell * scale)),
        max_iterations=max(1000, round(config.max_iterations * scale)),
    )
