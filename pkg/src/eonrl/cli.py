"""Command-line harness: configs, presets, runs, and sweeps.

Config files are flat ``key = value`` text (``#`` comments). A ``preset``
key pulls in a named hyperparameter bundle; explicit keys always win over
preset values. Runs write ``results.csv`` (episode vs. per-algorithm mean
blocking probability) plus a JSON manifest sufficient to reproduce the run
bit-exactly. Sweeps expand a grid file into many runs on a bounded worker
pool (size via ``EONRL_WORKERS``) and summarize final-window blocking.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from .agents import ALGORITHMS, KSP_INF, QLEARNING, RL_ALGORITHMS, UCB, EpsilonSchedule, RewardPolicy
from .controller import ModulationTable
from .engine import CONGESTION_SCOPES, ExperimentConfig, run_experiment
from .presets import get_preset, preset_names, rl_preset_for
from .topology import Topology, TopologyError, load_topology_file, nsfnet_preset
from .traffic import DEFAULT_BIT_RATE_WEIGHTS, TrafficConfig

WORKERS_ENV_VAR = "EONRL_WORKERS"

_GENERAL_KEYS = (
    "erlang", "algorithms", "topology", "k", "episodes", "seeds",
    "requests_per_episode", "mean_holding", "cores_per_link", "slots_per_core",
    "guard_band_slots", "bit_rate_weights", "congestion_scope",
    "modulation_retry", "modulation_table", "final_window",
)
_RL_KEYS = (
    "reward_routed", "reward_blocked", "epsilon_start", "epsilon_end",
    "epsilon_mode", "alpha", "gamma", "c",
)
_KNOWN_KEYS = set(_GENERAL_KEYS) | set(_RL_KEYS) | {"preset", "algorithm"}
_DOTTED_KEYS = {f"{alg}.{key}" for alg in RL_ALGORITHMS for key in _RL_KEYS}


class ConfigError(ValueError):
    """Invalid, incomplete, or unknown experiment configuration."""


@dataclass
class HarnessConfig:
    """Fully resolved harness configuration for one run (>= 1 algorithms)."""

    erlang: float
    algorithms: tuple[str, ...]
    rl_params: dict[str, dict] = field(default_factory=dict)
    topology_source: str = "nsfnet"
    k: int | None = 3
    episodes: int = 100
    seeds: tuple[int, ...] = (1, 2, 3, 4)
    requests_per_episode: int = 2000
    mean_holding: float = 5.0
    cores_per_link: int = 4
    slots_per_core: int = 128
    guard_band_slots: int = 1
    bit_rate_weights: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_BIT_RATE_WEIGHTS))
    congestion_scope: str = "per_path"
    modulation_retry: bool = True
    modulation_table_path: str | None = None
    final_window: int = 10

    def load_topology(self) -> Topology:
        if self.topology_source == "nsfnet":
            return nsfnet_preset()
        return load_topology_file(self.topology_source)

    def load_modulation_table(self) -> ModulationTable:
        if self.modulation_table_path is None:
            return ModulationTable.default()
        return ModulationTable.from_file(self.modulation_table_path)

    def experiment_config(self, algorithm: str, topology: Topology | None = None) -> ExperimentConfig:
        if algorithm not in self.algorithms:
            raise ConfigError(f"algorithm {algorithm!r} not part of this run")
        params = self.rl_params.get(algorithm, {})
        reward_policy = None
        epsilon = None
        if algorithm in RL_ALGORITHMS:
            reward_policy = RewardPolicy(routed=params["reward_routed"], blocked=params["reward_blocked"])
            if params.get("epsilon_mode", "constant") == "linear":
                epsilon = EpsilonSchedule.linear(params["epsilon_start"], params["epsilon_end"])
            else:
                epsilon = EpsilonSchedule.constant(params["epsilon_start"])
        traffic = TrafficConfig(
            erlang=self.erlang,
            mean_holding=self.mean_holding,
            cores_per_link=self.cores_per_link,
            requests_per_episode=self.requests_per_episode,
            bit_rate_weights=dict(self.bit_rate_weights),
        )
        return ExperimentConfig(
            topology=topology if topology is not None else self.load_topology(),
            algorithm=algorithm,
            traffic=traffic,
            k=None if algorithm == KSP_INF else self.k,
            episodes=self.episodes,
            seeds=self.seeds,
            slots_per_core=self.slots_per_core,
            guard_band_slots=self.guard_band_slots,
            reward_policy=reward_policy,
            epsilon=epsilon,
            alpha=params.get("alpha"),
            gamma=params.get("gamma"),
            c=params.get("c"),
            congestion_scope=self.congestion_scope,
            modulation_retry=self.modulation_retry,
            modulation_table=self.load_modulation_table(),
        )

    def snapshot(self) -> dict[str, str]:
        """Canonical flat key/value form; re-parsing it reproduces this config."""
        snap = {
            "erlang": _fmt_float(self.erlang),
            "algorithms": ", ".join(self.algorithms),
            "topology": self.topology_source,
            "k": "inf" if self.k is None else str(self.k),
            "episodes": str(self.episodes),
            "seeds": ", ".join(str(s) for s in self.seeds),
            "requests_per_episode": str(self.requests_per_episode),
            "mean_holding": _fmt_float(self.mean_holding),
            "cores_per_link": str(self.cores_per_link),
            "slots_per_core": str(self.slots_per_core),
            "guard_band_slots": str(self.guard_band_slots),
            "bit_rate_weights": ", ".join(
                f"{rate}:{_fmt_float(w)}" for rate, w in sorted(self.bit_rate_weights.items())
            ),
            "congestion_scope": self.congestion_scope,
            "modulation_retry": "try_all" if self.modulation_retry else "first_only",
            "final_window": str(self.final_window),
        }
        if self.modulation_table_path is not None:
            snap["modulation_table"] = self.modulation_table_path
        for algorithm in self.algorithms:
            for key, value in sorted(self.rl_params.get(algorithm, {}).items()):
                snap[f"{algorithm}.{key}"] = value if isinstance(value, str) else _fmt_float(value)
        return snap


def _fmt_float(value: float) -> str:
    return repr(float(value))


# -- config parsing ----------------------------------------------------------


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Raw key/value pairs from flat config text; unknown keys are rejected."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        if key not in _KNOWN_KEYS and key not in _DOTTED_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        raw[key] = value
    return raw


def _parse_float(raw: Mapping[str, str], key: str) -> float:
    try:
        return float(raw[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {raw[key]!r}") from None


def _parse_int(raw: Mapping[str, str], key: str, minimum: int | None = None) -> int:
    try:
        value = int(raw[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not an integer: {raw[key]!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"key {key!r}: must be >= {minimum}, got {value}")
    return value


def _parse_list(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def build_config(raw: Mapping[str, str]) -> HarnessConfig:
    """Resolve raw key/value pairs (preset expansion included) to a config."""
    raw = dict(raw)
    for key in raw:
        if key not in _KNOWN_KEYS and key not in _DOTTED_KEYS:
            raise ConfigError(f"unknown key {key!r}")

    # Preset values act as defaults; explicit keys always win.
    preset_name = raw.pop("preset", None)
    if preset_name is not None:
        try:
            bundle = get_preset(preset_name)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        for key, value in bundle.items():
            key = "algorithms" if key == "algorithm" else key
            if key not in raw and not (key == "algorithms" and "algorithm" in raw):
                raw[key] = value if isinstance(value, str) else repr(value)

    if "algorithm" in raw and "algorithms" in raw:
        raise ConfigError("give either 'algorithm' or 'algorithms', not both")
    if "algorithm" in raw:
        raw["algorithms"] = raw.pop("algorithm")

    if "erlang" not in raw:
        raise ConfigError("missing required key 'erlang'")
    if "algorithms" not in raw:
        raise ConfigError("missing required key 'algorithm' or 'algorithms'")

    erlang = _parse_float(raw, "erlang")
    if erlang <= 0:
        raise ConfigError(f"erlang must be positive, got {erlang}")

    algorithms = tuple(_parse_list(raw["algorithms"]))
    if not algorithms:
        raise ConfigError("no algorithms given")
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {algorithm!r}; expected one of {sorted(ALGORITHMS)}")
    if len(set(algorithms)) != len(algorithms):
        raise ConfigError("duplicate algorithm in run")

    config = HarnessConfig(erlang=erlang, algorithms=algorithms)

    if "topology" in raw:
        config.topology_source = raw["topology"]
    if "k" in raw:
        config.k = None if raw["k"].lower() in ("inf", "none") else _parse_int(raw, "k", minimum=1)
    if "episodes" in raw:
        config.episodes = _parse_int(raw, "episodes", minimum=1)
    if "seeds" in raw:
        try:
            config.seeds = tuple(int(s) for s in _parse_list(raw["seeds"]))
        except ValueError:
            raise ConfigError(f"key 'seeds': expected comma-separated integers, got {raw['seeds']!r}") from None
        if not config.seeds:
            raise ConfigError("key 'seeds': empty seed list")
        if any(s < 0 for s in config.seeds):
            raise ConfigError("key 'seeds': seeds must be non-negative")
    if "requests_per_episode" in raw:
        config.requests_per_episode = _parse_int(raw, "requests_per_episode", minimum=1)
    if "mean_holding" in raw:
        config.mean_holding = _parse_float(raw, "mean_holding")
    if "cores_per_link" in raw:
        config.cores_per_link = _parse_int(raw, "cores_per_link", minimum=1)
    if "slots_per_core" in raw:
        config.slots_per_core = _parse_int(raw, "slots_per_core", minimum=0)
    if "guard_band_slots" in raw:
        config.guard_band_slots = _parse_int(raw, "guard_band_slots", minimum=0)
    if "bit_rate_weights" in raw:
        config.bit_rate_weights = _parse_bit_rate_weights(raw["bit_rate_weights"])
    if "congestion_scope" in raw:
        if raw["congestion_scope"] not in CONGESTION_SCOPES:
            raise ConfigError(f"congestion_scope must be one of {CONGESTION_SCOPES}")
        config.congestion_scope = raw["congestion_scope"]
    if "modulation_retry" in raw:
        value = raw["modulation_retry"].lower()
        if value not in ("try_all", "first_only"):
            raise ConfigError("modulation_retry must be 'try_all' or 'first_only'")
        config.modulation_retry = value == "try_all"
    if "modulation_table" in raw:
        config.modulation_table_path = raw["modulation_table"]
    if "final_window" in raw:
        config.final_window = _parse_int(raw, "final_window", minimum=1)

    config.rl_params = _resolve_rl_params(raw, erlang, algorithms)

    if KSP_INF in algorithms and config.k is None and len(algorithms) > 1:
        pass  # explicit k=inf applies to every algorithm; nothing to reconcile
    return config


def _parse_bit_rate_weights(value: str) -> dict[int, float]:
    weights: dict[int, float] = {}
    for item in _parse_list(value):
        if ":" not in item:
            raise ConfigError(f"bit_rate_weights entries look like '25:3', got {item!r}")
        rate_text, _, weight_text = item.partition(":")
        try:
            weights[int(rate_text)] = float(weight_text)
        except ValueError:
            raise ConfigError(f"bad bit_rate_weights entry {item!r}") from None
    if not weights:
        raise ConfigError("empty bit_rate_weights")
    return weights


_RL_FLOAT_KEYS = ("reward_routed", "reward_blocked", "epsilon_start", "epsilon_end", "alpha", "gamma", "c")


def _resolve_rl_params(raw: Mapping[str, str], erlang: float, algorithms: Sequence[str]) -> dict[str, dict]:
    rl_algorithms = [a for a in algorithms if a in RL_ALGORITHMS]
    plain = {key: raw[key] for key in _RL_KEYS if key in raw}
    if plain and len(rl_algorithms) > 1:
        raise ConfigError(
            "plain hyperparameter keys are ambiguous with several learning algorithms; "
            "use '<algorithm>.<key>' (e.g. 'qlearning.alpha')"
        )
    if plain and not rl_algorithms:
        raise ConfigError(f"hyperparameter keys {sorted(plain)} given but no learning algorithm in run")

    resolved: dict[str, dict] = {}
    for algorithm in rl_algorithms:
        params: dict = rl_preset_for(erlang, algorithm) or {}
        for key in _RL_KEYS:
            dotted = f"{algorithm}.{key}"
            if dotted in raw:
                params[key] = raw[dotted]
        if len(rl_algorithms) == 1:
            params.update(plain)
        params = _coerce_rl_params(algorithm, params)
        resolved[algorithm] = params
    return resolved


def _coerce_rl_params(algorithm: str, params: dict) -> dict:
    out: dict = {}
    for key, value in params.items():
        if key in _RL_FLOAT_KEYS:
            try:
                out[key] = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"key {algorithm}.{key}: not a number: {value!r}") from None
        elif key == "epsilon_mode":
            if value not in ("constant", "linear"):
                raise ConfigError(f"key {algorithm}.epsilon_mode: must be 'constant' or 'linear'")
            out[key] = value
        else:
            raise ConfigError(f"unexpected hyperparameter {key!r}")
    missing = [k for k in ("reward_routed", "reward_blocked", "epsilon_start") if k not in out]
    if out.get("epsilon_mode") == "linear" and "epsilon_end" not in out:
        missing.append("epsilon_end")
    if algorithm == QLEARNING:
        missing += [k for k in ("alpha", "gamma") if k not in out]
    if algorithm == UCB and "c" not in out:
        missing.append("c")
    if missing:
        raise ConfigError(
            f"{algorithm} at this erlang has no preset; missing hyperparameters: {sorted(set(missing))}"
        )
    return out


def parse_config(path: str | os.PathLike | None = None, overrides: Mapping[str, str] | None = None) -> HarnessConfig:
    """Parse a config file and/or CLI flag overrides into a validated config."""
    raw: dict[str, str] = {}
    if path is not None:
        config_path = Path(path)
        if not config_path.exists():
            raise ConfigError(f"config file not found: {config_path}")
        raw.update(parse_config_text(config_path.read_text(encoding="utf-8"), source=str(config_path)))
    if overrides:
        for key, value in overrides.items():
            raw[key] = value
    if not raw:
        raise ConfigError("no configuration given (need a config file or flags)")
    return build_config(raw)


# -- run ----------------------------------------------------------------------


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record for one run."""

    config_snapshot: dict[str, str]
    seeds: tuple[int, ...]
    version: str
    duration_seconds: float
    out_dir: Path
    results_csv: str
    final_window_bp: dict[str, float]

    @property
    def manifest_path(self) -> Path:
        return self.out_dir / "manifest.json"


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def results_csv_text(algorithms: Sequence[str], series: Mapping[str, list[float]]) -> str:
    lines = ["episode," + ",".join(algorithms)]
    episodes = len(series[algorithms[0]])
    for ep in range(episodes):
        lines.append(f"{ep}," + ",".join(repr(series[alg][ep]) for alg in algorithms))
    return "\n".join(lines) + "\n"


def run(config: HarnessConfig, out_dir: str | os.PathLike) -> RunManifest:
    """Execute every configured algorithm and write results.csv + manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    topology = config.load_topology()

    series: dict[str, list[float]] = {}
    final_bp: dict[str, float] = {}
    for algorithm in config.algorithms:
        result = run_experiment(config.experiment_config(algorithm, topology=topology))
        series[algorithm] = result.mean_bp_per_episode()
        final_bp[algorithm] = result.final_window_mean_bp(config.final_window)

    duration = time.perf_counter() - started
    _atomic_write_text(out / "results.csv", results_csv_text(config.algorithms, series))

    manifest = RunManifest(
        config_snapshot=config.snapshot(),
        seeds=config.seeds,
        version=__version__,
        duration_seconds=duration,
        out_dir=out,
        results_csv="results.csv",
        final_window_bp=final_bp,
    )
    _atomic_write_text(out / "manifest.json", json.dumps({
        "version": manifest.version,
        "config": manifest.config_snapshot,
        "seeds": list(manifest.seeds),
        "duration_seconds": manifest.duration_seconds,
        "outputs": {"results_csv": manifest.results_csv},
        "final_window_mean_bp": manifest.final_window_bp,
    }, indent=2, sort_keys=True) + "\n")
    return manifest


def config_from_manifest(path: str | os.PathLike) -> HarnessConfig:
    """Rebuild the exact run configuration recorded in a manifest file."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return build_config(data["config"])


# -- sweep ----------------------------------------------------------------------


def parse_sweep_grid(text: str, source: str = "<grid>") -> list[tuple[str, list[str]]]:
    """Grid lines ``key = v1 ; v2 ; v3`` -> ordered (key, values) pairs."""
    entries: list[tuple[str, list[str]]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = v1 ; v2 ; ...'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _KNOWN_KEYS and key not in _DOTTED_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"{source}:{lineno}: duplicate grid key {key!r}")
        seen.add(key)
        values = [v.strip() for v in value.split(";") if v.strip()]
        if not values:
            raise ConfigError(f"{source}:{lineno}: no values for {key!r}")
        entries.append((key, values))
    if not entries:
        raise ConfigError(f"{source}: empty sweep grid")
    return entries


def _grid_combinations(entries: list[tuple[str, list[str]]]) -> list[dict[str, str]]:
    combos: list[dict[str, str]] = [{}]
    for key, values in entries:
        combos = [dict(combo, **{key: value}) for combo in combos for value in values]
    return combos


def _sweep_worker(args: tuple[str, dict, dict, str]) -> dict:
    run_name, base_raw, override, out_root = args
    row: dict = {"run": run_name, **override}
    try:
        raw = dict(base_raw)
        raw.update(override)
        config = build_config(raw)
        manifest = run(config, Path(out_root) / run_name)
        row["final_window_bp"] = min(manifest.final_window_bp.values())
        row["per_algorithm"] = dict(manifest.final_window_bp)
        row["error"] = ""
    except Exception as exc:  # noqa: BLE001 - per-run failures must not kill the sweep
        row["final_window_bp"] = None
        row["per_algorithm"] = {}
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def worker_pool_size() -> int:
    value = os.environ.get(WORKERS_ENV_VAR, "").strip()
    if value:
        try:
            requested = int(value)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be an integer, got {value!r}") from None
        if requested < 1:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be >= 1")
        return requested
    return os.cpu_count() or 1


def sweep(base_raw: Mapping[str, str], grid: list[tuple[str, list[str]]], out_dir: str | os.PathLike) -> list[dict]:
    """Run the cartesian product of grid overrides; failures are isolated.

    Returns the summary rows (sorted ascending by best final-window BP,
    failed runs last) and writes them to ``summary.csv``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    combos = _grid_combinations(grid)
    width = max(4, len(str(len(combos) - 1)))
    jobs = [
        (f"run_{index:0{width}d}", dict(base_raw), override, str(out))
        for index, override in enumerate(combos)
    ]

    workers = min(worker_pool_size(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_worker, jobs))
    else:
        rows = [_sweep_worker(job) for job in jobs]

    rows.sort(key=lambda row: (row["final_window_bp"] is None,
                               row["final_window_bp"] if row["final_window_bp"] is not None else 0.0,
                               row["run"]))

    grid_keys = [key for key, _ in grid]
    lines = ["run," + ",".join(grid_keys) + ",final_window_bp,error"]
    for row in rows:
        bp = "" if row["final_window_bp"] is None else repr(row["final_window_bp"])
        error = row["error"].replace(",", ";")
        lines.append(",".join([row["run"], *(row[key] for key in grid_keys), bp, error]))
    _atomic_write_text(out / "summary.csv", "\n".join(lines) + "\n")
    return rows


# -- entry point ----------------------------------------------------------------


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--preset", help="named preset, e.g. erlang750-qlearning")
    parser.add_argument("--erlang", help="offered load in Erlang")
    parser.add_argument("--algorithm", help="single algorithm to run")
    parser.add_argument("--k", help="candidate paths per pair (integer or 'inf')")
    parser.add_argument("--episodes", help="episodes per seed")
    parser.add_argument("--seeds", help="comma-separated seed list")
    parser.add_argument("--out", default="eonrl-out", help="output directory (default: eonrl-out)")


def _flag_overrides(args: argparse.Namespace) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for key in ("preset", "erlang", "algorithm", "k", "episodes", "seeds"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return overrides


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="eonrl",
        description="Discrete-event simulator for learned routing in multi-core elastic optical networks.",
    )
    parser.add_argument("--version", action="version", version=f"eonrl {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="run one experiment configuration")
    _add_run_flags(run_parser)

    sweep_parser = subparsers.add_parser("sweep", help="run a hyperparameter sweep")
    sweep_parser.add_argument("--config", required=True, help="base config file")
    sweep_parser.add_argument("--grid", required=True, help="grid file: 'key = v1 ; v2 ; ...'")
    sweep_parser.add_argument("--out", default="eonrl-sweep", help="output directory")

    topology_parser = subparsers.add_parser("topology", help="topology utilities")
    topology_sub = topology_parser.add_subparsers(dest="topology_command", required=True)
    validate_parser = topology_sub.add_parser("validate", help="validate a topology file")
    validate_parser.add_argument("file", help="topology file to validate")

    presets_parser = subparsers.add_parser("presets", help="list named presets")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            config = parse_config(args.config, _flag_overrides(args))
            manifest = run(config, args.out)
            for algorithm in config.algorithms:
                print(f"{algorithm}: final-window mean BP = {manifest.final_window_bp[algorithm]:.6f}")
            print(f"wrote {manifest.out_dir / manifest.results_csv} and {manifest.manifest_path}")
        elif args.command == "sweep":
            base_path = Path(args.config)
            if not base_path.exists():
                raise ConfigError(f"config file not found: {base_path}")
            base_raw = parse_config_text(base_path.read_text(encoding="utf-8"), source=str(base_path))
            grid_path = Path(args.grid)
            if not grid_path.exists():
                raise ConfigError(f"grid file not found: {grid_path}")
            grid = parse_sweep_grid(grid_path.read_text(encoding="utf-8"), source=str(grid_path))
            rows = sweep(base_raw, grid, args.out)
            failures = sum(1 for row in rows if row["error"])
            print(f"{len(rows)} runs, {failures} failed; summary at {Path(args.out) / 'summary.csv'}")
            if failures:
                return 1
        elif args.command == "topology":
            topology = load_topology_file(args.file)
            print(f"OK: {len(topology.nodes)} nodes, {len(topology.links)} links, connected")
        elif args.command == "presets":
            for name in preset_names():
                print(name)
    except (ConfigError, TopologyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
