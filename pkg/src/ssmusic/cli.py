"""Command-line entry point: ``ssmusic {solve,sweep,phase,hist} [flags]``.

Settings resolve as flags > ``--config`` file > defaults.  The config file is
flat ``key = value`` text with ``#`` comments; keys are the long flag names
(dashes or underscores).  Grid-valued keys (m, K, N, snr-db) accept
``a,b,c`` lists and inclusive ``start:stop[:step]`` ranges.

Exit codes: 0 success, 2 configuration error, 3 runtime/I-O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, fields
from typing import Optional, Sequence

from .errors import ConfigError
from .harness import (
    EnsembleSpec,
    aggregate_json,
    check_algorithms,
    records_csv,
    run_sweep,
    write_text,
)
from .solver import SsMusicConfig
from .svg import bar_chart_svg, heatmap_svg, line_chart_svg

COMMANDS = ("solve", "sweep", "phase", "hist")
EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("ssmusic")


@dataclass
class RunConfig:
    command: str
    n: int = 100
    m: tuple[int, ...] = (40,)
    K: tuple[int, ...] = (30,)
    N: tuple[int, ...] = (20,)
    snr_db: tuple[float, ...] = ()
    trials: int = 200
    seed: int = 0
    algorithms: tuple[str, ...] = ("ss_music",)
    epsilon: float = 1e-8
    t_max: int = 100
    out: str = "results"
    emit_svg: bool = False
    threads: int = os.cpu_count() or 1
    timing: bool = False

    def specs(self) -> list[EnsembleSpec]:
        snrs = self.snr_db or (None,)
        trials = 1 if self.command == "solve" else self.trials
        return [EnsembleSpec(m=m, K=K, N=N, n=self.n, snr_db=s, trials=trials, master_seed=self.seed)
                for m in self.m for K in self.K for N in self.N for s in snrs]

    def solver_config(self) -> SsMusicConfig:
        return SsMusicConfig(rel_epsilon=self.epsilon, t_max=self.t_max)

    def header(self) -> dict:
        d = asdict(self)
        for key in ("threads", "out"):
            d.pop(key)
        return {k: (",".join(map(str, v)) if isinstance(v, tuple) else v) for k, v in d.items()}


# key -> (RunConfig field, converter)
def _grid(kind):
    def convert(text: str):
        out = []
        for part in str(text).split(","):
            part = part.strip()
            if ":" in part:
                bits = [int(b) for b in part.split(":")]
                if len(bits) not in (2, 3) or (len(bits) == 3 and bits[2] <= 0):
                    raise ValueError(f"bad range {part!r}")
                step = bits[2] if len(bits) == 3 else 1
                out.extend(range(bits[0], bits[1] + 1, step))
            elif part:
                out.append(kind(part))
        if not out:
            raise ValueError("empty list")
        return tuple(out)
    return convert


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _algos(text) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(text)
    return tuple(a.strip() for a in str(text).split(",") if a.strip())


KEYS = {
    "command": ("command", str),
    "n": ("n", int),
    "m": ("m", _grid(int)),
    "K": ("K", _grid(int)),
    "N": ("N", _grid(int)),
    "snr_db": ("snr_db", _grid(float)),
    "trials": ("trials", int),
    "seed": ("seed", int),
    "algo": ("algorithms", _algos),
    "epsilon": ("epsilon", float),
    "t_max": ("t_max", int),
    "out": ("out", str),
    "emit_svg": ("emit_svg", _bool),
    "threads": ("threads", int),
    "timing": ("timing", _bool),
}


def _norm_key(key: str) -> str:
    key = key.strip().replace("-", "_")
    # m, K, N are case-sensitive; everything else is lower case
    return key if key in KEYS else key.lower()


def read_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` file into {field: value}."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        name = _norm_key(key)
        if name not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        field_name, convert = KEYS[name]
        try:
            values[field_name] = convert(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ssmusic", description="Joint sparse recovery with semi-supervised MUSIC.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--n", type=str)
    p.add_argument("--m", type=str)
    p.add_argument("--K", type=str)
    p.add_argument("--N", type=str)
    p.add_argument("--snr-db", dest="snr_db", type=str)
    p.add_argument("--trials", type=str)
    p.add_argument("--seed", type=str)
    p.add_argument("--algo", action="append", help="repeatable; also accepts a,b lists")
    p.add_argument("--epsilon", type=str, help="relative convergence threshold (x ||Y||_F^2)")
    p.add_argument("--t-max", dest="t_max", type=str)
    p.add_argument("--out", type=str)
    p.add_argument("--emit-svg", dest="emit_svg", action="store_const", const=True)
    p.add_argument("--threads", type=str)
    p.add_argument("--timing", action="store_const", const=True,
                   help="record wall times (makes outputs run-dependent)")
    p.add_argument("--config", type=str)
    return p


def _validate(cfg: RunConfig) -> RunConfig:
    def bad(key, msg):
        raise ConfigError(f"invalid value for {key}: {msg}")

    if cfg.command not in COMMANDS:
        bad("command", f"one of {COMMANDS} is required")
    if cfg.n < 2:
        bad("n", "must be at least 2")
    for K in cfg.K:
        if not 1 <= K < cfg.n:
            bad("K", f"{K} must satisfy 1 <= K < n")
    if any(m < 1 for m in cfg.m):
        bad("m", "must be positive")
    if any(N < 1 for N in cfg.N):
        bad("N", "must be positive")
    if cfg.trials < 1:
        bad("trials", "must be positive")
    if cfg.t_max < 1:
        bad("t_max", "must be positive")
    if not 0 <= cfg.epsilon < 1:
        bad("epsilon", "must lie in [0, 1)")
    if cfg.threads < 1:
        bad("threads", "must be positive")
    if cfg.seed < 0:
        bad("seed", "must be nonnegative")
    check_algorithms(cfg.algorithms)
    if cfg.command in ("solve", "hist") and len(cfg.specs()) != 1:
        bad("m/K/N/snr_db", f"{cfg.command} takes a single ensemble point")
    if cfg.command == "phase" and cfg.snr_db:
        bad("snr_db", "phase maps are noiseless")
    return cfg


def parse_config(args: Sequence[str], file: Optional[str] = None) -> RunConfig:
    """Resolve flags over file values over defaults, then validate."""
    ns = build_parser().parse_args(list(args))
    values = {}
    file = ns.config or file
    if file:
        values.update(read_config_file(file))
    for name, (field_name, convert) in KEYS.items():
        raw = getattr(ns, "algo" if name == "algo" else name, None)
        if raw is None:
            continue
        if name == "algo":
            raw = ",".join(raw)
        try:
            values[field_name] = convert(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for --{name.replace('_', '-')}: {exc}") from exc
    if "command" not in values:
        raise ConfigError("a command is required: one of " + ", ".join(COMMANDS))
    known = {f.name for f in fields(RunConfig)}
    return _validate(RunConfig(**{k: v for k, v in values.items() if k in known}))


def _check_writable(out: str) -> None:
    os.makedirs(out, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=out):
        pass


def _varying(cfg: RunConfig):
    for name in ("m", "K", "N", "snr_db"):
        if len(getattr(cfg, name)) > 1:
            return name
    return None


def execute(cfg: RunConfig) -> int:
    try:
        _check_writable(cfg.out)
    except OSError as exc:
        print(f"error: output directory {cfg.out!r} is not writable: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        specs = cfg.specs()
        results = run_sweep(specs, cfg.algorithms, cfg.solver_config(), cfg.threads, cfg.timing)
        header = cfg.header()
        write_text(os.path.join(cfg.out, "results.csv"), records_csv(results, header))
        write_text(os.path.join(cfg.out, "aggregate.json"), aggregate_json(results, header))
        for res in results:
            s = res.spec
            snr = "-" if s.snr_db is None else f"{s.snr_db:g}"
            for name in cfg.algorithms:
                if cfg.command == "solve":
                    rec = res.records[name][0]
                    print(f"solve {name} n={s.n} m={s.m} K={s.K} N={s.N} snr_db={snr} "
                          f"success={str(rec.success).lower()} iterations={rec.iterations}")
                else:
                    hist = res.histogram(name)
                    mode = max(hist, key=lambda b: (hist[b], -b))
                    print(f"{cfg.command} {name} n={s.n} m={s.m} K={s.K} N={s.N} snr_db={snr} "
                          f"trials={s.trials} success_rate={res.success_rate(name):.4f} modal_iterations={mode}")
        if cfg.emit_svg:
            _emit_svg(cfg, results)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - any solver failure maps to the runtime exit code
        log.exception("run failed")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _emit_svg(cfg: RunConfig, results) -> None:
    out = cfg.out
    if cfg.command == "phase":
        for name in cfg.algorithms:
            rates = [[0.0] * len(cfg.K) for _ in cfg.m]
            for res in results:
                rates[cfg.m.index(res.spec.m)][cfg.K.index(res.spec.K)] = res.success_rate(name)
            write_text(os.path.join(out, f"phase_{name}.svg"),
                       heatmap_svg(rates, cfg.m, cfg.K, f"{name}: recovery probability (N={cfg.N[0]})"))
        return
    axis = _varying(cfg)
    if axis is not None:
        xs = [getattr(r.spec, axis) for r in results]
        series = {name: [r.success_rate(name) for r in results] for name in cfg.algorithms}
        write_text(os.path.join(out, f"sweep_{axis}.svg"),
                   line_chart_svg(xs, series, f"recovery probability vs {axis}", axis))
    for name in cfg.algorithms:
        for i, res in enumerate(results):
            suffix = "" if len(results) == 1 else f"_{i}"
            write_text(os.path.join(out, f"hist_{name}{suffix}.svg"),
                       bar_chart_svg(res.histogram(name), f"{name} iterations (m={res.spec.m}, K={res.spec.K}, N={res.spec.N})"))


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
