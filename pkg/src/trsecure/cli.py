"""Command-line front end: one subcommand per experiment, CSV + manifest + figure.

Config files are flat ``key = value`` text (``#`` comments, lists
comma-separated); every key is optional::

    q = 256
    bor = 4
    bors = 2, 4, 8
    ebn0_db = 20
    realizations = 100
    blocks = 300
    seed = 0
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import __version__, plotting, simkit, validation
from .model import ParameterError, SystemParams

log = logging.getLogger("trsecure")

SUBCOMMANDS = ("ber-vs-snr", "ber-vs-alpha", "sr-vs-alpha", "alpha-opt", "validate")

BER_COLUMNS = (
    "bor", "alpha", "ebn0_db", "bob_ber", "eve_ber", "bob_ber_ci", "eve_ber_ci",
    "bits", "bob_errors", "eve_errors", "eve_skipped",
)
SR_COLUMNS = (
    "bor", "alpha", "sr_emp", "sr_emp_clamped", "sr_bound", "sinr_bob_emp", "sinr_bob_bound",
    "sinr_eve_emp", "sinr_eve_bound", "ci_halfwidth", "sinr_eve_ci", "eve_skipped",
)
ALPHA_OPT_COLUMNS = (
    "bor", "ebn0_db", "alpha_opt", "sr_bound_at_opt", "sr_emp_at_opt", "alpha_star_emp", "sr_max_emp",
)
VALIDATE_COLUMNS = ("check", "value", "threshold", "passed")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class MissingKey(ConfigError):
    pass


class OutOfRange(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


_KEYS = {
    "q": int, "bor": int, "alpha": float, "ebn0_db": float, "ber_ebn0_db": float,
    "sigma2_an": float, "bessel_terms": int, "realizations": int, "blocks": int,
    "seed": int, "alphas": _floats, "snr_alphas": _floats, "ebn0_grid": _floats,
    "bors": _ints, "alpha_opt_step": float,
}


def parse_config_text(text: str) -> simkit.SimConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_string("[run]\n" + text)
    raw = {k.lower(): v for k, v in cp["run"].items()}
    vals = {}
    for key, value in raw.items():
        if key not in _KEYS:
            raise UnknownKey(key, "unknown key")
        if not value.strip():
            raise MissingKey(key, "no value given")
        try:
            vals[key] = _KEYS[key](value)
        except ValueError as exc:
            raise OutOfRange(key, f"cannot parse {value!r}") from exc

    q, bor = vals.get("q", 256), vals.get("bor", 4)
    if q < 1:
        raise OutOfRange("q", "must be positive")
    if bor < 2 or q % bor:
        raise OutOfRange("bor", f"must be >= 2 and divide q={q}")
    for b in vals.get("bors", ()):
        if b < 2 or q % b:
            raise OutOfRange("bors", f"{b} must be >= 2 and divide q={q}")
    for key in ("alpha",):
        if key in vals and not 0.0 <= vals[key] <= 1.0:
            raise OutOfRange(key, "must lie in [0, 1]")
    for key in ("alphas", "snr_alphas"):
        if any(not 0.0 <= a <= 1.0 for a in vals.get(key, ())):
            raise OutOfRange(key, "values must lie in [0, 1]")
    for key in ("realizations", "blocks", "bessel_terms"):
        if key in vals and vals[key] < 1:
            raise OutOfRange(key, "must be positive")
    if "sigma2_an" in vals and vals["sigma2_an"] <= 0:
        raise OutOfRange("sigma2_an", "must be > 0")
    if "seed" in vals and not 0 <= vals["seed"] < 2**64:
        raise OutOfRange("seed", "must be an unsigned 64-bit integer")
    if "alpha_opt_step" in vals and not 0.0 < vals["alpha_opt_step"] <= 1.0:
        raise OutOfRange("alpha_opt_step", "must lie in (0, 1]")

    try:
        params = SystemParams.from_bor(
            q, bor, alpha=vals.get("alpha", 0.5),
            bessel_terms=vals.get("bessel_terms", 20),
        )
    except ParameterError as exc:
        raise OutOfRange("bor", str(exc)) from exc
    kw = {
        "params": params,
        "n_channel_realizations": vals.get("realizations", 100),
        "n_blocks_per_realization": vals.get("blocks", 300),
        "master_seed": vals.get("seed", 0),
        "sigma2_an": vals.get("sigma2_an"),
    }
    for key in ("ebn0_db", "ber_ebn0_db", "alphas", "snr_alphas", "ebn0_grid", "bors", "alpha_opt_step"):
        if key in vals:
            kw[key] = vals[key]
    try:
        return simkit.SimConfig(**kw)
    except ValueError as exc:
        raise OutOfRange("config", str(exc)) from exc


def parse_config(path) -> simkit.SimConfig:
    if path is None:
        return parse_config_text("")
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path, columns, rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(_fmt(row[c]) for c in columns)
    return path


def _sr_row(r: simkit.SweepResult) -> dict:
    d = asdict(r)
    d["ci_halfwidth"] = r.sr_emp_ci
    d["sinr_eve_ci"] = r.sinr_eve_emp_ci
    return d


def config_echo(cfg: simkit.SimConfig) -> dict:
    p = cfg.params
    return {
        "q": p.q_subcarriers, "bor": p.bor, "alpha": p.alpha, "bessel_terms": p.bessel_terms,
        "ebn0_db": cfg.ebn0_db, "ber_ebn0_db": cfg.ber_ebn0_db, "sigma2_an": cfg.sigma2_an,
        "realizations": cfg.n_channel_realizations, "blocks": cfg.n_blocks_per_realization,
        "seed": cfg.master_seed, "alphas": list(cfg.alphas), "snr_alphas": list(cfg.snr_alphas),
        "ebn0_grid": list(cfg.ebn0_grid), "bors": list(cfg.bors), "alpha_opt_step": cfg.alpha_opt_step,
    }


def run_subcommand(name: str, cfg: simkit.SimConfig, out_dir, workers: int = 1, plots: bool = True) -> int:
    """Run one experiment, write ``<name>.csv`` and ``manifest.json``; return the exit status."""
    if name not in SUBCOMMANDS:
        raise ValueError(f"unknown subcommand {name!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{name}.csv"
    start = time.perf_counter()
    status = 0
    counters = {}

    if name in ("ber-vs-snr", "ber-vs-alpha"):
        if name == "ber-vs-snr":
            rows = simkit.sweep_ber_vs_ebn0(cfg, workers=workers)
            plot = plotting.plot_ber_vs_ebn0
        else:
            rows = simkit.sweep_ber_vs_alpha(cfg, workers=workers)
            plot = plotting.plot_ber_vs_alpha
        write_csv(csv_path, BER_COLUMNS, [asdict(r) for r in rows])
        counters["eve_skipped_symbols"] = sum(r.eve_skipped for r in rows)
    elif name == "sr-vs-alpha":
        rows = simkit.sweep_sr_vs_alpha(cfg, workers=workers)
        plot = plotting.plot_sr_vs_alpha
        write_csv(csv_path, SR_COLUMNS, [_sr_row(r) for r in rows])
        counters["eve_skipped_symbols"] = sum(r.eve_skipped for r in rows)
    elif name == "alpha-opt":
        rows = simkit.empirical_alpha_opt(cfg, workers=workers)
        plot = plotting.plot_alpha_opt
        write_csv(csv_path, ALPHA_OPT_COLUMNS, [asdict(r) for r in rows])
    else:
        rows = validation.run_all(seed=cfg.master_seed)
        plot = None
        write_csv(csv_path, VALIDATE_COLUMNS, [
            {"check": c.name, "value": float(c.value), "threshold": float(c.threshold), "passed": c.passed}
            for c in rows
        ])
        for c in rows:
            log.info("%-28s %-4s value=%.3g threshold=%.3g", c.name, "ok" if c.passed else "FAIL", c.value, c.threshold)
        status = 0 if validation.all_passed(rows) else 1

    artifacts = [csv_path.name]
    if plots and plot is not None:
        artifacts.append(plot(rows, out / f"{name}.png").name)

    manifest = {
        "subcommand": name,
        "version": __version__,
        "master_seed": cfg.master_seed,
        "config": config_echo(cfg),
        "workers": workers,
        "wall_time_s": round(time.perf_counter() - start, 3),
        "rows": {name: len(rows)},
        "exclusions": counters,
        "artifacts": artifacts,
        "exit_status": status,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trsecure",
        description="Artificial-noise time-reversal OFDM secrecy experiments.",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--seed", type=int, help="master seed (overrides the config)")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--threads", type=int, default=1, help="worker processes; never changes results")
    parser.add_argument("--no-plots", action="store_true", help="skip PNG figures")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = parse_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            print("config error: seed must be an unsigned 64-bit integer", file=sys.stderr)
            return 2
        from dataclasses import replace

        cfg = replace(cfg, master_seed=args.seed)
    try:
        return run_subcommand(args.subcommand, cfg, args.out, max(1, args.threads), not args.no_plots)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
