"""Command-line entry point: ``run``, ``diagnose`` and ``export-operator``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..operators import save_operator
from ..space import default_diagnostics, diagnostic_rows, space_from_config, write_diagnostics_csv
from .runner import ConfigError, ScenarioConfig, _build_operator, _space_dict, refinement_study, \
    run_scenario

EXIT_OK, EXIT_SCENARIO, EXIT_CONFIG = 0, 2, 3

log = logging.getLogger("schattenosc")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schattenosc", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in [("run", "evaluate a scenario and write report.csv / report.json"),
                        ("diagnose", "write space diagnostics to diagnostics.csv"),
                        ("export-operator", "write the scenario operator matrix")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("config_path", nargs="?", help="scenario file (YAML or JSON)")
        p.add_argument("--config", dest="config_flag", help="scenario file, same as the positional")
        p.add_argument("--out-dir", default=None)
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--threads", type=int, default=1)
        if name == "export-operator":
            p.add_argument("--format", choices=("csv", "bin"), default="bin")
            p.add_argument("--resolution", type=int, default=None,
                           help="resolution index into the config list (default first)")
    return ap


def _load(args) -> ScenarioConfig:
    path = args.config_flag or args.config_path
    if path is None:
        raise ConfigError("no config file given")
    return ScenarioConfig.load(path, seed=args.seed)


def _out_dir(args, cfg: ScenarioConfig) -> Path:
    out = Path(args.out_dir or cfg.output.get("dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    study = refinement_study if cfg.refinement else run_scenario
    report = study(cfg, threads=args.threads)
    report.to_csv(out / "report.csv")
    report.to_json(out / "report.json")
    if not report.ok:
        log.error("scenario failed: %s", report.error["message"])
        return EXIT_SCENARIO
    for r in report.ratios:
        print(f"{r['numerator']} / {r['denominator']}: min {r['min']:.4g} "
              f"max {r['max']:.4g} band {r['band']:.4g}")
    for c in report.classifications:
        print(f"{c['function']} {c['quantity']}[{c['params']}]: {c['class']}")
    return EXIT_OK


def _diagnose(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    rows = []
    for res in cfg.resolutions:
        space = space_from_config(_space_dict(cfg), res)
        diag = cfg.raw.get("diagnostics") or {}
        dcfg = default_diagnostics(space, seed=cfg.seed or 0,
                                   **{k: v for k, v in diag.items()
                                      if k in ("tolerance", "min_ratio")})
        rows += diagnostic_rows(space, dcfg)
    write_diagnostics_csv(rows, out / "diagnostics.csv")
    return EXIT_OK


def _export(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    res = cfg.resolutions[args.resolution or 0]
    space = space_from_config(_space_dict(cfg), res)
    T = _build_operator(cfg, space)
    save_operator(T, out / f"operator.{args.format}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _run, "diagnose": _diagnose, "export-operator": _export}[args.command]
    try:
        return handler(args)
    except ConfigError as err:
        log.error("%s", err)
        return EXIT_CONFIG
    except Exception as err:  # noqa: BLE001
        log.error("%s: %s", type(err).__name__, err)
        return EXIT_SCENARIO


if __name__ == "__main__":
    sys.exit(main())
