"""Command-line entry point: ``iontransport <subcommand> [options]``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load_config

log = logging.getLogger("iontransport")

EXIT_OK, EXIT_CONFIG, EXIT_ALL_FAILED = 0, 1, 2


def _config(args) -> ExperimentConfig:
    if args.config is None:
        raise ConfigError("--config is required for this command")
    cfg = load_config(args.config)
    changes = {}
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.seed is not None:
        changes["seed"] = args.seed
    return dataclasses.replace(cfg, **changes) if changes else cfg


def cmd_design(args) -> int:
    from .trajectory import compensating_force, design
    from .io import write_csv

    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for variant in cfg.variants:
        for i, t_f in enumerate(cfg.t_f_values()):
            plan = design(cfg.params, t_f, variant)
            plan.to_csv(out / f"design_{variant}_{i:03d}.csv")
            force = compensating_force(plan, cfg.params.M)
            write_csv(out / f"force_{variant}_{i:03d}.csv", ("t (s)", "force (N)"),
                      zip(force.t, force.force))
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .sweep import all_failed, run_sweep, write_sweep_csv

    cfg = _config(args)
    rows = run_sweep(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(out / "sweep.csv", rows)
    failed = [r for r in rows if r.status.startswith("error")]
    if all_failed(rows):
        log.error("all %d sweep points failed", len(rows))
        return EXIT_ALL_FAILED
    if failed:
        log.warning("%d of %d sweep points failed; see the status column", len(failed), len(rows))
    return EXIT_OK


def cmd_figure(args) -> int:
    from .figures import figure

    workers = args.workers or 1
    csv_path, svg_path = figure(args.name, args.out, workers=workers)
    log.info("wrote %s and %s", csv_path, svg_path)
    return EXIT_OK


def cmd_nion(args) -> int:
    from .io import write_csv
    from .nion import (ChainConfig, hamiltonian_separability_check, transport_chain_classical,
                       write_chain_csv)
    from .trajectory import design

    cfg = _config(args)
    p = cfg.params
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results, checks = [], []
    for N in cfg.chain_sizes:
        chain = ChainConfig.from_ion_mass(N, p.m, p.omega, p.beta, p.d, p.Cc, p.hbar)
        harmonic = ChainConfig.from_ion_mass(N, p.m, p.omega, 0.0, p.d, p.Cc, p.hbar)
        sep = hamiltonian_separability_check(harmonic, 0.0, 1000, seed=cfg.seed)
        checks.append((N, sep.max_residual, sep.relative_residual))
        for variant in cfg.variants:
            kind = "unshifted" if variant == "shifted" else variant
            for t_f in cfg.t_f_values():
                plan = design(chain.params, t_f, kind)
                results.append(transport_chain_classical(chain, plan,
                                                         compensate=variant == "compensated"))
    write_chain_csv(out / "nion.csv", results)
    write_csv(out / "nion_separability.csv",
              ("N (1)", "max_residual (J)", "relative_residual (1)"), checks)
    return EXIT_OK


def cmd_ground_state(args) -> int:
    from .io import write_csv
    from .quantum import ground_state, make_model, relative_ground_energy, save_checkpoint

    cfg = _config(args)
    model = make_model(cfg.params, args.model)
    grid = (model.default_grid(cfg.grid_1d) if model.dim == 1
            else model.default_grid(*cfg.grid_2d))
    gs = ground_state(cfg.params, model.tag, "full", grid)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tag = model.tag.lower()
    save_checkpoint(out / f"ground_state_{tag}.bin", gs.state)
    delta = relative_ground_energy(cfg.params, grid)[0] if model.dim == 2 else 0.0
    write_csv(out / f"ground_state_{tag}.csv",
              ("model", "energy (J)", "delta (J)", "energy_minus_delta (J)", "variance (J^2)",
               "iterations (1)"),
              [(model.tag, gs.energy, delta, gs.energy - delta, gs.variance, gs.iterations)])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    from .figures import FIGURES

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML experiment configuration")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--seed", type=int, help="random seed for sampling checks")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="iontransport",
                                     description="Two-ion transport in an anharmonic trap.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("design", parents=[common], help="write trap trajectories"
                   ).set_defaults(func=cmd_design)
    sub.add_parser("sweep", parents=[common], help="t_f sweep over methods and variants"
                   ).set_defaults(func=cmd_sweep)
    fig = sub.add_parser("figure", parents=[common], help="reproduce a figure as CSV + SVG")
    fig.add_argument("name", choices=FIGURES)
    fig.set_defaults(func=cmd_figure)
    sub.add_parser("nion", parents=[common], help="N-ion chain checks and transport"
                   ).set_defaults(func=cmd_nion)
    gs = sub.add_parser("ground-state", parents=[common], help="ground state checkpoint")
    gs.add_argument("--model", choices=("1D", "2D", "1d", "2d"), default="1D")
    gs.set_defaults(func=cmd_ground_state)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
