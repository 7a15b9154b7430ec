"""Command-line driver wiring models, spectra, laws, and bounds together.

Subcommands:
    graph-stats <file>                  structure report for an edge-list graph
    compare -c config.json              ESD vs limiting law, KS distance
    sweep -c config.json --sizes ...    KS distance across (p, n) sizes
    verify-bounds -c config.json        Monte Carlo check of variance bounds
    stieltjes --mu atoms.csv ...        density recovery on a grid

Exit codes: 0 success, 2 input or validation error, 3 numerical
non-convergence.  All commands are deterministic given their inputs.

Heavy imports happen inside main() so the GRAPHDEP_THREADS cap can be
applied to the numerical backends before they load.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NONCONVERGENCE = 3

_CONFIG_KEYS = {"model", "n", "rho", "law", "outputs", "seed", "reps"}
_OUTPUT_KEYS = {"eigenvalues_csv", "density_csv", "summary_json", "table_csv"}
_LAWS = ("mp", "fixed-point")
DENSITY_GRID_POINTS = 2001


def _apply_thread_cap() -> None:
    value = os.environ.get("GRAPHDEP_THREADS")
    if not value:
        return
    if not value.isdigit() or int(value) < 1:
        raise ValueError(f"GRAPHDEP_THREADS must be a positive integer, got {value!r}")
    for var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(var, value)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description loaded from JSON."""

    model: object
    n: int
    rho: float | None
    law: str
    outputs: dict
    reps: int


def load_config(path: str | Path) -> ExperimentConfig:
    from .models import model_from_json

    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("config must be a JSON object")
    unknown = set(obj) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    if "model" not in obj or "n" not in obj:
        raise ValueError("config requires 'model' and 'n'")
    model = model_from_json(obj["model"])
    if "seed" in obj:
        seed = obj["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
        model = replace(model, seed=seed)
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    rho = obj.get("rho")
    if rho is not None:
        rho = float(rho)
        if abs(model.p / n - rho) > 0.5 / n:
            raise ValueError(
                f"declared rho={rho} inconsistent with p/n={model.p}/{n}"
                f"={model.p / n:.6g} (tolerance 0.5/n)"
            )
    law = obj.get("law", "mp")
    if law not in _LAWS:
        raise ValueError(f"law must be one of {_LAWS}, got {law!r}")
    outputs = obj.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ValueError("outputs must be an object mapping names to paths")
    bad = set(outputs) - _OUTPUT_KEYS
    if bad:
        raise ValueError(f"unknown output keys: {sorted(bad)}")
    reps = obj.get("reps", 100_000)
    if not isinstance(reps, int) or isinstance(reps, bool) or reps < 100:
        raise ValueError(f"reps must be an integer >= 100, got {reps!r}")
    return ExperimentConfig(
        model=model, n=n, rho=rho, law=law,
        outputs={k: str(v) for k, v in outputs.items()}, reps=reps,
    )


def _dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_output(outputs: dict, key: str, content: str) -> None:
    path = outputs.get(key)
    if path:
        Path(path).write_text(content, encoding="utf-8")


def _law_objects(model, rho: float, law: str):
    """Return (cdf callable, density grid, all_converged) for the chosen law."""
    import numpy as np

    from . import stieltjes as stj
    from .models import population_covariance
    from .spectra import symmetric_eigenvalues

    if law == "mp":
        a, b = stj.mp_support(rho)
        xs = np.linspace(0.0, b * 1.05 + 1.0, DENSITY_GRID_POINTS)
        grid = stj.DensityGrid(
            x=xs,
            density=np.array([stj.mp_density(x, rho) for x in xs]),
            converged=np.ones(xs.size, dtype=bool),
            residual=np.zeros(xs.size),
            eta=0.0,
        )
        return (lambda x: stj.mp_cdf(x, rho)), grid, True
    sigma = population_covariance(model)
    mu = stj.DiscreteMeasure.from_eigenvalues(symmetric_eigenvalues(sigma.matrix))
    law_cdf = stj.spectral_law_cdf(mu, rho, grid_points=DENSITY_GRID_POINTS)
    return law_cdf, law_cdf.grid, law_cdf.all_converged


def cmd_graph_stats(args) -> int:
    from .graph import greedy_dominating_set, parse_edge_list

    text = Path(args.file).read_text(encoding="utf-8")
    g = parse_edge_list(text)
    cert = greedy_dominating_set(g)
    stats = {
        "p": g.p,
        "edges": g.num_edges,
        "max_degree": g.max_degree,
        "dominating_set_size": len(cert.vertices),
        "d": cert.d,
        "max_ball2_size": cert.max_ball2_size,
    }
    sys.stdout.write(_dump_json(stats))
    return EXIT_OK


def cmd_compare(args) -> int:
    from .models import sample
    from .spectra import (
        esd,
        format_eigenvalue_csv,
        kolmogorov_distance,
        sample_covariance,
    )
    from .stieltjes import format_density_csv

    cfg = load_config(args.config)
    model = cfg.model
    rho = model.p / cfg.n
    cdf, grid, converged = _law_objects(model, rho, cfg.law)
    x = sample(model, cfg.n)
    dist = esd(sample_covariance(x))
    ks = kolmogorov_distance(dist, cdf)
    _write_output(cfg.outputs, "eigenvalues_csv", format_eigenvalue_csv(dist.eigenvalues))
    _write_output(cfg.outputs, "density_csv", format_density_csv(grid))
    summary = {
        "p": model.p,
        "n": cfg.n,
        "rho": rho,
        "ks_distance": ks,
        "seed": model.seed,
    }
    _write_output(cfg.outputs, "summary_json", _dump_json(summary))
    sys.stdout.write(_dump_json(summary))
    if not converged:
        bad = int((~grid.converged).sum())
        sys.stderr.write(
            f"error: law density solver failed to converge at {bad} grid point(s); "
            f"worst residual {float(grid.residual.max()):.3e}\n"
        )
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def _parse_sizes(items) -> list[tuple[int, int]]:
    sizes = []
    for item in items:
        parts = item.split(":")
        if len(parts) != 2:
            raise ValueError(f"size must look like p:n, got {item!r}")
        try:
            p, n = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"size must hold two integers, got {item!r}") from None
        if p < 1 or n < 1:
            raise ValueError(f"sizes must be positive, got {item!r}")
        sizes.append((p, n))
    if not sizes:
        raise ValueError("at least one size is required")
    return sizes


def _resize_model(model, p: int, m_mode: str):
    from .models import make_block_independent, make_m_dependent

    if model.kind == "m-dependent":
        if m_mode == "half-p":
            m = p // 2
            coeffs = (1.0,) * (m + 1)
        else:
            m = model.m
            coeffs = model.coeffs
        return make_m_dependent(
            p, m, coeffs, innovation=model.innovation, df=model.df, seed=model.seed
        )
    if model.kind == "block-independent":
        pattern = model.block_sizes
        total = sum(pattern)
        if p % total != 0:
            raise ValueError(
                f"size p={p} is not a multiple of the block pattern sum {total}"
            )
        return make_block_independent(
            pattern * (p // total), within_block=model.within_block,
            theta=model.theta, innovation=model.innovation, df=model.df,
            seed=model.seed,
        )
    raise ValueError(f"sweep cannot resize model kind {model.kind!r}")


def cmd_sweep(args) -> int:
    from scipy.stats import spearmanr

    from .models import sample
    from .spectra import esd, kolmogorov_distance, sample_covariance

    cfg = load_config(args.config)
    sizes = _parse_sizes(args.sizes)
    ratios = [p / n for p, n in sizes]
    if max(ratios) > min(ratios) * 1.01:
        raise ValueError(f"all sizes must share rho within 1%, got ratios {ratios}")
    if args.seeds < 1:
        raise ValueError(f"--seeds must be positive, got {args.seeds}")
    all_converged = True
    ks_means = []
    for (p, n), rho in zip(sizes, ratios):
        base = _resize_model(cfg.model, p, args.m_mode)
        cdf, _, converged = _law_objects(base, rho, cfg.law)
        all_converged = all_converged and converged
        total = 0.0
        for offset in range(args.seeds):
            model = replace(base, seed=base.seed + offset)
            dist = esd(sample_covariance(sample(model, n)))
            total += kolmogorov_distance(dist, cdf)
        ks_means.append(total / args.seeds)
    if len(sizes) > 1 and len(set(p for p, _ in sizes)) > 1:
        stat = spearmanr([p for p, _ in sizes], ks_means).statistic
        spearman = None if math.isnan(stat) else float(stat)
    else:
        spearman = None
    table_lines = ["p,n,ks_mean"]
    table_lines.extend(
        f"{p},{n},{ks:.17g}" for (p, n), ks in zip(sizes, ks_means)
    )
    table = "\n".join(table_lines) + "\n"
    summary = {
        "sizes": [[p, n] for p, n in sizes],
        "ks_mean": ks_means,
        "spearman": spearman,
        "seeds": args.seeds,
    }
    _write_output(cfg.outputs, "table_csv", table)
    _write_output(cfg.outputs, "summary_json", _dump_json(summary))
    sys.stdout.write(table)
    sys.stdout.write(_dump_json(summary))
    if not all_converged:
        sys.stderr.write("error: law density solver failed to converge\n")
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def _build_matrix(args, model):
    import numpy as np

    if args.matrix is not None:
        a = np.loadtxt(args.matrix, delimiter=",", ndmin=2)
        return a
    p = model.p
    if args.matrix_kind == "identity":
        return np.eye(p)
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(model.seed, spawn_key=(0xB0, 0x1D)))
    )
    diag = rng.uniform(-1.0, 1.0, p)
    gauss = rng.standard_normal((p, p))
    q, r = np.linalg.qr(gauss)
    q = q * np.sign(np.diag(r))
    a = (q * diag) @ q.T
    return (a + a.T) / 2.0


def cmd_verify_bounds(args) -> int:
    from .bounds import verify_theorem3
    from .graph import greedy_dominating_set
    from .models import declared_graph

    cfg = load_config(args.config)
    model = cfg.model
    a = _build_matrix(args, model)
    cert = greedy_dominating_set(declared_graph(model))
    report = verify_theorem3(model, a, cert, reps=cfg.reps)
    payload = report.to_json_dict()
    _write_output(cfg.outputs, "summary_json", _dump_json(payload))
    sys.stdout.write(_dump_json(payload))
    return EXIT_OK


def _parse_grid(spec: str):
    import numpy as np

    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"--grid must look like a:b:n, got {spec!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"--grid must hold two reals and an integer, got {spec!r}") from None
    if n < 2 or not b > a:
        raise ValueError(f"--grid requires b > a and n >= 2, got {spec!r}")
    return np.linspace(a, b, n)


def cmd_stieltjes(args) -> int:
    import numpy as np

    from .stieltjes import DiscreteMeasure, density_from_stieltjes, format_density_csv

    raw = []
    for lineno, line in enumerate(Path(args.mu).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            raw.append(float(line))
        except ValueError:
            raise ValueError(f"{args.mu}:{lineno}: not a number: {line!r}") from None
    if not raw:
        raise ValueError(f"{args.mu}: no atoms found")
    mu = DiscreteMeasure.from_eigenvalues(np.asarray(raw))
    if not args.rho > 0:
        raise ValueError(f"--rho must be positive, got {args.rho}")
    xs = _parse_grid(args.grid)
    grid = density_from_stieltjes(mu, args.rho, xs, eta=args.eta)
    csv = format_density_csv(grid)
    if args.output:
        Path(args.output).write_text(csv, encoding="utf-8")
    else:
        sys.stdout.write(csv)
    if not bool(grid.converged.all()):
        bad = int((~grid.converged).sum())
        sys.stderr.write(
            f"error: solver failed to converge at {bad} grid point(s); "
            f"worst residual {float(grid.residual.max()):.3e}\n"
        )
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphdep",
        description="Spectra of sample covariance matrices under graph dependence",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("graph-stats", help="report structure of an edge-list graph")
    p_stats.add_argument("file", help="edge-list file: first line p, then 'u v' lines")
    p_stats.set_defaults(func=cmd_graph_stats)

    p_compare = sub.add_parser("compare", help="compare an ESD against its limiting law")
    p_compare.add_argument("-c", "--config", required=True, help="experiment config JSON")
    p_compare.set_defaults(func=cmd_compare)

    p_sweep = sub.add_parser("sweep", help="KS distance across a ladder of sizes")
    p_sweep.add_argument("-c", "--config", required=True, help="experiment config JSON")
    p_sweep.add_argument(
        "--sizes", required=True, nargs="+", metavar="P:N",
        help="sizes as p:n pairs, e.g. --sizes 100:200 200:400",
    )
    p_sweep.add_argument("--seeds", type=int, default=5, help="seeds averaged per size")
    p_sweep.add_argument(
        "--m-mode", choices=("fixed", "half-p"), default="fixed",
        help="keep m fixed across sizes, or grow it as p//2 (all-ones coefficients)",
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_bounds = sub.add_parser("verify-bounds", help="Monte Carlo check of variance bounds")
    p_bounds.add_argument("-c", "--config", required=True, help="experiment config JSON")
    group = p_bounds.add_mutually_exclusive_group()
    group.add_argument("--matrix", help="CSV file holding a symmetric matrix")
    group.add_argument(
        "--matrix-kind", choices=("identity", "rotated-diag"), default="identity",
        help="built-in test matrix family",
    )
    p_bounds.set_defaults(func=cmd_verify_bounds)

    p_stj = sub.add_parser("stieltjes", help="recover a density from the fixed point")
    p_stj.add_argument("--mu", required=True, help="CSV of atoms, one value per line")
    p_stj.add_argument("--rho", required=True, type=float, help="aspect ratio p/n")
    p_stj.add_argument("--grid", required=True, help="evaluation grid as a:b:n")
    p_stj.add_argument("--eta", type=float, default=None, help="imaginary offset")
    p_stj.add_argument("-o", "--output", default=None, help="write CSV here instead of stdout")
    p_stj.set_defaults(func=cmd_stieltjes)

    return parser


def main(argv=None) -> int:
    try:
        _apply_thread_cap()
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    parser = build_parser()
    args = parser.parse_args(argv)
    from .stieltjes import ConvergenceError

    try:
        return args.func(args)
    except ConvergenceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NONCONVERGENCE
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
