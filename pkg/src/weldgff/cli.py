"""Command-line entry point.

Two subcommands:

* ``verify``: run named identity checks (all by default) and write a JSON
  manifest; the exit code is the number of failed checks (capped at 125).
* ``zipper``: the end-to-end sampling pipeline: draw two independent
  boundary fields, build their exponential measures, match them into a
  circle homeomorphism anchored at a uniform rotation, weld it, and emit
  per-sample functionals plus curve files.

Configuration comes from an optional TOML file, overridden by an optional
JSON string, overridden by flags.  The output directory may also be set by
the ``WELDGFF_OUT`` environment variable (lowest priority).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import fields as FD
from .geometry import CurvePolyline
from .homeo import homeo_from_measures
from .manifest import SCHEMA_VERSION, RunConfig, verify_suite
from .welding import welding_energies, zipper_weld


def _load_config(args) -> RunConfig:
    data: dict = {}
    if args.config:
        try:
            import tomllib  # py311+
        except ModuleNotFoundError:
            import tomli as tomllib
        data.update(tomllib.loads(Path(args.config).read_text()))
    if args.config_json:
        data.update(json.loads(args.config_json))
    if os.environ.get("WELDGFF_OUT") and "out_dir" not in data:
        data["out_dir"] = os.environ["WELDGFF_OUT"]

    gamma = data.get("gamma")
    if args.gamma is not None:
        gamma = args.gamma
    if args.kappa is not None:
        k_gamma = float(np.sqrt(args.kappa))
        if gamma is not None and abs(k_gamma - gamma) > 1e-12:
            raise SystemExit("--kappa and --gamma disagree (gamma^2 must equal kappa)")
        gamma = k_gamma
    if gamma is None:
        gamma = 2.0

    def pick(name, flag, default):
        if flag is not None:
            return flag
        return data.get(name, default)

    return RunConfig(
        subcommand=args.command,
        gamma=float(gamma),
        modes=int(pick("modes", args.modes, 128)),
        grid=int(pick("grid", args.grid, 1024)),
        samples=int(pick("samples", args.samples, 200)),
        seed=int(pick("seed", args.seed, 7)),
        tol_scale=float(pick("tol_scale", args.tol_scale, 1.0)),
        out_dir=str(pick("out_dir", args.out, "out")),
        checks=tuple(args.check) if args.check else tuple(data.get("checks", ["all"])),
        curves_to_write=int(data.get("curves_to_write", 8)),
        plots=bool(args.plots or data.get("plots", False)),
    )


def pipeline_zipper(cfg: RunConfig) -> dict:
    """End-to-end welding pipeline; returns the summary (also written to disk).

    Per sample: two independent fields, their measures, the matching
    homeomorphism anchored at a uniform rotation, the welded curve, and the
    welding energies.  Failures are recorded and skipped.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    failures = 0
    t0 = time.perf_counter()
    for i in range(cfg.samples):
        rng = np.random.default_rng((cfg.seed, 101, i))
        alpha = float(rng.uniform(0, 2 * np.pi))
        f1 = FD.sample_field(FD.NEUMANN_DOT, cfg.modes, seed=(cfg.seed, 102, i))
        f2 = FD.sample_field(FD.NEUMANN_DOT, cfg.modes, seed=(cfg.seed, 103, i))
        try:
            m1 = FD.gmc_measure(f1, cfg.gamma, cfg.grid)
            m2 = FD.gmc_measure(f2, cfg.gamma, cfg.grid)
            h = homeo_from_measures(m1, m2, alpha, N=cfg.weld_points)
            tri = zipper_weld(h, cfg.weld_points)
            K, S1 = welding_energies(tri)
            rows.append({"seed": i, "alpha": alpha,
                         "mass1": m1.total_mass(), "mass2": m2.total_mass(),
                         "K": K, "S1": S1, "residual": tri.residual})
            if i < cfg.curves_to_write:
                _write_curve(out / f"curve_{i:04d}.csv", tri.curve)
        except Exception as exc:
            failures += 1
            rows.append({"seed": i, "alpha": alpha, "mass1": float("nan"),
                         "mass2": float("nan"), "K": float("nan"),
                         "S1": float("nan"), "residual": float("nan"),
                         "error": str(exc)})
    scalars = out / "samples.csv"
    with scalars.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["seed", "alpha", "mass1", "mass2",
                                                "K", "S1", "residual", "error"])
        writer.writeheader()
        for r in rows:
            writer.writerow({**{"error": ""}, **r})
    ok = [r for r in rows if np.isfinite(r["residual"])]
    summary = {
        "schema_version": SCHEMA_VERSION,
        "config": asdict(cfg),
        "n_samples": cfg.samples,
        "n_failed": failures,
        "median_residual": float(np.median([r["residual"] for r in ok])) if ok else None,
        "median_K": float(np.median([r["K"] for r in ok])) if ok else None,
        "median_S1": float(np.median([r["S1"] for r in ok])) if ok else None,
        "wall_clock": round(time.perf_counter() - t0, 3),
    }
    (out / "zipper_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    if cfg.plots:
        _plot_pipeline(out, rows)
    return summary


def _write_curve(path: Path, curve: CurvePolyline):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im"])
        for j, z in enumerate(curve.points):
            writer.writerow([j, f"{z.real:.12g}", f"{z.imag:.12g}"])


def _plot_pipeline(out: Path, rows):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ok = [r for r in rows if np.isfinite(r["residual"])]
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    axes[0].hist([np.log10(max(r["residual"], 1e-16)) for r in ok], bins=30)
    axes[0].set_xlabel("log10 welding residual")
    axes[1].scatter([r["K"] for r in ok], [r["S1"] for r in ok], s=8)
    axes[1].set_xlabel("K")
    axes[1].set_ylabel("S1")
    fig.tight_layout()
    fig.savefig(out / "zipper_diagnostics.png", dpi=120)
    plt.close(fig)
    curves = sorted(out.glob("curve_*.csv"))[:8]
    if curves:
        fig, ax = plt.subplots(figsize=(5, 5))
        for cpath in curves:
            data = np.genfromtxt(cpath, delimiter=",", skip_header=1)
            ax.plot(data[:, 1], data[:, 2], lw=0.8)
        ax.set_aspect("equal")
        fig.savefig(out / "zipper_curves.png", dpi=120)
        plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weldgff",
                                description="conformal welding verification suite")
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--config-json", help="JSON string overriding the config file")
    sub = p.add_subparsers(dest="command", required=True)
    common = {
        "--kappa": dict(type=float, default=None, help="diffusivity in (0, 4]"),
        "--gamma": dict(type=float, default=None, help="sqrt(kappa) in (0, 2]"),
        "--seed": dict(type=int, default=None),
        "--samples": dict(type=int, default=None),
        "--modes": dict(type=int, default=None),
        "--grid": dict(type=int, default=None),
        "--out": dict(type=str, default=None),
        "--tol-scale": dict(type=float, default=None, dest="tol_scale"),
    }
    for name in ("verify", "zipper"):
        sp = sub.add_parser(name)
        for flag, kw in common.items():
            sp.add_argument(flag, **kw)
        sp.add_argument("--check", action="append", default=None,
                        help="check name (repeatable) or 'all'")
        sp.add_argument("--plots", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _load_config(args)
    if args.command == "verify":
        manifest = verify_suite(cfg)
        for r in manifest.results:
            status = "PASS" if r["passed"] else "FAIL"
            print(f"[{status}] {r['name']:24s} residual={r['residual']:.3e} "
                  f"tol={r['tolerance']:.3e} ({r['seconds']:.1f}s) {r['detail']}")
        print(f"{manifest.n_failed} failed / {len(manifest.results)} checks, "
              f"{manifest.wall_clock:.1f}s")
        return min(manifest.n_failed, 125)
    if args.command == "zipper":
        summary = pipeline_zipper(cfg)
        print(json.dumps(summary, indent=2, sort_keys=True))
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
