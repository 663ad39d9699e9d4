"""Batch command-line interface.

Subcommands: electronic, exact, polariton-scan, density, spp,
verify-manifest.  Exit codes: 0 success, 2 numerical non-convergence or
failed verification, 3 configuration error.  Every run echoes its fully
resolved configuration and writes a manifest listing each output file
with a sha256 checksum.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import asdict
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .coupled import solve_coupled
from .electronic import (
    CacheMismatch,
    aligned_excited_index,
    load_electronic_cache,
    matter_elements,
    save_electronic_cache,
    solve_electronic,
)
from .observables import (
    anisotropy,
    bare_density,
    lower_polariton_index,
    polariton_density,
)
from .polariton import PolaritonBasisSpec, ScanRow, convergence_scan, solve_polariton, write_scan_csv
from .runio import (
    RunConfig,
    estimated_memory_gb,
    load_coupled_npz,
    read_config,
    save_coupled_npz,
    verify_manifest,
    write_density_raw,
    write_manifest,
)
from .spp import SppInputs, ground_to_lower_gap, spp_levels, tavis_cummings_splitting

EXIT_OK = 0
EXIT_NUMERICAL = 2
EXIT_CONFIG = 3

PAPER_SCAN = [
    (1, 2, 0.005), (1, 8, 0.005), (1, 19, 0.005),
    (2, 2, 0.005), (2, 4, 0.005), (2, 8, 0.005), (2, 19, 0.005),
    (4, 38, 0.005),
    (1, 2, 0.4), (4, 8, 0.4), (4, 38, 0.4), (19, 38, 0.4),
]


class NonConvergence(RuntimeError):
    pass


def _electronic_cache_path(cfg: RunConfig) -> Path:
    return Path(cfg.cache_dir) / (
        f"electronic_{cfg.nx}x{cfg.ny}_dx{cfg.dx:g}_k{cfg.count}.epc"
    )


def ensure_electronic(cfg: RunConfig, verbose: bool = True):
    """Load the eigenpair cache or solve and populate it."""
    path = _electronic_cache_path(cfg)
    grid, params = cfg.grid(), cfg.params()
    if path.exists():
        try:
            basis = load_electronic_cache(path, grid, params, cfg.count, cfg.electronic_tol)
            if verbose:
                print(f"electronic cache hit: {path}")
            return basis, path, False
        except CacheMismatch as err:
            if verbose:
                print(f"electronic cache unusable ({err}); re-solving")
    basis = solve_electronic(grid, params, cfg.count, tol=cfg.electronic_tol)
    if basis.residual_max > cfg.electronic_tol:
        raise NonConvergence(
            f"electronic solve residual {basis.residual_max:.2e} above {cfg.electronic_tol:.2e}"
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    save_electronic_cache(path, basis, cfg.electronic_tol)
    if verbose:
        print(f"electronic cache written: {path}")
    return basis, path, True


def resolve_omega(cfg: RunConfig, basis) -> float:
    if cfg.omega > 0:
        return cfg.omega
    return float(basis.energies[1] - basis.energies[0])


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(cfg: RunConfig, out: Path, resolved: dict | None = None) -> Path:
    lines = [f"{key} = {value}" for key, value in asdict(cfg).items()]
    for key, value in (resolved or {}).items():
        lines.append(f"{key} = {value}")
    path = out / "resolved.cfg"
    path.write_text("\n".join(lines) + "\n")
    return path


def cmd_electronic(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    t0 = time.perf_counter()
    basis, cache_path, solved = ensure_electronic(cfg)
    wall = time.perf_counter() - t0
    e = basis.energies
    listing = out / "electronic.csv"
    with open(listing, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["state", "energy"])
        for i, ei in enumerate(e):
            w.writerow([i, f"{ei:.8e}"])
    for i in range(min(6, len(e))):
        print(f"E_{i} = {e[i]:.9f}")
    print(f"gap E_1 - E_0 = {e[1] - e[0]:.9f}")
    cfg_path = _echo_config(cfg, out)
    write_manifest(
        out / "electronic_manifest.json",
        asdict(cfg),
        {"energies": listing, "cache": cache_path, "config": cfg_path},
        {"total": wall},
        {"solved": solved, "residual_max": basis.residual_max},
    )
    return EXIT_OK


def cmd_exact(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    forms = ["length", "momentum"] if cfg.form == "both" else [cfg.form]
    basis, cache_path, _ = ensure_electronic(cfg)
    omega = resolve_omega(cfg, basis)
    dim = (cfg.cutoff + 1) * cfg.nx * cfg.ny
    need = estimated_memory_gb(dim, cfg.max_basis)
    if need > cfg.memory_budget_gb:
        print(
            f"refusing: estimated {need:.2f} GiB for dimension {dim} with "
            f"max_basis {cfg.max_basis}, budget {cfg.memory_budget_gb:.2f} GiB",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    outputs: dict = {"electronic_cache": cache_path}
    timings: dict = {}
    diagnostics: dict = {"omega": omega, "dimension": dim}
    rows = []
    failed = False
    if 0 <= cfg.continue_cutoff and cfg.continue_cutoff >= cfg.cutoff:
        print("config error: continue_cutoff must be below cutoff", file=sys.stderr)
        return EXIT_CONFIG
    for form in forms:
        run_cfg = RunConfig(**{**asdict(cfg), "form": form})
        coupled_cfg = run_cfg.coupled(omega)
        stage = None
        t0 = time.perf_counter()
        if cfg.continue_cutoff >= 0:
            stage_cfg = RunConfig(**{
                **asdict(cfg), "form": form, "cutoff": cfg.continue_cutoff,
            }).coupled(omega)
            stage = solve_coupled(
                stage_cfg, k=cfg.k, tol=cfg.tol, seed=cfg.seed,
                max_basis=cfg.max_basis,
                warm_basis=basis if cfg.warm_start else None,
                warm_n_max=cfg.warm_n_max,
            )
            print(
                f"{form}: continuation stage at cutoff {cfg.continue_cutoff} "
                f"done ({time.perf_counter() - t0:.0f}s, {stage.n_apply} applies)"
            )
        res = solve_coupled(
            coupled_cfg, k=cfg.k, tol=cfg.tol, seed=cfg.seed,
            max_basis=cfg.max_basis,
            warm_basis=basis if cfg.warm_start else None,
            warm_n_max=cfg.warm_n_max,
            continue_from=stage,
        )
        wall = time.perf_counter() - t0
        timings[form] = wall
        art = out / f"coupled_{form}.npz"
        save_coupled_npz(art, res, wall)
        outputs[f"coupled_{form}"] = art
        marginal = np.sum(res.states[0] ** 2, axis=(1, 2))
        diagnostics[form] = {
            "residual_max": float(res.residuals.max()),
            "n_apply": res.n_apply,
            "fock_tail_weight": float(marginal[-2:].sum()),
        }
        e = res.energies
        rows.append((
            form, cfg.lam, cfg.cutoff,
            e[1] - e[0], e[3] - e[1], res.occupation(0),
        ))
        print(
            f"{form}: dE01={e[1]-e[0]:.7f} dE13={e[3]-e[1]:.7f} "
            f"occupation={res.occupation(0):.7f} ({wall:.0f}s, {res.n_apply} applies)"
        )
        if args.save_density:
            dpath = out / f"density_{form}.raw"
            write_density_raw(dpath, res.density(0), coupled_cfg.grid)
            outputs[f"density_{form}"] = dpath
            outputs[f"density_{form}_sidecar"] = Path(str(dpath) + ".json")
        if not res.converged.all():
            failed = True
            print(f"{form}: NOT all converged: residuals {res.residuals}", file=sys.stderr)
    table = out / "exact.csv"
    with open(table, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["form", "lambda", "cutoff", "dE01", "dE13", "occupation"])
        for form, lam, cut, a, b, c in rows:
            w.writerow([form, f"{lam:.8e}", cut, f"{a:.8e}", f"{b:.8e}", f"{c:.8e}"])
    outputs["table"] = table
    outputs["config"] = _echo_config(cfg, out, {"resolved_omega": omega})
    write_manifest(out / "exact_manifest.json", asdict(cfg), outputs, timings, diagnostics)
    return EXIT_NUMERICAL if failed else EXIT_OK


def _parse_scan(text: str) -> list[tuple[int, int, float]]:
    text = text.strip()
    if text.lower() == "paper":
        return list(PAPER_SCAN)
    if text.lower() in ("", "none"):
        return []
    rows = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 3:
            raise ValueError(f"scan entry must be l_max:n_max:lambda, got {item!r}")
        rows.append((int(parts[0]), int(parts[1]), float(parts[2])))
    return rows


def _load_reference_rows(path: Path | None) -> list[dict]:
    if path is None:
        source = resources.files("ringqed").joinpath("data/reference_table.csv")
        text = source.read_text()
    else:
        text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return list(csv.DictReader(lines))


def cmd_polariton_scan(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    rows_spec = _parse_scan(cfg.scan)
    needed = max((n for _, n, _ in rows_spec), default=0)
    if cfg.count < needed + 1:
        print(
            f"electronic cache holds {cfg.count} states but the scan needs "
            f"n_max={needed}; rerun electronic with count={needed + 1} or higher",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    basis, cache_path, _ = ensure_electronic(cfg)
    omega = resolve_omega(cfg, basis)
    t0 = time.perf_counter()
    rows = convergence_scan(
        basis, omega, rows_spec, polarization=(cfg.pol_x, cfg.pol_y)
    )
    wall = time.perf_counter() - t0
    target = Path(args.output) if args.output else out / "scan.csv"
    write_scan_csv(target, rows)
    for r in rows:
        print(
            f"l_max={r.l_max:3d} n_max={r.n_max:3d} lambda={r.lam:g}  "
            f"dE01={r.de01:.7f} dE13={r.de13:.7f} occupation={r.occupation:.7f}"
        )
    outputs = {"scan": target, "electronic_cache": cache_path,
               "config": _echo_config(cfg, out, {"resolved_omega": omega})}
    write_manifest(out / "scan_manifest.json", asdict(cfg), outputs, {"total": wall})
    if args.compare:
        ref = _load_reference_rows(
            None if args.compare == "bundled" else Path(args.compare)
        )
        ref_map = {
            (int(r["l_max"]), int(r["n_max"]), float(r["lambda"])): r
            for r in ref if r["method"] == "polariton"
        }
        print("\ncomparison against reference (computed - reference):")
        for r in rows:
            key = (r.l_max, r.n_max, r.lam)
            if key not in ref_map:
                print(f"  {key}: no reference row")
                continue
            t = ref_map[key]
            print(
                f"  l={r.l_max:3d} n={r.n_max:3d} lam={r.lam:g}: "
                f"d(dE01)={r.de01 - float(t['dE01']):+.2e} "
                f"d(dE13)={r.de13 - float(t['dE13']):+.2e} "
                f"d(occ)={r.occupation - float(t['occupation']):+.2e}"
            )
    return EXIT_OK


def cmd_density(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    basis, cache_path, _ = ensure_electronic(cfg)
    omega = resolve_omega(cfg, basis)
    grid = cfg.grid()
    timings: dict = {}
    if args.which == "exact-ground":
        art = Path(args.exact_artifact) if args.exact_artifact else None
        if art and art.exists():
            summary = load_coupled_npz(art)
            dens = summary.density_gs
            print(f"reusing exact artifact {art}")
        else:
            t0 = time.perf_counter()
            res = solve_coupled(
                cfg.coupled(omega), k=cfg.k, tol=cfg.tol, seed=cfg.seed,
                max_basis=cfg.max_basis,
                warm_basis=basis if cfg.warm_start else None,
                warm_n_max=cfg.warm_n_max,
            )
            timings["exact"] = time.perf_counter() - t0
            if not res.converged.all():
                print("exact solve did not converge", file=sys.stderr)
                return EXIT_NUMERICAL
            dens = res.density(0)
    else:
        spec = PolaritonBasisSpec(
            n_max=min(cfg.warm_n_max, basis.count - 1), l_max=cfg.cutoff
        )
        res = solve_polariton(basis, cfg.mode(omega), spec, k=8)
        state = 0 if args.which == "polariton-ground" else lower_polariton_index(res)
        dens = polariton_density(basis, res, state)
    if args.reference == "bare":
        ref = bare_density(basis)
    else:
        summary = load_coupled_npz(args.reference)
        ref = summary.density_gs
    delta = dens - ref
    value = anisotropy(grid, delta, (cfg.pol_x, cfg.pol_y))
    print(f"anisotropy along polarization: {value:+.6e}")
    dpath = out / f"delta_n_{args.which}.raw"
    write_density_raw(dpath, delta, grid)
    outputs = {
        "delta_n": dpath,
        "delta_n_sidecar": Path(str(dpath) + ".json"),
        "electronic_cache": cache_path,
        "config": _echo_config(cfg, out, {"resolved_omega": omega}),
    }
    write_manifest(
        out / "density_manifest.json", asdict(cfg), outputs, timings,
        {"anisotropy": value, "which": args.which, "reference": str(args.reference)},
    )
    return EXIT_OK


def _parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_spp(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    basis, cache_path, _ = ensure_electronic(cfg)
    elements = matter_elements(basis)
    excited = aligned_excited_index(basis, elements)
    delta_e = float(basis.energies[excited] - basis.energies[0])
    r01 = elements.dipole[0, excited]
    pol = np.array([cfg.pol_x, cfg.pol_y])
    ne_list = _parse_floats(args.ne) if args.ne else [cfg.n_electrons]
    lam_list = _parse_floats(args.lam) if args.lam else [cfg.lam]
    delta_list = _parse_floats(args.delta) if args.delta else [0.0]
    target = Path(args.output) if args.output else out / "spp.csv"
    with open(target, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([
            "n_electrons", "lambda", "delta", "e_ground", "e_lower", "e_upper",
            "e_double", "collective_shift", "rabi_splitting", "tc_splitting",
            "gap_lower",
        ])
        for ne in ne_list:
            for lam in lam_list:
                for delta in delta_list:
                    inp = SppInputs(
                        e0=float(basis.energies[0]),
                        delta_e=delta_e,
                        omega=delta_e + delta,
                        lambda_vec=tuple(lam * pol),
                        r01=tuple(r01),
                        n_electrons=ne,
                    )
                    spec = spp_levels(inp)
                    w.writerow([
                        f"{ne:g}", f"{lam:.8e}", f"{delta:.8e}",
                        f"{spec.e_ground:.8e}", f"{spec.e_lower:.8e}",
                        f"{spec.e_upper:.8e}", f"{spec.e_double:.8e}",
                        f"{spec.collective_shift:.8e}",
                        f"{spec.rabi_splitting:.8e}",
                        f"{tavis_cummings_splitting(inp):.8e}",
                        f"{ground_to_lower_gap(inp):.8e}",
                    ])
    print(f"wrote {target}")
    outputs = {"spp": target, "electronic_cache": cache_path,
               "config": _echo_config(cfg, out)}
    write_manifest(out / "spp_manifest.json", asdict(cfg), outputs, {})
    return EXIT_OK


def cmd_verify_manifest(args) -> int:
    status = EXIT_OK
    for path in args.manifests:
        problems = verify_manifest(path)
        if problems:
            status = EXIT_NUMERICAL
            for p in problems:
                print(f"{path}: {p}")
        else:
            print(f"{path}: ok")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringqed",
        description="Cavity QED of a 2D ring electron: exact and polariton solvers.",
    )
    parser.add_argument("--version", action="version", version=f"ringqed {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="key = value file")
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override a config entry (repeatable)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("electronic", parents=[common],
                   help="solve and cache the bare electronic states")
    p_exact = sub.add_parser("exact", parents=[common],
                             help="grid x Fock eigenstates in one or both forms")
    p_exact.add_argument("--save-density", action="store_true",
                         help="export the ground-state density")
    p_scan = sub.add_parser("polariton-scan", parents=[common],
                            help="truncated-basis convergence table")
    p_scan.add_argument("--output", default=None, help="CSV destination")
    p_scan.add_argument(
        "--compare", nargs="?", const="bundled", default=None,
        help="diff against a reference table (default: bundled copy)",
    )
    p_dens = sub.add_parser("density", parents=[common],
                            help="density difference and anisotropy")
    p_dens.add_argument(
        "--which", default="exact-ground",
        choices=["exact-ground", "polariton-ground", "lower-polariton"],
    )
    p_dens.add_argument(
        "--reference", default="bare",
        help="'bare' or path to a coupled .npz artifact",
    )
    p_dens.add_argument(
        "--exact-artifact", default=None,
        help="reuse a saved coupled .npz instead of re-solving",
    )
    p_spp = sub.add_parser("spp", parents=[common],
                           help="single-photon polariton model scan")
    p_spp.add_argument("--ne", default=None, help="comma list of electron numbers")
    p_spp.add_argument("--lam", default=None, help="comma list of coupling strengths")
    p_spp.add_argument("--delta", default=None, help="comma list of detunings")
    p_spp.add_argument("--output", default=None, help="CSV destination")
    p_ver = sub.add_parser("verify-manifest", help="re-hash files listed in manifests")
    p_ver.add_argument("manifests", nargs="+", type=Path)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify-manifest":
        return cmd_verify_manifest(args)
    try:
        cfg = read_config(args.config, args.set)
    except (ValueError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    handler = {
        "electronic": cmd_electronic,
        "exact": cmd_exact,
        "polariton-scan": cmd_polariton_scan,
        "density": cmd_density,
        "spp": cmd_spp,
    }[args.command]
    try:
        return handler(cfg, args)
    except NonConvergence as err:
        print(f"non-convergence: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, CacheMismatch, FileNotFoundError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
