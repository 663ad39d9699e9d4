"""Truncated-basis convergence at weak coupling, against the bundled table.

The explicit-polariton solver expands the coupled eigenproblem in products
of bare ring states (n <= n_max) and photon numbers (l <= l_max).  At
lambda = 0.005 this table shows how the two lowest gaps and the ground-state
photon occupation converge as both truncations grow, next to the published
reference values bundled with the package.  The smallest basis (l_max = 1,
n_max = 2) is already right to ~1e-4 on the gaps -- and the last column of
the exact rows shows what it still gets qualitatively wrong: the length-form
and momentum-form occupations differ even at convergence, because the photon
number is not form-invariant.

Run:  python3 demos/weak_convergence_table.py [--count 39] [--cache-dir .cache]
(the first run solves 39 ring states on the 201x201 grid: a few minutes)
"""

from __future__ import annotations

import argparse
import csv
from importlib import resources
from pathlib import Path

from ringqed.cli import ensure_electronic
from ringqed.electronic import matter_elements
from ringqed.polariton import convergence_scan
from ringqed.runio import RunConfig, load_coupled_npz


def reference_rows():
    text = resources.files("ringqed").joinpath("data/reference_table.csv").read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return list(csv.DictReader(lines))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=39, help="ring states to solve")
    ap.add_argument("--lam", type=float, default=0.005)
    ap.add_argument("--cache-dir", default=".cache")
    args = ap.parse_args()

    refs = [r for r in reference_rows()
            if r["method"] == "polariton" and float(r["lambda"]) == args.lam]
    triples = sorted(
        (int(r["l_max"]), int(r["n_max"]), float(r["lambda"])) for r in refs
    )
    need = max(t[1] for t in triples) + 1
    if args.count < need:
        ap.error(f"--count must be at least {need} for this table")

    cfg = RunConfig(count=args.count, cache_dir=args.cache_dir)
    basis, _, _ = ensure_electronic(cfg)
    omega = float(basis.energies[1] - basis.energies[0])
    print(f"resonant omega = {omega:.10f}, lambda = {args.lam:g}\n")

    rows = convergence_scan(basis, omega, triples, elements=matter_elements(basis))
    by_key = {(int(r["l_max"]), int(r["n_max"])): r for r in refs}
    print("l_max n_max      dE01        dE13     occupation   |dev| vs reference")
    for r in rows:
        ref = by_key[(r.l_max, r.n_max)]
        dev = max(abs(r.de01 - float(ref["dE01"])),
                  abs(r.de13 - float(ref["dE13"])),
                  abs(r.occupation - float(ref["occupation"])))
        print(f"{r.l_max:4d} {r.n_max:5d}   {r.de01:.7f}   {r.de13:.7f}   "
              f"{r.occupation:.7f}    {dev:.1e}")

    print("\nexact grid x Fock rows (for comparison):")
    for r in reference_rows():
        if r["method"].startswith("exact") and float(r["lambda"]) == args.lam:
            print(f"  {r['method']:8s}  dE01={r['dE01']}  dE13={r['dE13']}  "
                  f"occupation={r['occupation']}")
    art = Path(args.cache_dir) / f"coupled_length_lam{args.lam:g}_c39.npz"
    if art.exists():
        s = load_coupled_npz(art)
        e = s.energies
        print(f"  this repo   dE01={e[1] - e[0]:.7f}  dE13={e[3] - e[1]:.7f}  "
              f"occupation={s.occupations[0]:.7f}  (length form, 40 Fock states)")
    else:
        print(f"  (no local artifact at {art}; produce one with:")
        print(f"   ringqed exact --set=lam={args.lam:g} --set=form=length)")


if __name__ == "__main__":
    main()
