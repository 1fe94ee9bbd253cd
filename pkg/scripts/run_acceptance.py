"""
Acceptance runner for paramlp

Builds the acceptance corpora, runs them and writes JSON reports (plus
counterexample instances) into an output directory:

  oracle      200 random bounded LPs, exact and float Bland vs brute force
  klee_minty  Dantzig pivots on Klee–Minty cubes D = 3..8
  pairs       50 random single-parameter pairs: sweep cover, Φ/Ψ
              biconditional on sampled points, count bound, grid oracle
  path        rank-1 parametric path solve on the oracle + Klee–Minty corpus

Usage:
    python -m scripts.run_acceptance [--out acceptance] [--only oracle,pairs] [--seeds 200]
"""

import argparse
import json
import os
import sys
import time

# Add the repository root to the path so we can import paramlp
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from paramlp.errors import NoParametricDirectionError, ParamLpError
from paramlp.services import storage
from paramlp.services.arith import Arith, format_scalar
from paramlp.services.generators import gen_klee_minty, gen_random_bounded, gen_random_pair, klee_minty_start
from paramlp.services.oracle import grid_oracle, oracle_agrees, oracle_window
from paramlp.services.parametric import PRIMAL, count_bound_check, phi, psi, sweep
from paramlp.services.pivotpath import bound_report, parametric_path_solve
from paramlp.services.simplex import BLAND, DANTZIG, brute_force_optimum, solve

SECTIONS = ("oracle", "klee_minty", "pairs", "path")


# ── Corpora ──


def random_shape(seed: int) -> tuple[int, int]:
    """(m, n) with n in 3..10 and 1 ≤ m ≤ min(8, n − 1), a pure function of the seed."""
    n = 3 + seed % 8
    m = 1 + (seed // 8) % min(8, n - 1)
    return m, n


def oracle_corpus(seeds: int) -> list:
    return [gen_random_bounded(*random_shape(seed), seed) for seed in range(1, seeds + 1)]


def klee_minty_corpus() -> list:
    return [(D, gen_klee_minty(D)) for D in range(3, 9)]


# ── Sections ──


def run_oracle(seeds: int) -> dict:
    exact_ok = float_ok = verified = 0
    failures = []
    floating = Arith.floating()
    for lp in oracle_corpus(seeds):
        reference = brute_force_optimum(lp)
        exact = solve(lp, BLAND)
        flt = solve(lp.to_mode(floating), BLAND)
        verified += int(exact.verified) + int(flt.verified)
        if exact.status == reference.status and exact.objective == reference.value:
            exact_ok += 1
        else:
            failures.append({"instance": lp.name, "mode": "exact", "got": format_scalar(exact.objective)})
        ref = float(reference.value)
        if flt.status == reference.status and abs(flt.objective - ref) <= 1e-8 * max(1.0, abs(ref)):
            float_ok += 1
        else:
            failures.append({"instance": lp.name, "mode": "float", "got": flt.objective})
    print(f"  oracle: exact {exact_ok}/{seeds}, float {float_ok}/{seeds}, verified {verified}/{2 * seeds}")
    return {"instances": seeds, "exact_agree": exact_ok, "float_agree": float_ok, "verified": verified, "failures": failures}


def run_klee_minty() -> dict:
    rows = []
    for D, lp in klee_minty_corpus():
        solution = solve(lp, DANTZIG, klee_minty_start(D))
        rows.append({"D": D, "pivots": solution.trace.pivots, "expected": 2**D - 1, "verified": solution.verified})
        print(f"  klee_minty D={D}: {solution.trace.pivots} pivots (expected {2**D - 1})")
    return {"records": rows, "all_match": all(r["pivots"] == r["expected"] for r in rows)}


def _biconditional_holds(pair, decomposition) -> bool:
    """v ∈ Φ(u) ⇔ u ∈ Ψ(v) on interval midpoints and the images of transition points."""
    arith = pair.arith
    for interval, image in zip(decomposition.intervals, decomposition.images):
        lo = interval.lo if interval.lo_finite else interval.hi - 1
        hi = interval.hi if interval.hi_finite else interval.lo + 1
        v = (lo + hi) / 2
        if not psi(pair, v).contains(image, arith) or not phi(pair, image).contains(v, arith):
            return False
    for witness in decomposition.witnesses:
        ends = [e for e in (witness.image.lo, witness.image.hi) if witness.image.contains(e, arith)]
        for u in ends:
            if not phi(pair, u).contains(witness.point, arith):
                return False
    return True


def run_pairs(count: int, out_dir: str) -> dict:
    consistent = agreeing = bound_ok = 0
    counterexamples = []
    for seed in range(1, count + 1):
        n = 3 + seed % 8
        pair = gen_random_pair(n, seed)
        try:
            decomposition = sweep(pair, PRIMAL)
        except ParamLpError as e:
            print(f"  pair n={n} seed={seed}: sweep failed: {e}")
            path = os.path.join(out_dir, "counterexamples", f"{pair.lp.name}.json")
            storage.save_pair(pair, path)
            counterexamples.append({"instance": pair.lp.name, "reason": str(e), "path": path})
            continue

        if _biconditional_holds(pair, decomposition):
            consistent += 1
        bound = count_bound_check(pair, decomposition)
        if bound.holds:
            bound_ok += 1
        else:
            path = os.path.join(out_dir, "counterexamples", f"{pair.lp.name}.json")
            storage.save_pair(pair, path)
            counterexamples.append({"instance": pair.lp.name, "reason": "count bound", "path": path})

        oracle = grid_oracle(pair, window=oracle_window(decomposition))
        if oracle_agrees(decomposition, oracle):
            agreeing += 1
        print(
            f"  pair n={n} seed={seed}: {len(decomposition.transition_points)} points, "
            f"{len(decomposition.intervals)} intervals, oracle {oracle.breakpoints}"
        )
    return {
        "pairs": count,
        "biconditional": consistent,
        "count_bound_holds": bound_ok,
        "oracle_agrees": agreeing,
        "counterexamples": counterexamples,
    }


def run_path(seeds: int) -> dict:
    reports = []
    skipped = []
    corpus = oracle_corpus(seeds) + [lp for _, lp in klee_minty_corpus()]
    for lp in corpus:
        try:
            solution, report = parametric_path_solve(lp)
        except NoParametricDirectionError:
            skipped.append(lp.name)
            continue
        reference = brute_force_optimum(lp) if lp.n <= 10 else None
        if reference is not None and reference.value != solution.objective:
            print(f"  path {lp.name}: objective {solution.objective} differs from brute force {reference.value}")
        reports.append(report)
    summary = bound_report(reports)
    print(f"  path: {summary.holds} within n, {summary.fails} above, max ratio {summary.max_ratio}, {len(skipped)} skipped")
    print(f"  path: {summary.trivial_walks} walks made no parametric pivot (bootstrap reached the optimum)")
    for report in reports:
        if report.walk_trivial:
            print(f"    {report.instance}: {report.pivots_total} pivots total, all in the bootstrap")
    return {
        "summary": storage.bound_summary_document(summary).model_dump(),
        "reports": [storage.path_report_document(r).model_dump() for r in reports],
        "skipped": skipped,
    }


def run(out_dir: str, only: list[str], seeds: int, pairs: int) -> None:
    os.makedirs(out_dir, exist_ok=True)
    print(f"Writing acceptance results to {out_dir}...")
    for section in only:
        start = time.time()
        print(f"\n[{section}]")
        if section == "oracle":
            result = run_oracle(seeds)
        elif section == "klee_minty":
            result = run_klee_minty()
        elif section == "pairs":
            result = run_pairs(pairs, out_dir)
        else:
            result = run_path(seeds)
        result["runtime"] = round(time.time() - start, 3)
        with open(os.path.join(out_dir, f"{section}.json"), "w", encoding="utf-8") as f:
            json.dump(result, f, indent=2)
        print(f"  done in {result['runtime']:.1f}s")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run the paramlp acceptance corpora")
    parser.add_argument("--out", type=str, default="acceptance", help="Output directory (default: acceptance)")
    parser.add_argument(
        "--only",
        type=str,
        default=",".join(SECTIONS),
        help=f"Comma-separated sections to run (default: {','.join(SECTIONS)})",
    )
    parser.add_argument("--seeds", type=int, default=200, help="Random LP corpus size (default: 200)")
    parser.add_argument("--pairs", type=int, default=50, help="Random pair corpus size (default: 50)")

    args = parser.parse_args()
    sections = [s.strip() for s in args.only.split(",") if s.strip()]
    unknown = [s for s in sections if s not in SECTIONS]
    if unknown:
        parser.error(f"unknown sections: {', '.join(unknown)}")
    run(out_dir=args.out, only=sections, seeds=args.seeds, pairs=args.pairs)
