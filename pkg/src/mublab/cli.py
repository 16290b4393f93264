"""Batch command-line frontend.

Subcommands: dump-mubs, minimize, scan, classify, verify-lemma,
verify-table, simulate-detector, full-report.  Exit codes: 0 success,
1 verification failure, 2 usage error.  All outputs are written
atomically and carry an envelope (tool version, echoed config,
timestamp); the payload under the envelope is deterministic for fixed
seeds.  A key=value config file can pre-set any flag of the invoked
subcommand; explicit flags win, and MUBLAB_OUTPUT_DIR overrides the
full-report output directory.
"""

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import tolerances as tol
from .catalog import (
    LETTERS,
    build_mub_set,
    verify_generating_relations,
    verify_mutual_unbiasedness,
)
from .detector import (
    bootstrap_entropy_error,
    build_model,
    expected_counts,
    ideal_entropy_sum,
    paper_epsilon_profile,
    predict_entropy_sum,
)
from .montecarlo import haar_block, scan
from .optimize import (
    CLASS_BOUNDS,
    FOUR_BASIS_REFERENCE_AMPLITUDES,
    FOUR_BASIS_REFERENCE_PHASE_FIFTHS,
    TWO_LOG2_5,
    OptimizerConfig,
    minimize_sum,
    reference_state,
    verify_table_states,
)
from .reporting import envelope, scan_csv_rows, write_csv, write_json
from .symmetry import (
    classify_by_optimization,
    classify_triplet,
    enumerate_pairs,
    enumerate_quadruples,
    enumerate_triplets,
    verify_all_automorphisms,
    verify_fourier_identities,
    verify_table_state_relations,
)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2

OUTPUT_DIR_ENV = "MUBLAB_OUTPUT_DIR"


def _err(msg):
    print(f"mublab: {msg}", file=sys.stderr)


def _info(msg):
    print(msg, file=sys.stderr)


def _parse_bases(bases, dim, minimum=2, maximum=None):
    letters = bases.upper()
    valid = LETTERS[dim]
    if maximum is None:
        maximum = len(valid)
    if not (minimum <= len(letters) <= maximum and len(set(letters)) == len(letters)
            and all(c in valid for c in letters)):
        raise ValueError(
            f"bases must be {minimum}..{maximum} distinct letters from {valid}, got {bases!r}"
        )
    return letters


def _coerce(value):
    low = value.strip().lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value.strip()


def load_config_file(path):
    """Parse `key = value` lines; '#' starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = _coerce(val)
    return values


def _emit(payload, config, out):
    doc = envelope(config, payload)
    if out:
        write_json(out, doc)
    else:
        json.dump(doc, sys.stdout, indent=2)
        sys.stdout.write("\n")


def _optimizer_config(args, restarts=None):
    return OptimizerConfig(
        restarts=restarts if restarts is not None else args.restarts,
        max_iterations=args.max_iterations,
        function_tolerance=args.function_tolerance,
        seed=args.seed,
        workers=args.workers,
    )


# ------------------------------------------------------------- subcommands

def cmd_dump_mubs(args):
    mubs = build_mub_set(args.dim)
    config = {"command": "dump-mubs", "dim": args.dim, "format": args.format}
    if args.format == "json":
        payload = {
            "dim": args.dim,
            "bases": {
                b.label: [[{"re": float(z.real), "im": float(z.imag)} for z in row]
                          for row in b.matrix]
                for b in mubs
            },
        }
        _emit(payload, config, args.out)
    else:
        rows = [
            [b.label, i, j, repr(float(z.real)), repr(float(z.imag))]
            for b in mubs
            for i, row in enumerate(b.matrix)
            for j, z in enumerate(row)
        ]
        header = ["basis", "row", "col", "re", "im"]
        if args.out:
            write_csv(args.out, header, rows, config=config)
        else:
            print(",".join(header))
            for r in rows:
                print(",".join(str(x) for x in r))
    return EXIT_OK


def cmd_minimize(args):
    bases = _parse_bases(args.bases, args.dim)
    mubs = build_mub_set(args.dim)
    cfg = _optimizer_config(args)
    res = minimize_sum(args.functional, bases, mubs, cfg)
    payload = res.to_payload()
    config = {"command": "minimize", "functional": args.functional, "bases": bases,
              "dim": args.dim, "restarts": cfg.restarts, "seed": cfg.seed,
              "max_iterations": cfg.max_iterations,
              "function_tolerance": cfg.function_tolerance, "workers": cfg.workers}
    _emit(payload, config, args.out)
    if not res.converged:
        _err(f"minimization did not converge for {bases}")
        return EXIT_VERIFICATION
    return EXIT_OK


def _scan_bound(kind, letters, dim):
    """Hard Monte-Carlo floor for the scanned functional, if one is certified."""
    if kind != "entropy":
        return None, None
    if len(letters) == 2:
        return math.log2(dim), tol.MC_BOUND_SLACK
    if len(letters) == 3:
        cls = classify_triplet(letters, dim)
        bound = CLASS_BOUNDS[dim]["entropy"][cls]
        slack = tol.MC_BOUND_SLACK if cls == "S1" else tol.S2_MC_BOUND_SLACK
        return bound, slack
    return None, None


def cmd_scan(args):
    bases = _parse_bases(args.bases, args.dim)
    mubs = build_mub_set(args.dim)
    samples = int(float(args.samples))
    report = scan(args.functional, bases, mubs, samples, args.seed,
                  workers=args.workers, bin_count=args.bins)
    payload = report.to_payload()
    bound, slack = _scan_bound(args.functional, bases, args.dim)
    payload["bound"] = bound
    payload["bound_slack"] = slack
    ok = bound is None or report.histogram.min_seen >= bound - slack
    payload["bound_satisfied"] = bool(ok)
    config = {"command": "scan", "functional": args.functional, "bases": bases,
              "dim": args.dim, "samples": samples, "seed": args.seed,
              "bins": args.bins, "workers": args.workers}
    if args.out:
        header, rows = scan_csv_rows(report)
        write_csv(args.out, header, rows, config=config)
    if args.json_out or not args.out:
        _emit(payload, config, args.json_out)
    if not ok:
        _err(f"scan found a sample below the certified bound: "
             f"{report.histogram.min_seen!r} < {bound!r}")
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_classify(args):
    mubs = build_mub_set(args.dim)
    cfg = _optimizer_config(args)
    report = classify_by_optimization(mubs, cfg)
    config = {"command": "classify", "dim": args.dim, "restarts": cfg.restarts,
              "seed": cfg.seed, "workers": cfg.workers,
              "max_iterations": cfg.max_iterations,
              "function_tolerance": cfg.function_tolerance}
    _emit(report, config, args.out)
    if not report["passed"]:
        _err("classification did not reproduce the reference partition")
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_verify_lemma(args):
    mubs = build_mub_set(5)
    identities = verify_fourier_identities()
    autos = verify_all_automorphisms(args.trials, args.seed, mubs)
    payload = {"identities": identities, "automorphisms": autos,
               "passed": bool(identities["passed"] and autos["passed"])}
    config = {"command": "verify-lemma", "trials": args.trials, "seed": args.seed}
    _emit(payload, config, args.out)
    if not payload["passed"]:
        _err("lemma verification failed")
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_verify_table(args):
    mubs = build_mub_set(5)
    states_report = verify_table_states(mubs)
    relations = verify_table_state_relations()
    payload = {"states": states_report, "relations": relations,
               "passed": states_report["passed"]}
    config = {"command": "verify-table"}
    _emit(payload, config, args.out)
    if not payload["passed"]:
        _err("a tabulated state exceeded its bound plus rounding slack")
        return EXIT_VERIFICATION
    return EXIT_OK


def _detector_states(args, mubs, triplet):
    if args.states:
        with open(args.states) as fh:
            doc = json.load(fh)
        out = []
        for k, entry in enumerate(doc["states"]):
            psi = np.asarray(entry["re"], dtype=np.float64) + 1j * np.asarray(
                entry["im"], dtype=np.float64)
            nrm = np.linalg.norm(psi)
            if nrm == 0:
                raise ValueError(f"state {k} is zero")
            out.append((str(entry.get("id", f"state_{k}")), psi / nrm))
        return out
    # default probe families: eigenstates of every basis, the low-entropy
    # reference state, and a batch of Haar-random states
    out = []
    for b in mubs:
        kind = "internal" if b.label in triplet else "external"
        for j in range(mubs.dim):
            out.append((f"{kind}_eig_{b.label}{j}", b.column(j)))
    out.append(("low_entropy_reference",
                reference_state(FOUR_BASIS_REFERENCE_AMPLITUDES,
                                FOUR_BASIS_REFERENCE_PHASE_FIFTHS)))
    randoms = haar_block(args.seed, 0, mubs.dim, count=args.random_states)
    for k in range(args.random_states):
        out.append((f"random_{k}", randoms[k]))
    return out


def _epsilon_profile(spec_text, dim):
    if spec_text == "paper":
        return paper_epsilon_profile(dim)
    if spec_text == "ideal":
        return 0.0
    try:
        eps = float(spec_text)
    except ValueError:
        raise ValueError(f"epsilon profile must be 'paper', 'ideal' or a number, got {spec_text!r}")
    if not 0.0 <= eps < 1.0:
        raise ValueError("epsilon must be in [0, 1)")
    return eps


def cmd_simulate_detector(args):
    dim = args.dim
    mubs = build_mub_set(dim)
    triplet = _parse_bases(args.triplet, dim, minimum=3, maximum=3)
    profile = _epsilon_profile(args.epsilon_profile, dim)
    model = build_model(mubs, triplet, profile, args.seed)
    states = _detector_states(args, mubs, triplet)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=args.seed, spawn_key=(0xB007,)))
    rows = []
    records = []
    for state_id, psi in states:
        ideal = ideal_entropy_sum(psi, triplet, mubs)
        predicted = predict_entropy_sum(psi, triplet, model)
        counts = expected_counts(psi, model, args.shots)
        low, high = bootstrap_entropy_error(counts, args.resamples, rng)
        rows.append([state_id, triplet, repr(ideal), repr(predicted), repr(low), repr(high)])
        records.append({"state_id": state_id, "ideal_entropy_sum": ideal,
                        "predicted_entropy_sum": predicted,
                        "err_low": low, "err_high": high})
    config = {"command": "simulate-detector", "triplet": triplet, "dim": dim,
              "epsilon_profile": args.epsilon_profile, "seed": args.seed,
              "shots": args.shots, "resamples": args.resamples,
              "states_file": args.states, "random_states": args.random_states}
    header = ["state_id", "triplet", "ideal_entropy_sum", "predicted_entropy_sum",
              "err_low", "err_high"]
    if args.out:
        write_csv(args.out, header, rows, config=config)
    if args.json_out or not args.out:
        _emit({"triplet": triplet, "epsilons": model.epsilons, "predictions": records},
              config, args.json_out)
    return EXIT_OK


# ------------------------------------------------------------- full report

def _check(summary, name, passed, detail):
    summary["checks"][name] = {"passed": bool(passed), **detail}
    if not passed:
        summary["failed_checks"].append(name)


def full_report(args, mubs5=None, mubs4=None):
    """Every verification in one run; returns (summary dict, timings dict)."""
    t_all = time.perf_counter()
    timings = {}
    summary = {"checks": {}, "failed_checks": []}
    mubs5 = mubs5 or build_mub_set(5)
    mubs4 = mubs4 or build_mub_set(4)
    outdir = args.output_dir

    def clock(name, fn):
        t0 = time.perf_counter()
        out = fn()
        timings[name] = round(time.perf_counter() - t0, 3)
        _info(f"  [{name}] {timings[name]}s")
        return out

    # catalog integrity
    for mubs in (mubs5, mubs4):
        rep = verify_mutual_unbiasedness(mubs)
        _check(summary, f"catalog_unbiasedness_d{mubs.dim}", rep["passed"], rep)
    rel = verify_generating_relations(mubs5)
    _check(summary, "generating_relations", rel["passed"], rel)

    # triplet classification, entropy
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed, workers=args.workers)
    cls_rep = clock("classify_entropy_d5", lambda: classify_by_optimization(mubs5, cfg))
    _check(summary, "classification_entropy_d5", cls_rep["passed"], {
        "class_sizes": cls_rep["class_sizes"],
        "delta_n_agreement": cls_rep["delta_n_agreement"],
        "minima": cls_rep["minima"],
    })
    write_csv(os.path.join(outdir, "classes.csv"),
              ["triplet", "class", "entropy_minimum"],
              [[t, cls_rep["assignments"][t], repr(cls_rep["minima"][t])]
               for t in sorted(cls_rep["minima"])],
              config={"command": "full-report", "section": "classes"})

    # variance bounds per class
    def variance_minima():
        return {t: minimize_sum("variance", t, mubs5, cfg).minimum
                for t in enumerate_triplets(5)}
    var_min = clock("variance_d5", variance_minima)
    var_ok = all(
        abs(var_min[t] - CLASS_BOUNDS[5]["variance"][classify_triplet(t, 5)])
        <= tol.VARIANCE_CLASS_ATOL
        for t in var_min
    )
    _check(summary, "variance_bounds_d5", var_ok, {
        "minima": var_min,
        "refined_bounds": {
            cls: min(v for t, v in var_min.items() if classify_triplet(t, 5) == cls)
            for cls in ("S1", "S2")
        },
    })

    # d=4 uniformity
    def d4_minima():
        ent = {t: minimize_sum("entropy", t, mubs4, cfg).minimum
               for t in enumerate_triplets(4)}
        var = {t: minimize_sum("variance", t, mubs4, cfg).minimum
               for t in enumerate_triplets(4)}
        return ent, var
    ent4, var4 = clock("d4_bounds", d4_minima)
    d4_ok = all(abs(v - 3.0) <= tol.ENTROPY_CLASS_ATOL for v in ent4.values()) and all(
        abs(v - 0.75) <= tol.VARIANCE_CLASS_ATOL for v in var4.values())
    _check(summary, "d4_uniform_bounds", d4_ok, {"entropy": ent4, "variance": var4})

    # pair sums: certified minima and Monte-Carlo floor
    pair_cfg = OptimizerConfig(restarts=max(40, args.restarts // 4), seed=args.seed,
                               workers=args.workers)
    def pair_section():
        minima = {p: minimize_sum("entropy", p, mubs5, pair_cfg).minimum
                  for p in enumerate_pairs(5)}
        scans = {p: scan("entropy", p, mubs5, int(float(args.pair_samples)),
                         args.seed, workers=args.workers)
                 for p in enumerate_pairs(5)}
        return minima, scans
    pair_min, pair_scans = clock("pairs", pair_section)
    mu = math.log2(5)
    pair_ok = all(v >= mu - tol.PAIR_BOUND_SLACK and v <= mu + tol.ENTROPY_CLASS_ATOL
                  for v in pair_min.values())
    pair_mc_ok = all(s.histogram.min_seen >= mu - tol.MC_BOUND_SLACK
                     for s in pair_scans.values())
    _check(summary, "pair_bounds", pair_ok and pair_mc_ok, {
        "certified": pair_min,
        "mc_min_seen": {p: s.histogram.min_seen for p, s in pair_scans.items()},
        "bound": mu,
    })
    write_csv(os.path.join(outdir, "pairs.csv"),
              ["pair", "certified_minimum", "mc_min_seen", "mc_samples"],
              [[p, repr(pair_min[p]), repr(pair_scans[p].histogram.min_seen),
                pair_scans[p].samples] for p in sorted(pair_min)],
              config={"command": "full-report", "section": "pairs"})

    # four-basis uniformity against the reference-state oracle
    quad_cfg = OptimizerConfig(restarts=args.quad_restarts, seed=args.seed,
                               workers=args.workers)
    def quad_section():
        return {q: minimize_sum("entropy", q, mubs5, quad_cfg).minimum
                for q in enumerate_quadruples(5)}
    quad_min = clock("quadruples", quad_section)
    ref4 = reference_state(FOUR_BASIS_REFERENCE_AMPLITUDES, FOUR_BASIS_REFERENCE_PHASE_FIFTHS)
    from .functionals import entropy_sum
    oracle4 = min(entropy_sum(ref4, [mubs5.basis(c) for c in q])
                  for q in enumerate_quadruples(5))
    spread = max(quad_min.values()) - min(quad_min.values())
    quad_ok = spread <= tol.ENTROPY_CLASS_ATOL and all(
        abs(v - oracle4) <= tol.ENTROPY_CLASS_ATOL for v in quad_min.values())
    _check(summary, "four_basis_uniformity", quad_ok, {
        "minima": quad_min, "spread": spread, "reference_state_value": oracle4,
    })
    write_csv(os.path.join(outdir, "quadruples.csv"),
              ["bases", "entropy_minimum"],
              [[q, repr(v)] for q, v in sorted(quad_min.items())],
              config={"command": "full-report", "section": "quadruples"})

    # tabulated optimal states
    table_rep = clock("table_states", lambda: verify_table_states(mubs5))
    _check(summary, "table_states", table_rep["passed"], table_rep)
    relations = clock("table_relations", verify_table_state_relations)
    summary["checks"]["table_state_relations"] = {
        "passed": True, "coverage": relations["coverage"],
        "matched": relations["matched"], "pairs": relations["pairs"],
        "unmatched": relations["unmatched"],
    }

    # class automorphisms and the conjugation identities
    identities = verify_fourier_identities()
    _check(summary, "fourier_identities", identities["passed"], identities)
    autos = clock("automorphisms",
                  lambda: verify_all_automorphisms(args.trials, args.seed, mubs5))
    _check(summary, "class_automorphisms", autos["passed"], {
        "trials": autos["trials"], "elements": autos["elements"],
        "total_violations": autos["total_violations"],
    })

    # Monte-Carlo scans over one triplet per class
    def mc_section():
        out = {}
        for trip in ("ABC", "DEF"):
            rep = scan("entropy", trip, mubs5, int(float(args.samples)), args.seed,
                       workers=args.workers)
            header, rows = scan_csv_rows(rep)
            write_csv(os.path.join(outdir, f"scan_{trip}.csv"), header, rows,
                      config={"command": "full-report", "section": f"scan_{trip}"})
            out[trip] = rep
        return out
    scans = clock("montecarlo", mc_section)
    mc_detail = {}
    mc_ok = True
    means = {}
    for trip, rep in scans.items():
        bound, slack = _scan_bound("entropy", trip, 5)
        h = rep.histogram
        n = rep.samples
        std = math.sqrt(max(h.sum_sq / n - h.mean**2, 0.0))
        means[trip] = (h.mean, std / math.sqrt(n))
        ok = h.min_seen >= bound - slack
        mc_ok &= ok
        mc_detail[trip] = {"min_seen": h.min_seen, "bound": bound, "mean": h.mean,
                           "samples": n, "bound_satisfied": ok}
    gap = abs(means["ABC"][0] - means["DEF"][0])
    se = math.hypot(means["ABC"][1], means["DEF"][1])
    mc_ok &= gap <= 3 * se
    mc_ok &= all(abs(m[0] - 5.55) <= 0.02 for m in means.values())
    _check(summary, "montecarlo_bound_safety", mc_ok, {
        "per_triplet": mc_detail, "mean_gap": gap, "mean_gap_limit": 3 * se,
    })

    # detector predictions
    def detector_section():
        rng_states = haar_block(args.seed, 1, 5, count=1000)
        ideal_model = build_model(mubs5, "ABE", 0.0, args.seed)
        worst = 0.0
        for k in range(1000):
            psi = rng_states[k]
            worst = max(worst, abs(predict_entropy_sum(psi, "ABE", ideal_model)
                                   - ideal_entropy_sum(psi, "ABE", mubs5)))
        rows = []
        ordering_ok = True
        for trip in ("CDF", "ABE"):
            model = build_model(mubs5, trip, paper_epsilon_profile(5), args.seed)
            for b in mubs5:
                for j in range(5):
                    psi = b.column(j)
                    ideal = ideal_entropy_sum(psi, trip, mubs5)
                    pred = predict_entropy_sum(psi, trip, model)
                    kind = "internal" if b.label in trip else "external"
                    if kind == "internal":
                        ordering_ok &= pred > TWO_LOG2_5
                    else:
                        ordering_ok &= pred < 3 * math.log2(5)
                    rows.append([f"{kind}_eig_{b.label}{j}", trip, repr(ideal), repr(pred)])
        write_csv(os.path.join(outdir, "detector_predictions.csv"),
                  ["state_id", "triplet", "ideal_entropy_sum", "predicted_entropy_sum"],
                  rows, config={"command": "full-report", "section": "detector"})
        return worst, ordering_ok
    ideal_gap, ordering_ok = clock("detector", detector_section)
    _check(summary, "detector_noiseless_consistency", ideal_gap <= 1e-12,
           {"max_abs_difference": ideal_gap})
    _check(summary, "detector_noise_ordering", ordering_ok, {})

    summary["runtime_s"] = round(time.perf_counter() - t_all, 3)
    summary["passed"] = not summary["failed_checks"]
    return summary, timings


def cmd_full_report(args):
    outdir = os.environ.get(OUTPUT_DIR_ENV) or args.output_dir
    args.output_dir = outdir
    os.makedirs(outdir, exist_ok=True)
    _info(f"full report -> {outdir}")
    summary, timings = full_report(args)
    config = {"command": "full-report", "seed": args.seed, "restarts": args.restarts,
              "quad_restarts": args.quad_restarts, "samples": args.samples,
              "pair_samples": args.pair_samples, "trials": args.trials,
              "workers": args.workers, "output_dir": outdir}
    runtime = summary.pop("runtime_s")
    doc = envelope(config, summary)
    doc["timings"] = {**timings, "total": runtime}
    write_json(os.path.join(outdir, "summary.json"), doc)
    _info(f"bounds: entropy {TWO_LOG2_5:.5f} / {CLASS_BOUNDS[5]['entropy']['S2']} (d=5), "
          f"3.0 (d=4); variance 1.67 / 1.37 (d=5), 0.75 (d=4)")
    if summary["failed_checks"]:
        _err(f"failed checks: {', '.join(summary['failed_checks'])}")
        return EXIT_VERIFICATION
    _info("all checks passed")
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="mublab",
        description="Mutually unbiased bases and their uncertainty-relation bounds (d=4, 5).",
    )
    parser.add_argument("--version", action="version", version=f"mublab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    parsers = {}

    def add(name, func, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.set_defaults(func=func)
        sp.add_argument("--config", help="key=value file pre-setting any flag of this subcommand")
        parsers[name] = sp
        return sp

    sp = add("dump-mubs", cmd_dump_mubs, help="emit the basis matrices")
    sp.add_argument("--dim", type=int, choices=(4, 5), required=True)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out")

    def opt_flags(sp, restarts=200):
        sp.add_argument("--restarts", type=int, default=restarts)
        sp.add_argument("--max-iterations", type=int, default=2000)
        sp.add_argument("--function-tolerance", type=float, default=1e-9)
        sp.add_argument("--seed", type=int, default=20240)
        sp.add_argument("--workers", type=int, default=1)

    sp = add("minimize", cmd_minimize, help="certify a bound by multistart minimization")
    sp.add_argument("--functional", choices=("entropy", "variance"), required=True)
    sp.add_argument("--bases", required=True)
    sp.add_argument("--dim", type=int, choices=(4, 5), default=5)
    opt_flags(sp)
    sp.add_argument("--out")

    sp = add("scan", cmd_scan, help="Monte-Carlo histogram of a functional over Haar states")
    sp.add_argument("--functional", choices=("entropy", "variance"), required=True)
    sp.add_argument("--bases", required=True)
    sp.add_argument("--dim", type=int, choices=(4, 5), default=5)
    sp.add_argument("--samples", default="1e6")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--seed", type=int, default=20240)
    sp.add_argument("--bins", type=int, default=250)
    sp.add_argument("--out", help="histogram CSV path")
    sp.add_argument("--json-out", help="payload JSON path")

    sp = add("classify", cmd_classify, help="partition all triplets by certified bound")
    sp.add_argument("--dim", type=int, choices=(4, 5), default=5)
    opt_flags(sp)
    sp.add_argument("--out")

    sp = add("verify-lemma", cmd_verify_lemma,
             help="class preservation under U^N Phi^M U^L and the conjugation identities")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=20240)
    sp.add_argument("--out")

    sp = add("verify-table", cmd_verify_table,
             help="tabulated optimal states and their mutual relations")
    sp.add_argument("--out")

    sp = add("simulate-detector", cmd_simulate_detector,
             help="entropy sums as seen through an imperfect detector")
    sp.add_argument("--triplet", required=True)
    sp.add_argument("--dim", type=int, choices=(4, 5), default=5)
    sp.add_argument("--epsilon-profile", default="paper",
                    help="'paper', 'ideal', or a cross-talk fraction")
    sp.add_argument("--states", help="JSON file with {'states': [{'id', 're', 'im'}, ...]}")
    sp.add_argument("--random-states", type=int, default=20)
    sp.add_argument("--shots", type=int, default=100000)
    sp.add_argument("--resamples", type=int, default=500)
    sp.add_argument("--seed", type=int, default=20240)
    sp.add_argument("--out", help="predictions CSV path")
    sp.add_argument("--json-out")

    sp = add("full-report", cmd_full_report, help="run every verification and emit a bundle")
    sp.add_argument("--output-dir", default="mublab_report")
    sp.add_argument("--restarts", type=int, default=200)
    sp.add_argument("--quad-restarts", type=int, default=500)
    sp.add_argument("--samples", default="1e7")
    sp.add_argument("--pair-samples", default="1e6")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--max-iterations", type=int, default=2000)
    sp.add_argument("--function-tolerance", type=float, default=1e-9)
    sp.add_argument("--seed", type=int, default=20240)
    sp.add_argument("--workers", type=int, default=8)

    return parser, parsers


def _apply_config_file(argv, parser, parsers):
    # pre-scan for --config so file values become subcommand defaults
    path = None
    for k, token in enumerate(argv):
        if token == "--config" and k + 1 < len(argv):
            path = argv[k + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None:
        return
    values = load_config_file(path)
    known = set()
    for sp in parsers.values():
        known.update(a.dest for a in sp._actions)
    unknown = sorted(set(values) - known)
    if unknown:
        parser.error(f"unknown config keys: {', '.join(unknown)}")
    for sp in parsers.values():
        dests = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in values.items() if k in dests})


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, parsers = build_parser()
    try:
        _apply_config_file(argv, parser, parsers)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        _err(str(exc))
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
