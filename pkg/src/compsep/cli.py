"""Command-line fairness audits.

Exit codes: 0 criterion satisfied (or command succeeded), 2 violation
detected, 1 error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
from pathlib import Path

from . import __version__
from .data import (
    REFERENCE_DISTRIBUTIONS,
    FormatError,
    JointDistribution,
    load_distribution,
    load_pair_set,
    load_point_set,
)
from .pairwise import build_pairs, estimate_comparative_rates
from .pointwise import eod_aod, estimate_group_rates
from .power import comparative_power, matched_pair_budget, separation_power
from .sim import SimConfig, run_detection_study
from .stats import separation_verdict, test_comparative_separation
from .weights import SCHEMES, weight_table

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2


class UsageError(ValueError):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _distribution(ref: str) -> JointDistribution:
    if ref in REFERENCE_DISTRIBUTIONS and not Path(ref).exists():
        return REFERENCE_DISTRIBUTIONS[ref]
    d = load_distribution(_read(ref))
    if not d.name:
        d = JointDistribution(d.p, Path(ref).stem)
    return d


def _hypotheses(verdict) -> list[dict]:
    return [
        {
            "name": h.name,
            "rate_left": h.rate_left,
            "rate_right": h.rate_right,
            "n_left": h.n_left,
            "n_right": h.n_right,
            "z": h.z,
            "p_value": h.p_value,
            "rejected": h.rejected,
        }
        for h in verdict.results
    ]


def _report(command: str, **sections) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "command": command, **sections}


def evaluate_report(text: str, alpha: float) -> dict:
    s = load_point_set(text, "binary")
    r = estimate_group_rates(s)
    eod, aod = eod_aod(r)
    v = separation_verdict(r, alpha)
    return _report(
        "evaluate",
        inputs={"points": len(s), "alpha": alpha},
        metrics={
            "tpr_a1": r.tpr_a1, "tpr_a0": r.tpr_a0, "fpr_a1": r.fpr_a1, "fpr_a0": r.fpr_a0,
            "eod": eod, "aod": aod,
        },
        hypotheses=_hypotheses(v),
        verdict={"criterion": "separation", "violated": v.violated},
        warnings=v.small_sample_warnings,
    )


def evaluate_pairs_report(
    text: str,
    alpha: float,
    make_pairs: int | None = None,
    seed: int | None = None,
    labels: str = "binary",
    all_pairs: bool = False,
) -> dict:
    inputs: dict = {"alpha": alpha}
    if make_pairs is not None or all_pairs:
        s = load_point_set(text, labels)
        if seed is None:
            seed = secrets.randbelow(2**32)
        sampling = "all" if all_pairs else "independent"
        sp = build_pairs(s, make_pairs, seed, sampling)
        inputs.update(points=len(s), labels=labels, sampling=sampling, requested_pairs=make_pairs, seed=seed)
    else:
        sp = load_pair_set(text)
    inputs.update(pairs=len(sp), discarded_ties=sp.discarded_ties)
    rates = estimate_comparative_rates(sp)
    v = test_comparative_separation(sp, alpha)
    return _report(
        "evaluate-pairs",
        inputs=inputs,
        metrics={f"tpr({a},{b})": rates.tpr[a, b] for a, b in ((1, 0), (0, 1), (1, 1), (0, 0))},
        support={f"({a},{b})": rates.support[a, b] for a, b in ((1, 0), (0, 1), (1, 1), (0, 0))},
        hypotheses=_hypotheses(v),
        verdict={"criterion": "comparative separation", "violated": v.violated},
        warnings=v.small_sample_warnings,
    )


def _power_section(p) -> dict:
    return {
        "criterion": p.criterion,
        "effects": p.effects,
        "beta": p.beta_per_hypothesis,
        "beta_composed": p.beta_composed,
        "power": p.power,
        "expected_counts": p.effective_counts,
    }


def power_report(d: JointDistribution, n=None, n_p=None, match_n=None, alpha: float = 0.05) -> dict:
    if n is None and n_p is None and match_n is None:
        raise UsageError("power needs at least one of --n, --np, --match-n")
    power = []
    if n is not None:
        power.append({"size": n, **_power_section(separation_power(d, n, alpha))})
    if n_p is not None:
        power.append({"size": n_p, **_power_section(comparative_power(d, n_p, alpha))})
    rep = _report("power", inputs={"distribution": d.name, "alpha": alpha}, power=power)
    if match_n is not None:
        b = matched_pair_budget(d, match_n, alpha)
        rep["budget"] = {
            "n": b.n,
            "n_p": b.n_p,
            "ratio": b.ratio,
            "separation_power": b.separation_power,
            "comparative_power": b.comparative_power,
            "satisfying": b.satisfying,
            "notice": b.notice,
        }
    return rep


def simulate_report(
    dists: list[JointDistribution],
    criterion: str,
    ns: list[int],
    nps: list[int],
    replicates: int,
    seed: int | None,
    alpha: float,
    workers: int = 1,
) -> dict:
    if seed is None:
        seed = secrets.randbelow(2**32)
    crits = ["separation", "comparative"] if criterion == "both" else [criterion]
    rows = []
    for d in dists:
        for crit in crits:
            sizes = ns if crit == "separation" else nps
            if not sizes:
                raise UsageError(f"{crit} simulation needs {'--n' if crit == 'separation' else '--np'}")
            for size in sizes:
                kw = {"n": size} if crit == "separation" else {"n_p": size}
                cfg = SimConfig(d, replicates=replicates, alpha=alpha, seed=seed, workers=workers, **kw)
                res = run_detection_study(cfg, crit)
                pw = separation_power if crit == "separation" else comparative_power
                rows.append(
                    {
                        "distribution": d.name,
                        "criterion": crit,
                        "size": size,
                        "expected": pw(d, size, alpha).power,
                        "simulated": res.detection_frequency,
                        "replicates": res.replicate_count,
                        "errored": res.errored,
                        "moments": {k: {"mean": m, "variance": v} for k, (m, v) in res.estimator_moments.items()},
                    }
                )
    return _report(
        "simulate",
        inputs={"replicates": replicates, "seed": seed, "alpha": alpha},
        results=rows,
    )


def weights_csv(text: str, scheme: str) -> tuple[str, dict]:
    """Append a ``w`` column to a CSV that has binary ``y`` and ``a`` columns."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise FormatError("empty file: no header")
    for col in ("y", "a"):
        if col not in reader.fieldnames:
            raise FormatError(f"weights input needs a {col!r} column")
    if "w" in reader.fieldnames:
        raise FormatError("input already has a 'w' column")
    rows = list(reader)
    if not rows:
        raise FormatError("empty file: header without data rows")
    ys, as_ = [], []
    for i, row in enumerate(rows, start=1):
        try:
            ys.append(int(float(row["y"])))
            as_.append(int(float(row["a"])))
        except (TypeError, ValueError):
            raise FormatError("non-numeric y or a", i) from None
    table = weight_table(ys, as_, scheme)
    w = table.lookup(ys, as_)
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=[*reader.fieldnames, "w"], lineterminator="\n")
    writer.writeheader()
    for row, wt in zip(rows, w):
        writer.writerow({**row, "w": repr(float(wt))})
    summary = {f"a={a},y={y}": v for (a, y), v in sorted(table.w.items())}
    return out.getvalue(), summary


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _f3(x) -> str:
    return f"{x:.3f}"


def render_text(rep: dict) -> str:
    lines = [f"compsep {rep['command']} (schema {rep['schema_version']})"]
    for k, v in rep.get("inputs", {}).items():
        lines.append(f"  {k}: {v}")
    if "metrics" in rep:
        lines.append("metrics:")
        for k, v in rep["metrics"].items():
            extra = ""
            if "support" in rep:
                extra = f"  (support {rep['support'][k[3:]]})"
            lines.append(f"  {k:<10} {_f3(v)}{extra}")
    if "hypotheses" in rep:
        lines.append("hypotheses:")
        for h in rep["hypotheses"]:
            decision = "REJECTED" if h["rejected"] else "accepted"
            lines.append(
                f"  {h['name']:<5} {_f3(h['rate_left'])} vs {_f3(h['rate_right'])}  "
                f"z = {h['z']:.3f}  p = {h['p_value']:.4f}  {decision}"
            )
    if "verdict" in rep:
        v = rep["verdict"]
        state = "VIOLATED" if v["violated"] else "satisfied"
        lines.append(f"verdict: {v['criterion']} {state}")
    for w in rep.get("warnings", []):
        lines.append(f"warning: {w}")
    for p in rep.get("power", []):
        lines.append(f"power ({p['criterion']}, size {p['size']}):")
        for name, b in p["beta"].items():
            lines.append(f"  beta {name:<5} {b:.4f}  (effect {p['effects'][name]:+.3f})")
        lines.append(f"  beta composed {p['beta_composed']:.4f}")
        lines.append(f"  power         {p['power']:.4f}")
    if "budget" in rep:
        b = rep["budget"]
        lines.append(
            f"matched pair budget: n_p = {b['n_p']} for n = {b['n']} (ratio {b['ratio']:.3f}); "
            f"power {b['comparative_power']:.4f} vs {b['separation_power']:.4f}"
        )
        if b["notice"]:
            lines.append(f"  note: {b['notice']}")
    if "results" in rep:
        lines.append(f"{'distribution':<14}{'criterion':<13}{'size':>7}{'expected':>10}{'simulated':>11}")
        for r in rep["results"]:
            lines.append(
                f"{r['distribution']:<14}{r['criterion']:<13}{r['size']:>7}"
                f"{r['expected']:>10.4f}{r['simulated']:>11.4f}"
            )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compsep",
        description="Separation and comparative-separation fairness audits.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
        p.add_argument("--json", action="store_true", help="emit the machine-readable report")

    p = sub.add_parser("evaluate", help="test separation on a y,c,a point CSV")
    p.add_argument("points")
    common(p)

    p = sub.add_parser("evaluate-pairs", help="test comparative separation")
    p.add_argument("input", help="pair CSV, or point CSV with --make-pairs/--all-pairs")
    p.add_argument("--make-pairs", type=int, metavar="N_P", help="sample N_P pairs from a point CSV")
    p.add_argument("--all-pairs", action="store_true", help="use every pair of a (small) point CSV")
    p.add_argument("--seed", type=int, help="pair sampling seed (generated and echoed if omitted)")
    p.add_argument("--labels", choices=("binary", "continuous"), default="binary")
    common(p)

    p = sub.add_parser("power", help="analytic power for a joint distribution")
    p.add_argument("distribution", help="distribution JSON file or a built-in name (f_theta0..f_theta3)")
    p.add_argument("--n", type=int, help="pointwise test size")
    p.add_argument("--np", dest="n_p", type=int, help="pairwise test size")
    p.add_argument("--match-n", type=int, help="find the pair budget matching separation power at this n")
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo detection frequencies")
    p.add_argument("distribution", nargs="+")
    p.add_argument("--criterion", choices=("separation", "comparative", "both"), default="both")
    p.add_argument("--n", type=int, nargs="*", default=[])
    p.add_argument("--np", dest="n_p", type=int, nargs="*", default=[])
    p.add_argument("--replicates", type=int, default=10_000)
    p.add_argument("--seed", type=int, help="master seed (generated and echoed if omitted)")
    p.add_argument("--workers", type=int, default=1)
    common(p)

    p = sub.add_parser("weights", help="append Reweighing/FairBalance weights to a training CSV")
    p.add_argument("train")
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("-o", "--output", help="output CSV (default stdout)")
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "weights":
            out, summary = weights_csv(_read(args.train), args.scheme)
            if args.output:
                Path(args.output).write_text(out)
                table = ", ".join(f"w({k}) = {v:.6g}" for k, v in summary.items())
                print(f"{args.scheme}: {table}", file=stderr)
            else:
                stdout.write(out)
            return EXIT_OK
        if args.command == "evaluate":
            rep = evaluate_report(_read(args.points), args.alpha)
        elif args.command == "evaluate-pairs":
            rep = evaluate_pairs_report(
                _read(args.input), args.alpha, args.make_pairs, args.seed, args.labels, args.all_pairs
            )
        elif args.command == "power":
            rep = power_report(_distribution(args.distribution), args.n, args.n_p, args.match_n, args.alpha)
        else:
            dists = [_distribution(ref) for ref in args.distribution]
            rep = simulate_report(
                dists, args.criterion, args.n, args.n_p, args.replicates, args.seed, args.alpha, args.workers
            )
    except (ValueError, OSError, RuntimeError) as err:
        print(f"error: {err}", file=stderr)
        return EXIT_ERROR
    stdout.write(json.dumps(rep, indent=2) + "\n" if args.json else render_text(rep))
    if "verdict" in rep and rep["verdict"]["violated"]:
        return EXIT_VIOLATED
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
