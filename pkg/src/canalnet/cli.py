"""Command-line front end: ``canalnet <command> ...``.

Every numeric result is written twice, as an exact rational and as a decimal
rounded to ``--precision`` significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np
from scipy.stats import spearmanr

from . import __version__
from .canalization import brute_force_depth, decompose
from .derrida import (
    derrida_exhaustive,
    derrida_monte_carlo,
    derrida_value,
    load_network,
)
from .ensemble import (
    LayerSpec,
    build_layered,
    ncf_layer_specs,
    random_ncf_with_layers,
    sample_exact_depth,
    sample_k_canalizing,
    spearman,
    sweep_depth_comparison,
    sweep_layered,
    sweep_ncf,
    table1_correlations,
)
from .sdds import (
    load_sdds,
    sdds_derrida,
    sdds_derrida_exact,
    sdds_derrida_exhaustive,
    sdds_derrida_monte_carlo,
)
from .sensitivity import (
    WORK_CAP,
    WorkCapExceeded,
    activity_vector,
    exact_activities_layered,
    layered_sensitivity_profile,
    sensitivity_profile,
)
from .truthtable import parse_function, stats

DEFAULT_SAMPLES = 100_000


class CliError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """``"0..4"``, ``"1,3,5"`` or a mix such as ``"0..2,7"``."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise CliError(f"empty range {part!r}")
            values.extend(range(lo, hi + 1))
        else:
            values.append(int(part))
    if not values:
        raise CliError(f"no values in range {text!r}")
    return values


def decimal(x, precision: int) -> str:
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = precision + 5
        value = Decimal(x.numerator) / Decimal(x.denominator)
        return f"{value:.{precision}g}"


def dual(x, precision: int) -> dict:
    x = Fraction(x)
    return {"rational": str(x), "decimal": decimal(x, precision)}


def _json_ready(obj, precision: int):
    if isinstance(obj, Fraction):
        return dual(obj, precision)
    if isinstance(obj, dict):
        return {str(k): _json_ready(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v, precision) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _csv_text(records: list[dict], precision: int) -> str:
    """Fractions become a decimal column plus a trailing ``<name>_rational`` column."""
    if not records:
        return ""
    columns = list(records[0])
    rational = [c for c in columns if any(isinstance(r.get(c), Fraction) for r in records)]
    header = columns + [f"{c}_rational" for c in rational]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        row = []
        for c in columns:
            value = rec.get(c)
            if isinstance(value, Fraction):
                row.append(decimal(value, precision))
            elif value is None:
                row.append("")
            else:
                row.append(value)
        row.extend("" if rec.get(c) is None else str(Fraction(rec[c])) for c in rational)
        writer.writerow(row)
    return buf.getvalue()


def _emit(args, payload, records=None) -> None:
    """Write JSON (``payload``) or CSV (``records``) to ``--out`` or stdout."""
    if args.format == "csv" and records is not None:
        text = _csv_text(records, args.precision)
    else:
        text = json.dumps(_json_ready(payload, args.precision), indent=2) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_oracle(name: str, deviation: float) -> None:
    print(f"oracle {name}: max deviation {deviation:.3g}", file=sys.stderr)


def cmd_analyze(args) -> dict:
    f = parse_function(args.function, args.arity)
    s = decompose(f)
    st = stats(f)
    report = {
        "n": f.n,
        "table": f.render(),
        "weight": st.weight,
        "bias": st.bias,
        "abs_bias": st.absolute_bias,
        **s.to_dict(),
        "v": s.effective_v,
        "alpha": list(activity_vector(f)),
    }
    if f.size * f.size > args.work_cap:
        report["S"] = report["s"] = None
    else:
        profile = sensitivity_profile(f, work_cap=args.work_cap)
        report["S"], report["s"] = list(profile.S), list(profile.s)
    if args.check_oracle:
        oracle = {}
        if f.n <= 6:
            oracle["brute_force_depth"] = brute_force_depth(f)
            oracle["depth_matches"] = oracle["brute_force_depth"] == s.depth
        if s.depth:
            formula = exact_activities_layered(f.n, s.layer_sizes, s.effective_v).alpha[: s.depth]
            enumerated = [report["alpha"][i - 1] for i in s.order]
            dev = max(abs(float(a - b)) for a, b in zip(formula, enumerated))
            oracle["canalizing_activity_deviation"] = dev
            _report_oracle("layered activities", dev)
        report["oracle"] = oracle
    _emit(args, report)
    return report


def _curve_oracle(exhaustive_fn, mc_fn, values):
    try:
        oracle = {m: exhaustive_fn(m) for m in values}
        method = "exhaustive"
        dev = {m: abs(float(values[m] - oracle[m])) for m in values}
    except ValueError:
        method = "monte_carlo"
        oracle, dev = {}, {}
        for m in values:
            est = mc_fn(m)
            oracle[m] = est.mean
            dev[m] = abs(float(values[m]) - est.mean)
    _report_oracle(method, max(dev.values()))
    return method, oracle, dev


def _curve_output(args, values, oracle=None):
    records, rows = [], []
    for m, D in values.items():
        rec = {"m": m, "D": decimal(D, args.precision), "exact_rational": str(D)}
        if oracle is not None:
            method, ref, dev = oracle
            rec["oracle"] = str(ref[m]) if isinstance(ref[m], Fraction) else repr(ref[m])
            rec["deviation"] = f"{dev[m]:.6g}"
        records.append(rec)
        rows.append({"m": m, "D": D})
    payload = {"curve": rows}
    if oracle is not None:
        payload["oracle"] = {"method": oracle[0], "max_deviation": max(oracle[2].values())}
    _emit(args, payload, records)


def _check_m(ms, N):
    bad = [m for m in ms if not 0 <= m <= N]
    if bad:
        raise CliError(f"m values {bad} outside 0..{N}")


def cmd_derrida(args):
    net = load_network(args.network)
    ms = parse_range(args.m) if args.m else list(range(net.N + 1))
    _check_m(ms, net.N)
    values = {m: derrida_value(net, m) for m in ms}
    oracle = None
    if args.check_oracle:
        samples = args.samples or DEFAULT_SAMPLES
        oracle = _curve_oracle(
            lambda m: derrida_exhaustive(net, m, work_cap=args.work_cap),
            lambda m: derrida_monte_carlo(net, m, samples, args.seed),
            values,
        )
    _curve_output(args, values, oracle)
    return values


def cmd_sdds_derrida(args):
    spec = load_sdds(args.spec)
    ms = parse_range(args.m) if args.m else list(range(spec.N + 1))
    _check_m(ms, spec.N)
    fn = sdds_derrida_exact if args.method == "exact" else sdds_derrida
    values = {m: fn(spec, m) for m in ms}
    oracle = None
    if args.check_oracle:
        samples = args.samples or DEFAULT_SAMPLES
        oracle = _curve_oracle(
            lambda m: sdds_derrida_exhaustive(spec, m, work_cap=args.work_cap),
            lambda m: sdds_derrida_monte_carlo(spec, m, samples, args.seed),
            values,
        )
    _curve_output(args, values, oracle)
    return values


def _sweep_oracle_ncf(n: int) -> float:
    worst = 0.0
    for spec in ncf_layer_specs(n):
        formula = layered_sensitivity_profile(n, spec.layer_sizes).S
        enumerated = sensitivity_profile(build_layered(spec)).S
        worst = max(worst, max(abs(float(a - b)) for a, b in zip(formula, enumerated)))
    return worst


def cmd_sweep(args):
    if args.kind == "ncf":
        ms = parse_range(args.m) if args.m else [1]
        _check_m(ms, args.N)
        rows = sweep_ncf(args.N, args.n, ms)
        records = [r.as_record() for r in rows]
        if args.check_oracle:
            _report_oracle("enumerated c-sensitivities", _sweep_oracle_ncf(args.n))
    elif args.kind == "layered":
        if args.k is None:
            raise CliError("--kind layered needs --k")
        ms = parse_range(args.m) if args.m else [1]
        _check_m(ms, args.N)
        rows = sweep_layered(args.n, args.k, ms, args.N)
        records = [r.as_record() for r in rows]
        if args.check_oracle:
            worst = 0.0
            for r in rows:
                f = build_layered(LayerSpec(args.n, r.layers, r.v))
                if 1 in r.D:
                    # for a homogeneous network D(F, 1) is the sum of activities
                    worst = max(worst, abs(float(sum(activity_vector(f)) - r.D[1])))
            _report_oracle("enumerated D1", worst)
    else:
        n_list = parse_range(args.n_list) if args.n_list else [args.n]
        k_list = parse_range(args.k_list) if args.k_list else list(range(1, max(n_list) + 1))
        samples = args.samples or 10**7
        rows = sweep_depth_comparison(n_list, k_list, samples, args.seed)
        records = [r.as_record() for r in rows]
        if args.check_oracle:
            mc_samples = min(samples, 20_000)
            worst = 0.0
            rng = np.random.default_rng(args.seed)
            for r in rows:
                if r.ensemble != "min_depth":
                    continue
                mean = np.mean([
                    float(sum(activity_vector(sample_k_canalizing(r.n, r.k, rng).function)))
                    for _ in range(mc_samples)
                ])
                worst = max(worst, abs(mean - float(r.D1)))
            _report_oracle("sampled min-depth D1", worst)
    _emit(args, {"rows": records}, records)
    return records


def cmd_sample(args):
    rng = np.random.default_rng(args.seed)
    count = args.samples or 10
    out = []
    for index in range(count):
        if args.layers:
            sizes = tuple(int(x) for x in args.layers.split("-"))
            f = random_ncf_with_layers(LayerSpec(args.n, sizes), rng)
        elif args.exact_depth:
            f = sample_exact_depth(args.n, args.k, rng).function
        else:
            f = sample_k_canalizing(args.n, args.k, rng).function
        s = decompose(f)
        out.append({
            "index": index,
            "function": f.render(),
            "depth": s.depth,
            "layers": "-".join(map(str, s.layer_sizes)),
            "weight": f.weight,
        })
    if args.check_oracle:
        bad = [r["index"] for r in out if r["depth"] < (args.n if args.layers else args.k)]
        _report_oracle("depth", float(len(bad)))
    _emit(args, {"samples": out}, out)
    return out


def cmd_correlate(args):
    if args.k is None:
        result = table1_correlations(args.n)
    else:
        rows = sweep_layered(args.n, args.k, [1], args.N)
        d1 = [float(r.D[1]) for r in rows]
        result = {
            "n": args.n,
            "k": args.k,
            "structures": len(rows),
            "k1": spearman(d1, [r.k1 for r in rows]),
            "abs_bias": spearman(d1, [float(r.abs_bias) for r in rows]),
            "r": spearman(d1, [r.r for r in rows]),
        }
    if args.check_oracle:
        specs = ncf_layer_specs(args.n) if args.k is None else None
        if specs is not None:
            fs = [build_layered(s) for s in specs]
            ys = [float(sum(activity_vector(f))) for f in fs]
            ref = spearmanr(ys, [s.layer_sizes[0] for s in specs]).statistic
            _report_oracle("spearman k1", abs(ref - result["k1"]))
    records = [{"quantity": q, "spearman": "" if result[q] is None else f"{result[q]:.{args.precision}g}"}
               for q in ("k1", "abs_bias", "r")]
    _emit(args, result, records)
    return result


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int)
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json"), help="default: json for analyze/correlate, csv otherwise")
    common.add_argument("--check-oracle", action="store_true")
    common.add_argument("--work-cap", type=int, default=WORK_CAP)
    common.add_argument("--precision", type=int, default=12)

    parser = argparse.ArgumentParser(prog="canalnet", description="Canalization and Derrida values of Boolean networks")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="structure and sensitivities of one function")
    p.add_argument("function", help="truth table (binary or 0x hex) or expression in x1..xn")
    p.add_argument("--arity", type=int)
    p.set_defaults(func=cmd_analyze, default_format="json")

    p = sub.add_parser("derrida", parents=[common], help="Derrida curve of a network")
    p.add_argument("--network", required=True)
    p.add_argument("--m")
    p.set_defaults(func=cmd_derrida)

    p = sub.add_parser("sdds-derrida", parents=[common], help="Derrida curve of a stochastic network")
    p.add_argument("--spec", required=True)
    p.add_argument("--m")
    p.add_argument("--method", choices=("theorem", "exact"), default="theorem")
    p.set_defaults(func=cmd_sdds_derrida)

    p = sub.add_parser("sweep", parents=[common], help="tables over layer structures")
    p.add_argument("--kind", choices=("ncf", "layered", "depth"), required=True)
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--k", type=int)
    p.add_argument("--m")
    p.add_argument("--n-list")
    p.add_argument("--k-list")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sample", parents=[common], help="draw random canalizing functions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--exact-depth", action="store_true")
    p.add_argument("--layers", help="NCF layer sizes such as 1-2-2")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("correlate", parents=[common], help="Spearman correlations of D(F,1)")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--k", type=int, help="layered functions of depth k instead of NCFs")
    p.add_argument("--N", type=int, default=100)
    p.set_defaults(func=cmd_correlate, default_format="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = getattr(args, "default_format", "csv")
    if args.command == "sample" and not args.layers and args.k is None:
        parser.error("sample needs --k or --layers")
    try:
        args.func(args)
    except (CliError, ValueError, KeyError, OSError, WorkCapExceeded) as exc:
        print(f"canalnet: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
