"""Command-line front end.

Subcommands: decide-pm, decide-pack, partition, lattice, oracle, gen, corpus.
Reports are line-oriented `key=value` pairs (UTF-8, LF); `--human` switches to
an aligned rendering with identical fields.  Keys whose final dotted segment
starts with `time` carry wall-clock seconds and are the only nondeterministic
fields.  Exit codes: 0 YES/valid output, 1 NO, 2 PRECONDITION_UNMET,
3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .decide import (
    NO,
    PRECONDITION_UNMET,
    YES,
    Decision,
    PipelineConfig,
    decide_pack_graph,
    decide_pack_partite,
    decide_pm,
    oracle_decide,
)
from .gen import (
    gen_divisibility_barrier,
    gen_random_dense,
    gen_space_barrier,
    reduce_degree_padding,
    reduce_edge_blowup,
    reduce_lin_uplift,
)
from .hgraph import Hypergraph, KhgFormatError, load_khg, render_khg
from .lattice import (
    NotInAmbientLatticeError,
    coset_group,
    index_vector,
    lattice_from,
    robust_index_set,
)
from .partition import (
    PartitionPreconditionError,
    find_closed_partition,
    parse_partition,
    render_partition,
)
from .pattern import CapExceededError, PatternError, pattern_from_name
from .reach import EXACT_ROBUST, DENSITY, ThresholdSchedule

EXIT_YES = 0
EXIT_NO = 1
EXIT_PRECONDITION = 2
EXIT_USAGE = 3

_VERDICT_EXIT = {YES: EXIT_YES, NO: EXIT_NO, PRECONDITION_UNMET: EXIT_PRECONDITION}


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit status 2 on bad usage; the contract wants 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class CliInputError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if v is None:
        return "-"
    if isinstance(v, (tuple, list, frozenset, set, range)):
        items = sorted(v) if isinstance(v, (set, frozenset)) else list(v)
        if not items:
            return "()"
        if all(
            isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], (tuple, list))
            for x in items
        ):
            # (vector, count) association pairs
            return "|".join(f"{_fmt(x[0])}:{_fmt(x[1])}" for x in items)
        if any(isinstance(x, (tuple, list, set, frozenset)) for x in items):
            return "|".join(_fmt(x) for x in items)
        return ",".join(_fmt(x) for x in items)
    return str(v)


def render_report(fields: dict, human: bool = False) -> str:
    lines = []
    if human:
        width = max((len(k) for k in fields), default=0)
        for k, v in fields.items():
            lines.append(f"{k.ljust(width)}  {_fmt(v)}")
    else:
        for k, v in fields.items():
            lines.append(f"{k}={_fmt(v)}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict[str, str]:
    """Inverse of the machine rendering: key -> formatted value string."""
    out: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"not a key=value line: {line!r}")
        out[key] = value
    return out


def _load_host(path: str) -> Hypergraph:
    try:
        return load_khg(path)
    except FileNotFoundError:
        raise CliInputError(f"no such file: {path}") from None
    except KhgFormatError as e:
        raise CliInputError(f"{path}: {e}") from None


def _pattern(spec: str):
    try:
        return pattern_from_name(spec)
    except PatternError as e:
        raise CliInputError(str(e)) from None


_CONFIG_KEYS = {
    "l": ("l", int),
    "delta": ("delta", Fraction),
    "q": ("q", int),
    "t": ("t", int),
    "eta": ("eta", Fraction),
    "gamma": ("gamma", Fraction),
    "alpha": ("alpha", Fraction),
    "mode": ("mode", str),
    "reach-count": ("exact_count", int),
    "beta": ("beta", Fraction),
    "mu": ("mu", Fraction),
    "cascade": ("cascade", Fraction),
    "cap": ("cap", int),
    "oracle-cap": ("oracle_cap", int),
}


def _config_from_mapping(d: dict) -> PipelineConfig:
    kw = {}
    for key, raw in d.items():
        if key not in _CONFIG_KEYS:
            raise CliInputError(f"unknown pipeline parameter: {key}")
        field, conv = _CONFIG_KEYS[key]
        try:
            kw[field] = conv(raw)
        except (ValueError, ZeroDivisionError) as e:
            raise CliInputError(f"bad value for {key}: {raw!r} ({e})") from None
    if "delta" not in kw:
        raise CliInputError("delta is required")
    try:
        return PipelineConfig(**kw)
    except ValueError as e:
        raise CliInputError(str(e)) from None


def _args_config_mapping(args) -> dict:
    d = {}
    for key in _CONFIG_KEYS:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            d[key] = val
    return d


def _add_config_flags(sp, *, with_l: bool):
    if with_l:
        sp.add_argument("--l", type=int, default=None, help="degree index (default 2)")
    sp.add_argument("--delta", required=True, help="degree fraction, e.g. 3/5 or 0.6")
    sp.add_argument("--eta", default=None, help="sparse-neighborhood fraction")
    sp.add_argument("--gamma", default=None, help="slack above the regime threshold")
    sp.add_argument("--alpha", default=None, help="partition slack (default derived)")
    sp.add_argument("--q", type=int, default=None, help="solubility budget override")
    sp.add_argument("--t", type=int, default=None, help="closure depth override")
    sp.add_argument(
        "--mode", choices=[EXACT_ROBUST, DENSITY], default=None, help="threshold mode"
    )
    sp.add_argument(
        "--reach-count",
        type=int,
        default=None,
        help="explicit witness count for exact modes",
    )
    sp.add_argument("--beta", default=None, help="density-mode reachability fraction")
    sp.add_argument("--mu", default=None, help="density-mode robust-vector fraction")
    sp.add_argument("--cascade", default=None, help="density cascade factor per level")
    sp.add_argument("--cap", type=int, default=None, help="desk-scale feasibility cap")
    sp.add_argument("--oracle-cap", type=int, default=None, help="oracle vertex cap")
    sp.add_argument(
        "--no-oracle", action="store_true", help="skip the oracle cross-check"
    )
    sp.add_argument("--human", action="store_true", help="aligned human rendering")


def _decision_fields(path: str, dec: Decision) -> dict:
    fields = {"file": path}
    fields.update(dec.params)
    for key, val in dec.certificate.items():
        fields[f"cert_{key}"] = val
    return fields


def _cross_check(fields: dict, host, pattern, dec: Decision, config, skip: bool):
    if skip or host.n > config.oracle_cap:
        fields["oracle"] = "-"
        fields["agreement"] = "skipped"
        return
    t0 = time.perf_counter()
    answer = oracle_decide(host, pattern, cap=config.oracle_cap)
    fields["oracle"] = YES if answer else NO
    if dec.verdict in (YES, NO):
        fields["agreement"] = dec.verdict == fields["oracle"]
    else:
        fields["agreement"] = "skipped"
    fields["time_oracle"] = f"{time.perf_counter() - t0:.6f}"


def _run_decide(host: Hypergraph, pattern, config: PipelineConfig) -> Decision:
    if pattern.is_single_edge and host.k >= 3:
        return decide_pm(host, config)
    if host.k == 2:
        return decide_pack_graph(host, pattern, config)
    return decide_pack_partite(host, pattern, config)


def cmd_decide_pm(args) -> int:
    host = _load_host(args.file)
    mapping = _args_config_mapping(args)
    mapping.setdefault("l", 2)
    config = _config_from_mapping(mapping)
    t0 = time.perf_counter()
    dec = decide_pm(host, config)
    dt = time.perf_counter() - t0
    fields = _decision_fields(args.file, dec)
    fields["degree_profile"] = host.degree_profile()
    _cross_check(fields, host, _pattern(f"edge:{host.k}"), dec, config, args.no_oracle)
    fields["time_decide"] = f"{dt:.6f}"
    sys.stdout.write(render_report(fields, args.human))
    return _VERDICT_EXIT[dec.verdict]


def cmd_decide_pack(args) -> int:
    host = _load_host(args.file)
    pattern = _pattern(args.pattern)
    config = _config_from_mapping(_args_config_mapping(args))
    t0 = time.perf_counter()
    dec = _run_decide(host, pattern, config)
    dt = time.perf_counter() - t0
    fields = _decision_fields(args.file, dec)
    fields["pattern"] = args.pattern
    fields["degree_profile"] = host.degree_profile()
    _cross_check(fields, host, pattern, dec, config, args.no_oracle)
    fields["time_decide"] = f"{dt:.6f}"
    sys.stdout.write(render_report(fields, args.human))
    return _VERDICT_EXIT[dec.verdict]


def cmd_partition(args) -> int:
    host = _load_host(args.file)
    pattern = _pattern(args.pattern)
    schedule = ThresholdSchedule(
        mode=args.mode or EXACT_ROBUST,
        explicit_count=args.reach_count or 1,
        beta=Fraction(args.beta) if args.beta else Fraction(1, 100),
        cascade=Fraction(args.cascade) if args.cascade else Fraction(1, 2),
    )
    try:
        part = find_closed_partition(
            host,
            pattern,
            host.vertices(),
            args.c_cap,
            Fraction(args.delta_prime),
            alpha=Fraction(args.alpha) if args.alpha else None,
            schedule=schedule,
            cap=args.cap or 24,
        )
    except PartitionPreconditionError as e:
        sys.stdout.write(
            render_report(
                {"verdict": PRECONDITION_UNMET, "cert_kind": "partition-precondition",
                 "cert_detail": str(e)},
                args.human,
            )
        )
        return EXIT_PRECONDITION
    text = render_partition(part)
    text += f"# r={part.d}\n# sizes={_fmt(tuple(len(c) for c in part.classes))}\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        sys.stdout.write(
            render_report(
                {"op": "partition", "file": args.file, "r": part.d, "out": args.output},
                args.human,
            )
        )
    else:
        sys.stdout.write(text)
    return EXIT_YES


def cmd_lattice(args) -> int:
    host = _load_host(args.file)
    pattern = _pattern(args.pattern)
    try:
        part_text = Path(args.partition).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CliInputError(f"no such file: {args.partition}") from None
    try:
        part = parse_partition(part_text)
    except ValueError as e:
        raise CliInputError(f"{args.partition}: {e}") from None
    iset = robust_index_set(
        host,
        pattern,
        part,
        mode=args.mode or EXACT_ROBUST,
        count_threshold=args.reach_count or 1,
        mu=Fraction(args.mu) if args.mu else Fraction(1, 100),
    )
    lat = lattice_from(iset)
    fields = {
        "op": "lattice",
        "file": args.file,
        "pattern": args.pattern,
        "d": part.d,
        "mode": iset.mode,
        "threshold": iset.threshold,
        "i_mu": iset.vectors,
        "vector_counts": iset.counts,
        "hnf_basis": lat.basis,
    }
    try:
        group = coset_group(lat, pattern.m)
    except NotInAmbientLatticeError as e:
        raise CliInputError(str(e)) from None
    fields["q_order"] = group.order if group.finite else "INFINITE"
    fields["q_divisors"] = group.divisors
    full = index_vector(part, host.vertices())
    fields["index_vector_v"] = full
    if group.finite:
        res = group.residue(full)
        fields["residue_id"] = res.id
        fields["residue_coords"] = res.coords
    else:
        fields["residue_id"] = "-"
    sys.stdout.write(render_report(fields, args.human))
    return EXIT_YES


def cmd_oracle(args) -> int:
    host = _load_host(args.file)
    pattern = _pattern(args.pattern)
    cap = args.oracle_cap or 24
    t0 = time.perf_counter()
    answer = oracle_decide(host, pattern, cap=cap)
    fields = {
        "op": "oracle",
        "file": args.file,
        "pattern": args.pattern,
        "n": host.n,
        "k": host.k,
        "verdict": YES if answer else NO,
        "time_oracle": f"{time.perf_counter() - t0:.6f}",
    }
    sys.stdout.write(render_report(fields, args.human))
    return EXIT_YES if answer else EXIT_NO


def cmd_gen(args) -> int:
    family = args.family
    fields = {"op": "gen", "family": family}

    def need(flag, value):
        if value is None:
            raise CliInputError(f"gen {family} requires --{flag}")
        return value

    if family == "div-barrier":
        out = gen_divisibility_barrier(
            need("n", args.n), need("k", args.k), need("a", args.a)
        )
    elif family == "space-barrier":
        out = gen_space_barrier(
            need("n", args.n), need("k", args.k), need("core", args.core)
        )
    elif family == "random":
        out = gen_random_dense(
            need("n", args.n),
            need("k", args.k),
            need("p", args.p),
            need("seed", args.seed),
            args.floor or 0,
            floor_l=args.floor_l,
        )
    elif family == "lin-uplift":
        out = reduce_lin_uplift(_load_host(need("in", args.infile)))
    elif family == "edge-blowup":
        out = reduce_edge_blowup(
            _load_host(need("in", args.infile)), _pattern(need("pattern", args.pattern))
        )
    elif family == "degree-pad":
        out, info = reduce_degree_padding(
            _load_host(need("in", args.infile)),
            _pattern(need("pattern", args.pattern)),
            Fraction(need("gamma", args.gamma)),
        )
        for key, val in info.items():
            fields[f"pad_{key}"] = val
    else:
        raise CliInputError(f"unknown family: {family}")
    fields.update({"n": out.n, "k": out.k, "edges": len(out.edges)})
    if args.output:
        Path(args.output).write_text(render_khg(out), encoding="utf-8")
        fields["out"] = args.output
        sys.stdout.write(render_report(fields, args.human))
    else:
        sys.stdout.write(render_khg(out))
    return EXIT_YES


def _corpus_instance(entry: dict, base: Path, fields: dict) -> tuple[bool, bool]:
    """Runs one manifest entry; returns (expect_ok, oracle_ok)."""
    name = entry["name"]
    op = entry["op"]
    path = base / entry["file"]
    host = _load_host(str(path))
    params = dict(entry.get("params", {}))
    oracle_cap = int(params.get("oracle-cap", 24))
    expect = entry.get("expect")
    prefix = f"instance.{name}"
    fields[f"{prefix}.op"] = op
    fields[f"{prefix}.file"] = entry["file"]
    t0 = time.perf_counter()
    if op == "oracle":
        pattern = _pattern(entry["pattern"])
        verdict = YES if oracle_decide(host, pattern, cap=oracle_cap) else NO
        oracle_verdict = verdict
    elif op in ("decide-pm", "decide-pack"):
        if op == "decide-pm":
            pattern = _pattern(f"edge:{host.k}")
            params.setdefault("l", 2)
        else:
            pattern = _pattern(entry["pattern"])
            fields[f"{prefix}.pattern"] = entry["pattern"]
        config = _config_from_mapping(params)
        dec = _run_decide(host, pattern, config)
        verdict = dec.verdict
        fields[f"{prefix}.certificate"] = dec.certificate.get("kind", "")
        if "q_order" in dec.params:
            fields[f"{prefix}.q_order"] = dec.params["q_order"]
        if "r" in dec.params:
            fields[f"{prefix}.r"] = dec.params["r"]
        oracle_verdict = None
        if host.n <= oracle_cap:
            oracle_verdict = YES if oracle_decide(host, pattern, cap=oracle_cap) else NO
    else:
        raise CliInputError(f"unknown op in manifest: {op}")
    dt = time.perf_counter() - t0
    fields[f"{prefix}.verdict"] = verdict
    fields[f"{prefix}.expect"] = expect if expect is not None else "-"
    expect_ok = expect is None or verdict == expect
    fields[f"{prefix}.expect_ok"] = expect_ok
    if op != "oracle":
        fields[f"{prefix}.oracle"] = oracle_verdict if oracle_verdict else "-"
        if oracle_verdict is not None and verdict in (YES, NO):
            agree = verdict == oracle_verdict
            fields[f"{prefix}.agreement"] = agree
        else:
            agree = True
            fields[f"{prefix}.agreement"] = "skipped"
    else:
        agree = True
    fields[f"{prefix}.time_run"] = f"{dt:.6f}"
    return expect_ok, agree


def cmd_corpus(args) -> int:
    manifest_path = Path(args.manifest)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliInputError(f"no such file: {args.manifest}") from None
    except json.JSONDecodeError as e:
        raise CliInputError(f"{args.manifest}: {e}") from None
    instances = manifest.get("instances", [])
    base = manifest_path.parent
    fields: dict = {"op": "corpus", "manifest": str(args.manifest)}
    failures = 0
    disagreements = 0
    t0 = time.perf_counter()
    for entry in instances:
        expect_ok, agree = _corpus_instance(entry, base, fields)
        if not expect_ok:
            failures += 1
        if not agree:
            disagreements += 1
    fields["instances"] = len(instances)
    fields["failures"] = failures
    fields["disagreements"] = disagreements
    fields["ok"] = failures == 0 and disagreements == 0
    fields["time_total"] = f"{time.perf_counter() - t0:.6f}"
    sys.stdout.write(render_report(fields, args.human))
    return EXIT_YES if fields["ok"] else EXIT_NO


def build_parser() -> _Parser:
    parser = _Parser(prog="hyperpack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("decide-pm", parents=[], help="perfect-matching pipeline")
    sp.add_argument("file", help=".khg host file")
    _add_config_flags(sp, with_l=True)
    sp.set_defaults(fn=cmd_decide_pm)

    sp = sub.add_parser("decide-pack", help="perfect-packing pipeline")
    sp.add_argument("file")
    sp.add_argument("--pattern", required=True, help="e.g. P3, K3, Kkpartite:1,1,2")
    _add_config_flags(sp, with_l=False)
    sp.set_defaults(fn=cmd_decide_pack)

    sp = sub.add_parser("partition", help="closed-partition construction")
    sp.add_argument("file")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--c-cap", type=int, required=True, dest="c_cap")
    sp.add_argument("--delta-prime", required=True, dest="delta_prime")
    sp.add_argument("--alpha", default=None)
    sp.add_argument("--mode", choices=[EXACT_ROBUST, DENSITY], default=None)
    sp.add_argument("--reach-count", type=int, default=None)
    sp.add_argument("--beta", default=None)
    sp.add_argument("--cascade", default=None)
    sp.add_argument("--cap", type=int, default=None)
    sp.add_argument("-o", "--output", default=None)
    sp.add_argument("--human", action="store_true")
    sp.set_defaults(fn=cmd_partition)

    sp = sub.add_parser("lattice", help="index-vector lattice and coset group")
    sp.add_argument("file")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--partition", required=True, help="partition file (one class per line)")
    sp.add_argument("--mode", choices=[EXACT_ROBUST, DENSITY], default=None)
    sp.add_argument("--reach-count", type=int, default=None)
    sp.add_argument("--mu", default=None)
    sp.add_argument("--human", action="store_true")
    sp.set_defaults(fn=cmd_lattice)

    sp = sub.add_parser("oracle", help="exact packing-existence baseline")
    sp.add_argument("file")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--oracle-cap", type=int, default=None)
    sp.add_argument("--human", action="store_true")
    sp.set_defaults(fn=cmd_oracle)

    sp = sub.add_parser("gen", help="instance generators")
    sp.add_argument(
        "family",
        choices=[
            "div-barrier",
            "space-barrier",
            "lin-uplift",
            "edge-blowup",
            "degree-pad",
            "random",
        ],
    )
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--a", type=int, default=None)
    sp.add_argument("--core", type=int, default=None)
    sp.add_argument("--p", type=float, default=None, help="edge probability")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--floor", type=int, default=None, help="min_l_degree floor")
    sp.add_argument("--floor-l", type=int, default=None, dest="floor_l")
    sp.add_argument("--gamma", default=None)
    sp.add_argument("--pattern", default=None)
    sp.add_argument("--in", dest="infile", default=None, help="input .khg for reductions")
    sp.add_argument("-o", "--output", default=None)
    sp.add_argument("--human", action="store_true")
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("corpus", help="run a manifest of instances")
    sp.add_argument("manifest")
    sp.add_argument("--human", action="store_true")
    sp.set_defaults(fn=cmd_corpus)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        # Downstream closed early (e.g. `| head`); keep the shutdown flush
        # from tracebacking too.
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 1
    except CliInputError as e:
        print(f"hyperpack: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (KhgFormatError, PatternError, CapExceededError) as e:
        print(f"hyperpack: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"hyperpack: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
