"""Unified command line: convert, validate, stats, agreement, select-head,
extract, eval, report, serve.

Every subcommand takes ``--config FILE`` pointing at a simple ``key = value``
text file whose entries act as flag defaults (explicit flags win).  Output
artifacts embed the toolkit version, a hash of the effective run options, and
the seed, so any randomized run can be reproduced from its own output.

Exit codes: 0 success, 1 failures (including label-constraint violations,
which are listed one per line), 2 usage errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .agreement import summarize
from .baselines import PART_PHRASE, RANDOM_PHRASE
from .brat import load_brat_dir
from .constraints import check_dataset
from .augment import augment_dataset
from .evaluate import EvalConfig, evaluate_dataset, plot_csv, summary_csv
from .explain import extract_explanation, load_explanations, save_explanations
from .heads import (
    METHOD_CLASSIFIER_WEIGHT,
    METHOD_SCALAR_MIX,
    ScalarMixHyper,
    load_scalar_mix,
    save_scalar_mix,
    scalar_mix_head,
    select_head,
)
from .io import load_json, store_json
from .oracle.client import resolve_oracle
from .oracle.mock import mock_oracle
from .oracle.server import make_http_server, serve_jsonl
from .stats import summarize_dataset
from .types import Level, Part, SpanexError

_BASELINE_FLAGS = {"random": RANDOM_PHRASE, "part": PART_PHRASE}


class UsageError(SpanexError):
    pass


# Options that name files rather than configure the run: two invocations that
# differ only in where they read or write are the same run, and must stamp the
# same hash into their artifacts.
_PATH_OPTIONS = frozenset(
    {"func", "config", "input", "out", "csv", "plot_csv",
     "explanations", "scalar_mix_model", "save_model"}
)


@dataclass(frozen=True)
class RunConfig:
    """The effective options of one invocation, for stamping into artifacts."""

    subcommand: str
    options: dict

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, "options": self.options}

    def hash(self) -> str:
        import hashlib

        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    @staticmethod
    def from_args(args: argparse.Namespace) -> "RunConfig":
        def jsonable(v):
            if isinstance(v, (str, int, float, bool, type(None))):
                return v
            if isinstance(v, (tuple, list)):
                return [jsonable(x) for x in v]
            if hasattr(v, "value"):  # enums
                return v.value
            return None

        options = {
            k: jsonable(v)
            for k, v in sorted(vars(args).items())
            if k not in _PATH_OPTIONS
        }
        return RunConfig(subcommand=args.subcommand, options=options)


def _stamp(args: argparse.Namespace) -> dict:
    out = {"toolkit_version": __version__, "config_hash": RunConfig.from_args(args).hash()}
    if hasattr(args, "seed"):
        out["seed"] = args.seed
    return out


# --- small shared helpers ----------------------------------------------------

def _parse_levels(text: str) -> tuple[Level, ...]:
    out = []
    for piece in text.split(","):
        piece = piece.strip().lower()
        if piece not in ("low", "high"):
            raise argparse.ArgumentTypeError(f"level must be low or high, got {piece!r}")
        out.append(Level(piece))
    return tuple(out)


def _parse_topk(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad top-k list {text!r}") from exc
    if not values or any(k < 1 for k in values):
        raise argparse.ArgumentTypeError(f"top-k values must be >= 1, got {text!r}")
    return values


def _parse_baselines(text: str) -> tuple[str, ...]:
    out = []
    for piece in text.split(","):
        piece = piece.strip().lower()
        if not piece:
            continue
        if piece not in _BASELINE_FLAGS:
            raise argparse.ArgumentTypeError(
                f"baseline must be one of {sorted(_BASELINE_FLAGS)}, got {piece!r}"
            )
        out.append(_BASELINE_FLAGS[piece])
    return tuple(out)


def _parse_part(text: str) -> Part:
    if text.lower() not in ("p1", "p2"):
        raise argparse.ArgumentTypeError(f"part must be p1 or p2, got {text!r}")
    return Part(text.lower())


def _load_dataset(path: str) -> "Dataset":
    try:
        return load_json(path)
    except FileNotFoundError as exc:
        raise UsageError(f"cannot read dataset {path!r}: {exc}") from exc


def _write_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_csv(rows: list[list], path: str | None) -> None:
    if path is None or path == "-":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerows(rows)
        return
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


# --- subcommands -------------------------------------------------------------

def _cmd_convert(args: argparse.Namespace) -> int:
    if args.source_format == "brat":
        dataset = load_brat_dir(args.input)
    else:
        dataset = _load_dataset(args.input)
    if args.augment:
        dataset = augment_dataset(dataset)
    store_json(dataset, args.out)
    print(f"wrote {len(dataset.instances)} instances to {args.out}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.input)
    violations = check_dataset(dataset, augment_first=not args.no_augment)
    for v in violations:
        print(f"{v.instance_id}/{v.annotator}: {v.rule}: {v.message}")
    if violations:
        print(f"{len(violations)} violation(s)")
        return 1
    print("OK")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.input)
    if args.augment:
        dataset = augment_dataset(dataset)
    result = summarize_dataset(dataset)
    _write_json({**result.to_dict(), **_stamp(args)}, args.out)
    if args.csv:
        _write_csv(result.to_csv_rows(), args.csv)
    return 0


def _cmd_agreement(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.input)
    report = summarize(dataset)
    obj = report.to_dict()
    if args.mode or args.level:
        obj["cells"] = [
            c
            for c in obj["cells"]
            if (args.mode is None or c["mode"] == args.mode)
            and (args.level is None or c["level"] == args.level)
        ]
    _write_json({**obj, **_stamp(args)}, args.out)
    if args.csv:
        rows = report.to_csv_rows()
        if args.mode or args.level:
            rows = [rows[0]] + [
                r
                for r in rows[1:]
                if (args.mode is None or r[0] == args.mode)
                and (args.level is None or r[1] == args.level)
            ]
        _write_csv(rows, args.csv)
    return 0


def _cmd_select_head(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.input)
    oracle = resolve_oracle(args.oracle)
    if args.method == METHOD_SCALAR_MIX:
        hyper = ScalarMixHyper(seed=args.seed)
        model = scalar_mix_head(oracle, dataset, hyper)
        if args.save_model:
            save_scalar_mix(model, hyper, args.save_model)
        _write_json(
            {
                "method": args.method,
                "head": model.head,
                "mix_weights": [float(w) for w in model.mix_weights],
                "final_loss": model.final_loss,
                **_stamp(args),
            },
            args.out,
        )
        return 0
    heads = {inst.id: select_head(oracle, inst, method=args.method) for inst in dataset}
    _write_json({"method": args.method, "heads": heads, **_stamp(args)}, args.out)
    return 0


def _cmd_extract(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.input)
    oracle = resolve_oracle(args.oracle)
    scalar_mix = None
    mix_origin = None
    if args.method == METHOD_SCALAR_MIX:
        if args.scalar_mix_model:
            scalar_mix, _ = load_scalar_mix(args.scalar_mix_model)
            mix_origin = args.scalar_mix_model
        else:
            scalar_mix = scalar_mix_head(oracle, dataset, ScalarMixHyper(seed=args.seed))
            mix_origin = "trained-in-run"
    explanations = [
        extract_explanation(
            inst,
            oracle,
            method=args.method,
            seed=args.seed,
            threshold=args.threshold,
            scalar_mix=scalar_mix,
        )
        for inst in dataset
    ]
    metadata = {
        "dataset": dataset.name.value,
        "method": args.method,
        "threshold": args.threshold,
        **_stamp(args),
    }
    if mix_origin is not None:
        metadata["scalar_mix_model"] = mix_origin
    save_explanations(explanations, args.out, **metadata)
    print(f"wrote {len(explanations)} explanations to {args.out}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.input)
    oracle = resolve_oracle(args.oracle)
    explanations = None
    if args.explanations:
        _, explanations = load_explanations(args.explanations)
    config = EvalConfig(
        topk=args.topk,
        baselines=args.baselines,
        seed=args.seed,
        unit=args.unit,
        levels=args.levels,
        agreement_split=args.agreement_split,
        part_phrase_fixed=args.part_phrase_fixed,
        jobs=args.jobs,
    )
    report = evaluate_dataset(dataset, explanations, oracle, config)
    _write_json(report.to_dict(toolkit_version=__version__), args.out)
    if args.csv:
        _write_csv(report.summary_csv_rows(), args.csv)
    if args.plot_csv:
        _write_csv(report.plot_csv_rows(), args.plot_csv)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    try:
        obj = json.loads(Path(args.input).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"cannot read report {args.input!r}: {exc}") from exc
    dataset = obj.get("dataset", "")
    aggregates = obj.get("aggregates", [])
    if args.csv:
        _write_csv(summary_csv(dataset, aggregates), args.csv)
    if args.plot_csv:
        _write_csv(plot_csv(dataset, aggregates), args.plot_csv)
    if not args.csv and not args.plot_csv:
        _write_csv(summary_csv(dataset, aggregates), None)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    oracle = mock_oracle()
    if args.stdio:
        serve_jsonl(oracle, sys.stdin, sys.stdout)
        return 0
    server = make_http_server(oracle, host=args.host, port=args.port)
    host, port = server.server_address[:2]
    print(f"serving mock oracle on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


# --- parser ------------------------------------------------------------------

def _add_oracle(sp: argparse.ArgumentParser) -> None:
    sp.add_argument(
        "--oracle",
        default=None,
        help="oracle endpoint: 'mock', an http(s) URL, or 'jsonl:CMD' "
        "(default: $SPANEX_ORACLE_URL)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spanex", description="Span-interaction explanation toolkit"
    )
    parser.add_argument("--version", action="version", version=f"spanex {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("convert", help="import brat or canonical JSON, write canonical JSON")
    sp.add_argument("input", help="brat directory or dataset JSON file")
    sp.add_argument("--from", dest="source_format", choices=("brat", "json"), required=True)
    sp.add_argument("--to", dest="target_format", choices=("json",), default="json")
    sp.add_argument("--out", required=True)
    sp.add_argument("--augment", action="store_true", help="add SynonymSys and dangler spans")
    sp.set_defaults(func=_cmd_convert)

    sp = sub.add_parser("validate", help="check label constraints, exit 1 on violations")
    sp.add_argument("input")
    sp.add_argument(
        "--no-augment", action="store_true", help="validate raw annotations without augmentation"
    )
    sp.set_defaults(func=_cmd_validate)

    sp = sub.add_parser("stats", help="per-type counts and span lengths")
    sp.add_argument("input")
    sp.add_argument("--out", default=None, help="JSON output (default stdout)")
    sp.add_argument("--csv", default=None)
    sp.add_argument("--augment", action="store_true")
    sp.set_defaults(func=_cmd_stats)

    sp = sub.add_parser("agreement", help="match groups and Fleiss' kappa")
    sp.add_argument("input")
    sp.add_argument("--mode", choices=("exact", "relaxed"), default=None)
    sp.add_argument("--level", choices=("low", "high"), default=None)
    sp.add_argument("--out", default=None, help="JSON output (default stdout)")
    sp.add_argument("--csv", default=None)
    sp.set_defaults(func=_cmd_agreement)

    sp = sub.add_parser("select-head", help="pick the interaction head per instance or model")
    sp.add_argument("input")
    _add_oracle(sp)
    sp.add_argument(
        "--method",
        choices=(METHOD_CLASSIFIER_WEIGHT, METHOD_SCALAR_MIX),
        default=METHOD_CLASSIFIER_WEIGHT,
    )
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="JSON output (default stdout)")
    sp.add_argument("--save-model", default=None, help="persist the trained scalar-mix model")
    sp.set_defaults(func=_cmd_select_head)

    sp = sub.add_parser("extract", help="extract ranked span-pair explanations")
    sp.add_argument("input")
    _add_oracle(sp)
    sp.add_argument(
        "--method",
        choices=(METHOD_CLASSIFIER_WEIGHT, METHOD_SCALAR_MIX),
        default=METHOD_CLASSIFIER_WEIGHT,
    )
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threshold", type=float, default=0.0, help="attention edge cutoff")
    sp.add_argument("--scalar-mix-model", default=None, help="trained model JSON for scalar-mix")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_extract)

    sp = sub.add_parser("eval", help="faithfulness evaluation report")
    sp.add_argument("input")
    _add_oracle(sp)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--explanations", default=None, help="explanations JSON from extract")
    group.add_argument(
        "--annotations", action="store_true", help="evaluate the human annotations instead"
    )
    sp.add_argument("--topk", type=_parse_topk, default=(1, 3, 5), help="e.g. 1,3,5")
    sp.add_argument(
        "--baselines", type=_parse_baselines, default=(), help="comma list of random,part"
    )
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--unit", choices=("union", "pair"), default="union")
    sp.add_argument("--levels", type=_parse_levels, default=(Level.LOW, Level.HIGH))
    sp.add_argument("--agreement-split", action="store_true")
    sp.add_argument("--part-phrase-fixed", type=_parse_part, default=Part.P1)
    sp.add_argument("--jobs", type=int, default=1, help="oracle-call threads; 0 = all cores")
    sp.add_argument("--out", required=True)
    sp.add_argument("--csv", default=None)
    sp.add_argument("--plot-csv", default=None)
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("report", help="render CSVs from a saved eval report")
    sp.add_argument("input")
    sp.add_argument("--csv", default=None)
    sp.add_argument("--plot-csv", default=None)
    sp.set_defaults(func=_cmd_report)

    sp = sub.add_parser("serve", help="run the built-in mock oracle")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8414)
    sp.add_argument("--stdio", action="store_true", help="JSONL over stdin/stdout")
    sp.set_defaults(func=_cmd_serve)

    for action in sub.choices.values():
        action.add_argument("--config", default=None, help="key = value defaults file")
    parser.spanex_subcommands = dict(sub.choices)  # for --config default injection
    return parser


def _load_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except FileNotFoundError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    out: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Resolve --config into subparser defaults; returns argv unchanged."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        raise UsageError("--config needs a file path")
    values = _load_config_file(argv[at + 1])
    known = set()
    for sp in parser.spanex_subcommands.values():
        converted = {}
        for action in sp._actions:  # the one sanctioned peek inside argparse
            known.add(action.dest)
            if action.dest in values:
                raw = values[action.dest]
                try:
                    if action.const is True:  # store_true flag
                        converted[action.dest] = raw.lower() in ("1", "true", "yes", "on")
                    elif action.type is not None:
                        converted[action.dest] = action.type(raw)
                    else:
                        converted[action.dest] = raw
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise UsageError(f"config key {action.dest!r}: {exc}") from exc
        sp.set_defaults(**converted)
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return argv


def run(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        argv = _apply_config(parser, list(argv))
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 2
    if getattr(args, "jobs", None) == 0:
        import os

        args.jobs = os.cpu_count() or 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SpanexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
