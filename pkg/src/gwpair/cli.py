"""Command-line surface: simulate, ingest, metrics, assess, serve.

Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .assessment import DONE, AssessmentSession, jsonl_event_sink
from .config import RunConfig
from .errors import ConfigError, ContractViolation, GwpairError, SchemaError
from .ingest import infer_profile, load_column_mapping, parse_csv
from .memory import MemoryStore
from .agent import AgentState
from .metrics import (
    build_report,
    report_to_csv,
    table_from_csv,
    table_from_event_json,
    write_report,
)
from .simulator import (
    build_context,
    event_csv_summary,
    event_to_json,
    run_event,
)
from .types import DatingAttributes
from .workspace import export_traces

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig(provider={"kind": "scripted", "seed": 0}, seed=0)
    return RunConfig.from_file(path)


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    provider = config.make_provider()
    records, rejections = parse_csv(args.participants, load_column_mapping(args.mapping))
    if rejections:
        for r in rejections:
            print(f"row {r.row}: {r.reason}", file=sys.stderr)
        return EXIT_VALIDATION
    agents = [
        AgentState(
            agent_id=r.participant_id,
            profile=infer_profile(r),
            attributes=DatingAttributes(dict(r.self_ratings), dict(r.importance_t1)),
            gender=r.gender,
            memory=MemoryStore(provider=provider),
        )
        for r in records
    ]
    ctx = build_context(config.context)
    result = run_event(
        agents,
        ctx,
        provider,
        config.cognitive_config(),
        batch_size=config.batch_size,
        threshold=config.threshold,
        workers=config.workers,
        full_final_round=config.full_final_round,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "results.json", "w", encoding="utf-8") as fh:
        json.dump(event_to_json(result), fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(out / "summary.csv", "w", encoding="utf-8") as fh:
        fh.write(event_csv_summary(result))
    export_traces(result.all_traces(), str(out / "traces.jsonl"))
    print(f"simulated {len(result.sessions)} sessions -> {out}")
    return EXIT_OK


def cmd_ingest(args) -> int:
    records, rejections = parse_csv(args.csv, load_column_mapping(args.mapping))
    print(f"parsed {len(records)} records, {len(rejections)} rejected")
    if args.report:
        for r in rejections:
            print(f"row {r.row}: {r.reason}")
    return EXIT_VALIDATION if rejections else EXIT_OK


def cmd_metrics(args) -> int:
    path = Path(args.results)
    if path.suffix == ".csv":
        table = table_from_csv(str(path))
    else:
        with open(path, "r", encoding="utf-8") as fh:
            table = table_from_event_json(json.load(fh))
    report = build_report(table)
    write_report(report, args.out)
    csv_path = Path(args.out).with_suffix(".csv")
    csv_path.write_text(report_to_csv(report), encoding="utf-8")
    print(f"report written to {args.out} (+ {csv_path.name})")
    return EXIT_OK


def cmd_assess(args) -> int:
    config = _load_config(args.config)
    sink = jsonl_event_sink(args.events_out) if args.events_out else None
    session = AssessmentSession(config.make_provider(), event_sink=sink)
    scenario = session.start()
    while True:
        print(f"\n{scenario.prompt}")
        for i, option in enumerate(scenario.options):
            print(f"  {i + 1}. {option}")
        try:
            raw = input("choice> ").strip()
            index = int(raw) - 1
            follow_up = scenario.follow_up(index) if scenario.follow_up_template else ""
            free_text = None
            if follow_up:
                print(follow_up)
                free_text = input("you> ").strip() or None
        except (ValueError, ContractViolation):
            print("enter the number of an option")
            continue
        except (EOFError, KeyboardInterrupt):
            print("\nassessment cancelled")
            return EXIT_RUNTIME
        advanced = session.submit(index, free_text)
        if advanced == DONE:
            break
        scenario = advanced
    profile, display = session.finalize()
    print("\nFinal profile:")
    for trait, cell in display.items():
        flag = " (low evidence)" if cell["flagged"] else ""
        print(f"  {trait}: {cell['value']} (confidence {cell['confidence']}){flag}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = _load_config(args.config)
    app = create_app(
        provider_factory=config.make_provider,
        runs_dir=args.runs_dir,
        ui_dir=args.ui_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gwpair")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a pairing event and export results")
    p.add_argument("--config", default=None)
    p.add_argument("--participants", required=True, help="participants CSV")
    p.add_argument("--mapping", default=None, help="column mapping JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest", help="validate a participants CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--mapping", default=None)
    p.add_argument("--report", action="store_true", help="print per-row rejection reasons")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("metrics", help="compute the evolution report")
    p.add_argument("--results", required=True, help="event export JSON or snapshot CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("assess", help="terminal personality assessment")
    p.add_argument("--config", default=None)
    p.add_argument("--interactive", action="store_true", default=True)
    p.add_argument("--events-out", default=None, help="append session events as JSON lines")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--config", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--runs-dir", default="runs")
    p.add_argument("--ui-dir", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaError, ContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GwpairError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
