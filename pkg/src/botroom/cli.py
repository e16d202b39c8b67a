"""Command-line entry points.

    botroom run        --scenario demo.json [--seed N] [--mode scripted|live] [--port P] [--out DIR]
    botroom report     --log events.jsonl [--json | --text] [--claims claims.json]
    botroom transcript --log events.jsonl [--unblinded]
    botroom serve      --scenario demo.json --port P [--out DIR] [--ui-dir DIR]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import events as ev
from .claims import load_claims
from .harness import export_transcript, run_scenario, serve_forever
from .scenario import load_scenario
from .store import SocialStore
from .tracker import build_propagation_report, render_report_text, report_to_dict


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="botroom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario and write artifacts")
    run_p.add_argument("--scenario", type=Path, default=None, help="scenario file (default: bundled demo)")
    run_p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run_p.add_argument("--mode", choices=["scripted", "live"], default="scripted")
    run_p.add_argument("--port", type=int, default=8686, help="listen port (live mode)")
    run_p.add_argument("--out", type=Path, default=Path("runs/latest"))

    report_p = sub.add_parser("report", help="propagation and detection-feature report from a log")
    report_p.add_argument("--log", type=Path, required=True)
    report_fmt = report_p.add_mutually_exclusive_group()
    report_fmt.add_argument("--json", action="store_true", dest="as_json")
    report_fmt.add_argument("--text", action="store_true", dest="as_text")
    report_p.add_argument("--claims", type=Path, default=None, help="claim inventory (default: bundled)")

    transcript_p = sub.add_parser("transcript", help="human-readable transcript from a log")
    transcript_p.add_argument("--log", type=Path, required=True)
    transcript_p.add_argument("--unblinded", action="store_true", help="append account kinds")

    serve_p = sub.add_parser("serve", help="live mode: server plus bots, waits for humans")
    serve_p.add_argument("--scenario", type=Path, default=None)
    serve_p.add_argument("--port", type=int, required=True)
    serve_p.add_argument("--seed", type=int, default=None)
    serve_p.add_argument("--out", type=Path, default=Path("runs/live"))
    serve_p.add_argument("--ui-dir", type=Path, default=None, help="serve a built web client from this directory")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ev.CorruptLog, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "run":
        scenario = load_scenario(args.scenario)
        result = run_scenario(
            scenario, args.out, seed=args.seed, mode=args.mode, port=args.port
        )
        print(json.dumps(result.summary, indent=2))
        print(f"log:        {result.event_log_path}")
        print(f"transcript: {result.transcript_path}")
        print(f"report:     {result.report_path}")
        return 0

    if args.command == "report":
        log = ev.load_log(args.log.read_text())
        claims = load_claims(args.claims)
        report = build_propagation_report(log, claims)
        document = report_to_dict(report, SocialStore.replay(log), claims)
        if args.as_json:
            print(json.dumps(document, indent=2))
        else:
            print(render_report_text(document))
        return 0

    if args.command == "transcript":
        log = ev.load_log(args.log.read_text())
        sys.stdout.write(export_transcript(log, unblinded=args.unblinded))
        return 0

    if args.command == "serve":
        scenario = load_scenario(args.scenario)
        result = serve_forever(
            scenario, args.port, args.out, seed=args.seed, ui_dir=args.ui_dir
        )
        print(json.dumps(result.summary, indent=2))
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
