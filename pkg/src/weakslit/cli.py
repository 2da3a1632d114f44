"""Command-line entry point.

    weakslit run --scenario NAME [--config PATH] [--set key=value ...]
                 [--out DIR] [--seed N]
    weakslit list
    weakslit check --scenario NAME [--config PATH] [--set key=value ...]

Exit codes: 0 all checks passed, 2 physics checks failed, 1 usage/IO error.
The WEAKSLIT_OUT environment variable sets the default output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .scenarios import list_scenarios, parse_config, run_scenario


def _parse_set(pairs):
    overrides = {}
    for item in pairs or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            overrides[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            overrides[key.strip()] = raw
    return overrides


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="weakslit",
        description="Weak values, weak trajectories and Bohmian dynamics in a "
                    "one-dimensional two-wavepacket setup")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--scenario", default="", help="scenario name (see list)")
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--set", dest="overrides", action="append", metavar="K=V",
                       help="override a config key (repeatable)")
        p.add_argument("--seed", type=int, default=None, help="RNG seed")

    run_p = sub.add_parser("run", help="run a scenario and write its artifacts")
    add_common(run_p)
    run_p.add_argument("--out", default=None, help="output directory "
                       "(default: $WEAKSLIT_OUT/<scenario> or runs/<scenario>)")

    sub.add_parser("list", help="list scenarios")

    check_p = sub.add_parser("check", help="run only the invariant checks")
    add_common(check_p)
    return parser


def _resolve(args, write_files):
    overrides = _parse_set(args.overrides)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if write_files:
        if args.out is not None:
            overrides["out_dir"] = args.out
        elif "out_dir" not in overrides:
            base = os.environ.get("WEAKSLIT_OUT")
            if base:
                overrides["out_dir"] = os.path.join(
                    base, args.scenario or overrides.get("scenario", ""))
    return parse_config(args.config, scenario=args.scenario,
                        cli_overrides=overrides)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        for name, desc in list_scenarios().items():
            print(f"{name:8s}  {desc}")
        return 0
    try:
        cfg = _resolve(args, write_files=args.command == "run")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    manifest = run_scenario(cfg, write_files=args.command == "run")
    for check in manifest.checks:
        status = "pass" if check.passed else "FAIL"
        print(f"[{status}] {manifest.scenario}/{check.name}: {check.detail}")
    if args.command == "run":
        out = cfg.out_dir or os.path.join("runs", cfg.scenario)
        print(f"artifacts in {out} ({len(manifest.files)} files, "
              f"{manifest.wall_clock_s:.1f} s)")
    return 0 if manifest.all_passed else 2


if __name__ == "__main__":
    sys.exit(main())
