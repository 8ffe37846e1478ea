"""``stable-clt-lab`` command line.

Exit codes: 0 pass, 1 validation error, 2 numeric failure, 3 acceptance gap.
"""
import argparse
import json
import os
import sys
import time

from threadpoolctl import threadpool_limits

from . import experiments
from .config import COMMANDS, RunConfig
from .errors import DomainError, NumericError, ValidationError
from .reporting import write_csv, write_manifest

ENV_THREADS = "STABLE_CLT_LAB_THREADS"


def build_parser():
    p = argparse.ArgumentParser(prog="stable-clt-lab",
                                description="Robust alpha-stable CLT: DP scheme, PIDE, oracle, Monte Carlo.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", metavar="PATH", help="INI-style run configuration")
        s.add_argument("--out", metavar="DIR", default="out", help="output directory (default: out)")
        s.add_argument("--threads", metavar="N", type=int, default=None,
                       help=f"worker cap (fallback: ${ENV_THREADS}, then 1)")
        s.add_argument("--seed", metavar="U64", type=int, default=None)
    return p


def _threads(arg):
    if arg is not None:
        return arg
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"{ENV_THREADS}={env!r} is not an integer") from None
    return None


def resolve_config(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    cfg.set("run", "command", args.command)
    if args.seed is not None:
        cfg.set("run", "seed", args.seed)
    t = _threads(args.threads)
    if t is not None:
        cfg.set("run", "threads", t)
    return cfg.validate()


def dispatch(cfg):
    c, th = cfg.command, cfg.threads
    if c == "clt-dp":
        return experiments.cmd_clt_dp(cfg)
    if c == "pide":
        return experiments.cmd_pide(cfg)
    if c == "mc":
        return experiments.cmd_mc(cfg, th)
    if c == "oracle":
        return experiments.cmd_oracle(cfg)
    if c == "verify":
        return experiments.verify(cfg)
    return experiments.compare(cfg, th)


def main(argv=None):
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = resolve_config(args)
        with threadpool_limits(cfg.threads):
            summary, tables, code = dispatch(cfg)
    except (ValidationError, DomainError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc} {getattr(exc, 'diagnostics', {})}", file=sys.stderr)
        return 2
    outputs = [write_csv(os.path.join(args.out, name), head, rows) for name, (head, rows) in tables.items()]
    write_manifest(args.out, cfg, summary, [os.path.basename(o) for o in outputs], started)
    print(json.dumps({"command": cfg.command, "exit": code,
                      "summary_file": os.path.join(args.out, "manifest.json")}))
    return code


if __name__ == "__main__":
    sys.exit(main())
