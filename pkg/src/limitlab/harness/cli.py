"""Command line entry point: ``limitlab <command> ...``."""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import replace
from pathlib import Path

from limitlab.constructions import (
    NotFoundWithinBounds,
    characteristic_set_search,
    double,
    halting_gadgets,
    remove_stay_moves,
)
from limitlab.harness.config import ConfigError, load_config_file, parse_source
from limitlab.harness.episode import run_episode
from limitlab.harness.report import write_csv, write_hashes
from limitlab.learners.enumeration import EnumConfig, EnumerationLearner, RunCache
from limitlab.machines import ParseError, parse_tm, run_bounded, serialize_tm
from limitlab.observations import CHANNELS, SCRIPT, Channel, Ordering
from limitlab.transducers import equivalent, minimize, parse_fst, serialize_fst

OK, CONFIG_ERROR, VERIFY_FAILED = 0, 1, 2


def _read_tm(path):
    try:
        return parse_tm(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except ParseError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _write(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    tm = _read_tm(args.machine)
    out = run_bounded(tm, args.input, args.budget, trace=args.trace)
    if args.trace and out.trace:
        for a in out.trace:
            print(f"{a.read} {a.write} {a.move}")
    if out.halted:
        shown = "<undefined>" if out.output is None else out.output
        print(f"halted steps={out.steps} output={shown}")
    else:
        why = " (never halts)" if out.diverged else ""
        print(f"out_of_budget budget={args.budget}{why}")
    return OK


def _summary(rep) -> str:
    conv = "none" if rep.converged_at is None else rep.converged_at
    return (f"{rep.config_id} ordering={rep.ordering} channel={rep.channel} "
            f"converged_at={conv} verified={rep.verdict} samples={rep.samples} "
            f"mass={rep.mass} hash={rep.final_hash}")


def cmd_learn(args) -> int:
    cfg = load_config_file(args.config)
    if args.horizon is not None:
        cfg = replace(cfg, horizon=args.horizon)
    rep = run_episode(cfg)
    if args.report:
        Path(args.report).write_text(rep.dumps())
    print(_summary(rep))
    if args.expect_converge and (rep.converged_at is None or not rep.verified):
        return VERIFY_FAILED
    return OK


def _orderings(spec: str, source, seed: int) -> list:
    if spec == "permutations":
        if not source.finite:
            raise ConfigError("permutation orderings need a finite source")
        n = len(list(source.members()))
        return [Ordering(source, SCRIPT, seed, p) for p in itertools.permutations(range(n))]
    from limitlab.harness.config import parse_ordering

    return [parse_ordering(s.strip(), source, seed) for s in spec.split(";") if s.strip()]


def cmd_sweep(args) -> int:
    base = load_config_file(args.config)
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else [base.seed]
    channels = args.channels.split(",") if args.channels else [base.channel.kind]
    for ch in channels:
        if ch not in CHANNELS:
            raise ConfigError(f"unknown channel {ch!r}")
    reports = []
    for seed in seeds:
        for ch in channels:
            channel = Channel(ch, base.channel.scale, base.channel.slack, seed)
            for ordering in _orderings(args.orderings, base.source, seed):
                cfg = replace(base, seed=seed, channel=channel, ordering=ordering)
                rep = run_episode(cfg)
                reports.append(rep)
                if not args.quiet:
                    print(_summary(rep))
    out = write_csv(reports, args.out)
    hashes = write_hashes(reports, args.out)
    print(f"wrote {out} and {hashes} ({len(reports)} episodes)")
    if args.figures:
        from limitlab.harness.plotting import render_all

        for p in render_all(reports, args.figures):
            print(f"wrote {p}")
    return OK


def cmd_charset(args) -> int:
    tm = _read_tm(args.machine)
    source = parse_source(args.source, tm.sigma)
    channel = Channel(args.channel)
    cache = RunCache(EnumConfig(tm.gamma, tm.sigma).enumeration())

    def learner(examples):
        return EnumerationLearner(EnumConfig(tm.gamma, tm.sigma), cache).learn(examples)

    res = characteristic_set_search(learner, tm, source, channel, args.max_size, args.depth,
                                    args.budget, samples=args.samples, seed=args.seed)
    if isinstance(res, NotFoundWithinBounds):
        print(json.dumps({"found": False, "max_subset_size": res.max_subset_size,
                          "subsets_tried": res.subsets_tried}))
    else:
        print(json.dumps({"found": True, **res.record()}, ensure_ascii=False))
    return OK


def cmd_gadget(args) -> int:
    tm = _read_tm(args.machine)
    if args.kind == "double":
        d = double(remove_stay_moves(tm))
        _write(serialize_tm(d.doubled), args.out)
        print(f"# m={d.m} states={d.doubled.n_states}", file=sys.stderr)
        return OK
    pair = halting_gadgets(tm, args.w)
    if not args.out:
        raise ConfigError("gadget yn needs --out DIR")
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    (d / "yes.tm").write_text(serialize_tm(pair.yes_machine))
    (d / "no.tm").write_text(serialize_tm(pair.no_machine))
    print(f"wrote {d / 'yes.tm'} and {d / 'no.tm'} "
          f"(states={pair.yes_machine.n_states} symbols={len(pair.yes_machine.gamma)})")
    return OK


def _read_fst(path):
    try:
        return parse_fst(Path(path).read_text(), total=True)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except (ParseError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def cmd_minimize(args) -> int:
    m = _read_fst(args.fst)
    if args.equiv:
        other = _read_fst(args.equiv)
        w = equivalent(m, other)
        print("equivalent" if w is None else "distinguished by " + " ".join(map(str, w)))
        return OK
    small, _ = minimize(m)
    _write(serialize_fst(small), args.out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="limitlab", description="Learning computable functions in the limit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a machine on one input")
    s.add_argument("machine")
    s.add_argument("input", nargs="?", default="")
    s.add_argument("--budget", type=int, default=10_000)
    s.add_argument("--trace", action="store_true", help="print one action tuple per line")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("learn", help="run one episode from a config file")
    s.add_argument("config")
    s.add_argument("--horizon", type=int)
    s.add_argument("--report", help="write per-step records here")
    s.add_argument("--expect-converge", action="store_true",
                   help="exit 2 unless the episode converges and verifies")
    s.set_defaults(func=cmd_learn)

    s = sub.add_parser("sweep", help="grid of episodes, CSV out")
    s.add_argument("config")
    s.add_argument("--orderings", default="round_robin",
                   help="'permutations' or ';'-separated orderings (round_robin;shuffle:3;script:0,2,1)")
    s.add_argument("--seeds")
    s.add_argument("--channels")
    s.add_argument("--out", required=True)
    s.add_argument("--figures", help="directory for PNG figures")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("charset", help="search for a characteristic set")
    s.add_argument("machine")
    s.add_argument("--source", required=True)
    s.add_argument("--channel", default="ioo", choices=CHANNELS)
    s.add_argument("--max-size", type=int, default=3)
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--budget", type=int, default=1000)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_charset)

    s = sub.add_parser("gadget", help="emit a doubled machine or a Y/N pair")
    s.add_argument("kind", choices=("double", "yn"))
    s.add_argument("machine")
    s.add_argument("--w", default="", help="subject input for yn")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_gadget)

    s = sub.add_parser("minimize", help="minimize a transducer or test equivalence")
    s.add_argument("fst")
    s.add_argument("--equiv", help="second transducer to compare against")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_minimize)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
