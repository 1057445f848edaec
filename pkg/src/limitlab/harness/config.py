"""Line-oriented ``key = value`` episode configuration files.

Recognized keys::

    machine = identity.tm        # or: fst = parity.fst
    channel = ioo                # ioo | tbo | pto
    scale = 1                    # tbo: steps <= scale * bound
    slack = 0                    # tbo: random extra added to each bound
    source = explicit:a,aa,aaa   # or: length:<max>[:<min>]
    ordering = round_robin       # round_robin | shuffle | script:0,2,1
    learner = enum               # enum | rational | msm
    mode = consistent            # consistent | poly
    bound = linear
    overhead = identity
    horizon = 500
    budget = 1000
    verify_depth = 3
    verify_budget = 100000
    seed = 0
    id = identity-ioo

Paths are relative to the configuration file.  ``#`` starts a comment.
"""

from __future__ import annotations

from pathlib import Path

from limitlab.harness.episode import ConfigError, EpisodeConfig
from limitlab.machines import ParseError, parse_tm
from limitlab.observations import (
    ROUND_ROBIN,
    SCRIPT,
    SHUFFLE,
    Channel,
    ExplicitSource,
    LengthBounded,
    Ordering,
)
from limitlab.transducers import parse_fst

KEYS = {"machine", "fst", "channel", "scale", "slack", "source", "ordering", "learner", "mode",
        "bound", "overhead", "horizon", "budget", "verify_depth", "verify_budget", "seed", "id"}
INT_KEYS = ("scale", "slack", "horizon", "budget", "verify_depth", "verify_budget", "seed")


def read_pairs(text: str) -> dict:
    out = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {no}: expected 'key = value'")
        if key not in KEYS:
            raise ConfigError(f"line {no}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {no}: duplicate key {key!r}")
        out[key] = value
    return out


def parse_source(spec: str, sigma):
    kind, _, arg = spec.partition(":")
    if kind == "explicit":
        items = [s.strip() for s in arg.split(",")] if arg else []
        items = ["" if s in ("ε", "eps") else s for s in items]
        for s in items:
            if any(c not in sigma for c in s):
                raise ConfigError(f"source input {s!r} uses symbols outside {sigma}")
        if not items:
            raise ConfigError("explicit source is empty")
        return ExplicitSource(items)
    if kind == "length":
        parts = arg.split(":")
        try:
            hi = int(parts[0])
            lo = int(parts[1]) if len(parts) > 1 else 1
        except ValueError:
            raise ConfigError(f"bad length source {spec!r}") from None
        return LengthBounded(sigma, hi, lo)
    raise ConfigError(f"unknown source {spec!r}; use explicit:... or length:...")


def parse_ordering(spec: str, source, seed: int) -> Ordering:
    kind, _, arg = spec.partition(":")
    if kind == ROUND_ROBIN:
        return Ordering(source, ROUND_ROBIN, seed)
    if kind == SHUFFLE:
        return Ordering(source, SHUFFLE, int(arg) if arg else seed)
    if kind == SCRIPT:
        try:
            script = tuple(int(i) for i in arg.replace("-", ",").split(",") if i)
        except ValueError:
            raise ConfigError(f"bad script {arg!r}") from None
        return Ordering(source, SCRIPT, seed, script)
    raise ConfigError(f"unknown ordering {spec!r}")


def load_config(text: str, base: Path = Path(".")) -> EpisodeConfig:
    kv = read_pairs(text)
    ints = {}
    for k in INT_KEYS:
        if k in kv:
            try:
                ints[k] = int(kv[k])
            except ValueError:
                raise ConfigError(f"{k} must be an integer, got {kv[k]!r}") from None
    if ("machine" in kv) == ("fst" in kv):
        raise ConfigError("give exactly one of 'machine' or 'fst'")
    try:
        if "machine" in kv:
            truth = parse_tm((base / kv["machine"]).read_text())
            sigma = truth.sigma
        else:
            truth = parse_fst((base / kv["fst"]).read_text(), total=True)
            sigma = tuple(truth.inputs)
    except OSError as exc:
        raise ConfigError(f"cannot read ground truth: {exc}") from exc
    except ParseError as exc:
        raise ConfigError(f"ground truth: {exc}") from exc
    seed = ints.get("seed", 0)
    try:
        channel = Channel(kv.get("channel", "ioo"), ints.get("scale", 1), ints.get("slack", 0), seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if "source" not in kv:
        raise ConfigError("missing 'source'")
    source = parse_source(kv["source"], sigma)
    ordering = parse_ordering(kv.get("ordering", ROUND_ROBIN), source, seed)
    cfg = EpisodeConfig(
        ground_truth=truth,
        source=source,
        ordering=ordering,
        channel=channel,
        learner=kv.get("learner", "enum"),
        mode=kv.get("mode", "consistent"),
        bound=kv.get("bound", "linear"),
        overhead=kv.get("overhead", "identity"),
        horizon=ints.get("horizon", 100),
        budget=ints.get("budget", 1000),
        verify_depth=ints.get("verify_depth", max((len(x) for x in source.up_to(8)), default=0)),
        verify_budget=ints.get("verify_budget", 100_000),
        seed=seed,
        config_id=kv.get("id", "episode"),
    )
    cfg.validate()
    return cfg


def load_config_file(path) -> EpisodeConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return load_config(text, path.parent)
