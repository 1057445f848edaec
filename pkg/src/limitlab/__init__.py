"""Learning computable functions in the limit: Turing machines, transducers,
observation channels and the learners that consume them."""

from limitlab.machines import (
    BLANK,
    ActionTuple,
    Enumeration,
    RunOutcome,
    TapeConfiguration,
    TuringMachine,
    parse_tm,
    run_bounded,
    serialize_tm,
    step,
    tape_behavior,
)
from limitlab.transducers import (
    PartialTransducer,
    Transducer,
    apart,
    equivalent,
    minimize,
    quotient,
    semantics,
    seq_map,
)

__version__ = "0.1.0"

__all__ = [
    "BLANK",
    "ActionTuple",
    "Enumeration",
    "RunOutcome",
    "TapeConfiguration",
    "TuringMachine",
    "parse_tm",
    "run_bounded",
    "serialize_tm",
    "step",
    "tape_behavior",
    "PartialTransducer",
    "Transducer",
    "apart",
    "equivalent",
    "minimize",
    "quotient",
    "semantics",
    "seq_map",
]
