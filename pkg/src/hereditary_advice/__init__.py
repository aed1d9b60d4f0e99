"""Online maximum and minimum induced-subgraph problems with advice."""

from .errors import (
    AdviceLabError,
    DecodeError,
    InputError,
    MisconfiguredProperty,
    ParseError,
    ProtocolError,
    ResourceError,
    SoundnessError,
    VerificationError,
)
from .exact_advice import CoverResult, InstanceFamily, bits_vs_ratio_curve, group_feasible, min_advice_bits, verify_cover
from .graph_core import (
    CLIQUE,
    CONTAINS_CYCLE,
    CONTAINS_TRIANGLE,
    FOREST,
    INDEPENDENT_SET,
    PROPERTIES,
    TRIANGLE_FREE,
    Graph,
    IncrementalChecker,
    PropertySpec,
    RamseyCertificate,
    clique_or_independent,
    complement,
    contains_induced,
    get_property,
    induced_subgraph,
    opt_max_pi,
    opt_min_pi,
    ramsey_like_graph,
    satisfies,
    satisfies_incremental,
)
from .guessing_games import GuessingInstance, GuessReport, BoundReport, play_guessing
from .online_engine import (
    AdviceTape,
    Decision,
    OnlineInstance,
    OnlineSession,
    Transcript,
    compose_advice,
    competitive_ratio,
    decode_self_delimited,
    encode_self_delimited,
    run_game,
)

__version__ = "0.1.0"
