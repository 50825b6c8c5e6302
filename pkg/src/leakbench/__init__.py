"""leakbench: measure what tuning on the test set buys a link predictor.

The toolkit splits a network's edges with a nested scheme so that a leaky
two-set protocol (tune on test) and a clean three-set protocol (tune on
validation) share one test set, runs parameterized predictors under both,
and reports the Loss Ratio: the fraction of the tuned-on-test AUC that
disappears once tuning is done properly.
"""

from .deepwalk import (
    Embeddings,
    WalkCorpus,
    dump_embeddings,
    generate_walks,
    score_embedding,
    train_skipgram,
)
from .errors import (
    ConfigError,
    EdgeListParseError,
    LeakbenchError,
    NumericalError,
    SamplingError,
    SplitError,
)
from .evaluation import (
    AUCResult,
    ProtocolResult,
    ScoreGrid,
    auc,
    dump_curve,
    loss_ratio,
    run_protocols,
    sweep,
    three_set_eval,
    two_set_eval,
)
from .graph import (
    Graph,
    GraphStats,
    common_neighbors,
    format_edge_list,
    parse_edge_list,
    stats,
)
from .harness import (
    Aggregates,
    DatasetSpec,
    ExperimentConfig,
    PredictorSpec,
    RunRecord,
    aggregate,
    emit_reports,
    load_config,
    read_records_csv,
    run_matrix,
    write_records_csv,
)
from .indices import (
    HyperGrid,
    PairScores,
    dump_scores,
    score_katz,
    score_lhn2,
    score_lp,
    score_lrw,
    score_rwr,
    score_srw,
    score_tsaa,
    score_tscn,
    spectral_radius,
)
from .predictors import PREDICTOR_NAMES, DeepWalkConfig, Predictor, get_predictor
from .split import (
    SplitBundle,
    export_split,
    nested_split,
    part_sizes,
    sample_nonexistent_pairs,
    training_graph,
)

__version__ = "0.1.0"
