"""irisbench: 1:N vs 1:First identification search benchmark over binary templates."""

from .calibration import Threshold, collect_impostor_scores, threshold_for_target
from .metrics import (
    MetricsReport,
    Outcome,
    aggregate_metrics,
    classify_outcome,
    permutation_spread,
)
from .runner import ExperimentConfig, load_config, report_from_artifacts, run_experiment
from .scenario import (
    Gallery,
    Probe,
    ProbeSet,
    build_closed_probeset,
    build_gallery,
    build_open_probeset,
    permute_gallery,
)
from .search import (
    Stage,
    Transaction,
    batch_transactions,
    count_rotations,
    search_one_to_first,
    search_one_to_n,
)
from .synth import (
    AugmentKind,
    IdentityMaster,
    Population,
    PopulationParams,
    augment_identity,
    gen_identity,
    gen_sample,
    generate_population,
)
from .templates import (
    Polarity,
    RotationPolicy,
    Score,
    Template,
    best_of_rotations,
    fractional_hamming,
    meets_threshold,
    read_irtb,
    rotate_template,
    write_irtb,
)

__version__ = "0.1.0"
