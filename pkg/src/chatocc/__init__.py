"""Affect-space geometry, appraisal rules, prompt pipelines, and replayable experiments."""

from .affect import (
    DistanceMatrix,
    Octant,
    Scale,
    Sign,
    VadTriple,
    distance_matrix,
    euclidean_distance,
    octant_of,
    octant_signature,
    parse_signature,
    rank_of,
    rescale,
)
from .metrics import (
    CorrelationResult,
    MatchResult,
    MatchTally,
    correlate,
    match_score,
    p_value,
    pearson,
    rmse,
    tally_matches,
)
from .experiments import (
    EngineBackend,
    ExperimentReport,
    canonical_json,
    expert_mapping,
    paper_replay_backend,
    paper_replay_fixture,
    run_rq1,
    run_rq2_generate,
    run_rq2_latent,
    run_rq2_numeric,
    run_rq3,
    write_run_dir,
)
from .llm import (
    Backend,
    HttpBackend,
    MockBackend,
    RecordingBackend,
    ReplayBackend,
    ReplayFixture,
    open_session,
)
from .occ import (
    AppraisalFrame,
    Anticipation,
    EmotionLabel,
    EmotionPrediction,
    Ordinal,
    appraise,
    explain,
    intensity,
    rule_set,
)
from .stimuli import (
    Dataset,
    PredictionRecord,
    Stimulus,
    fixtures,
    load_dataset_csv,
    reliability_score,
    select_most_reliable,
)

__version__ = "0.1.0"

__all__ = [
    "Anticipation",
    "AppraisalFrame",
    "Backend",
    "CorrelationResult",
    "Dataset",
    "DistanceMatrix",
    "EmotionLabel",
    "EmotionPrediction",
    "EngineBackend",
    "ExperimentReport",
    "HttpBackend",
    "MatchResult",
    "MatchTally",
    "MockBackend",
    "Octant",
    "Ordinal",
    "PredictionRecord",
    "RecordingBackend",
    "ReplayBackend",
    "ReplayFixture",
    "Scale",
    "Sign",
    "Stimulus",
    "VadTriple",
    "appraise",
    "canonical_json",
    "correlate",
    "distance_matrix",
    "euclidean_distance",
    "expert_mapping",
    "explain",
    "fixtures",
    "intensity",
    "load_dataset_csv",
    "match_score",
    "octant_of",
    "octant_signature",
    "open_session",
    "p_value",
    "paper_replay_backend",
    "paper_replay_fixture",
    "parse_signature",
    "pearson",
    "rank_of",
    "reliability_score",
    "rescale",
    "rmse",
    "rule_set",
    "run_rq1",
    "run_rq2_generate",
    "run_rq2_latent",
    "run_rq2_numeric",
    "run_rq3",
    "select_most_reliable",
    "tally_matches",
    "write_run_dir",
]
