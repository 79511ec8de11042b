"""Finding the most self-similar clusters of polygons without scoring them all."""

from .cluster import Cluster
from .geometry import (
    DegenerateGeometryError,
    InvalidGeometryError,
    Mbr,
    Point2,
    Polygon,
    center_at_origin,
    intersection_area,
    resample_boundary,
    translate,
)
from .metrics import (
    EQUAL_WEIGHTS,
    MetricWeights,
    PairSimilarity,
    combined_similarity,
    pair_similarity,
    similarity_index,
)
from .pipeline import (
    PipelineConfig,
    RunReport,
    ScaleGuardError,
    SimilarityCalculator,
    brute_force_oracle,
    find_clusters,
    ingest,
    report,
    run,
)
from .synthetic import GeneratorSpec, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "Cluster",
    "DegenerateGeometryError",
    "EQUAL_WEIGHTS",
    "GeneratorSpec",
    "InvalidGeometryError",
    "Mbr",
    "MetricWeights",
    "PairSimilarity",
    "PipelineConfig",
    "Point2",
    "Polygon",
    "RunReport",
    "ScaleGuardError",
    "SimilarityCalculator",
    "brute_force_oracle",
    "center_at_origin",
    "combined_similarity",
    "find_clusters",
    "generate_synthetic",
    "ingest",
    "intersection_area",
    "report",
    "resample_boundary",
    "run",
    "pair_similarity",
    "similarity_index",
    "translate",
]
