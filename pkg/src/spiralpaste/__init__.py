"""Constructive bilipschitz embeddings into sums of sup-norm blocks."""

from .counterexample import (
    CounterexampleConfig,
    RayFamily,
    SeparationWitness,
    ball_point_count,
    build_family,
    grouping_spec,
    in_carrier,
    linf_distance,
    min_projection_level,
    profile_proportionality,
    ray_block_vectors,
    ray_point,
    separation_epsilon,
    separation_witness,
    to_metric_space,
    verify_metric_ray,
    verify_separation_epsilon,
)
from .errors import (
    CoverageViolated,
    DegenerateTriple,
    DimensionTooLarge,
    ModelInvalid,
    NetTooCoarse,
    NotARay,
    ScheduleOverflow,
    ScheduleTooShort,
    SchemaError,
    SpiralPasteError,
)
from .fdd import (
    EquivalenceReport,
    FddModel,
    NoCotypeReport,
    NormingSet,
    ambient_norm,
    embed_no_cotype,
    equivalence_ratio,
    norm_a,
    norming_functionals,
    pair_isometry_check,
    validate_model,
)
from .frechet import FrechetMap, frechet_embed
from .metric import (
    DistortionReport,
    PointedMetricSpace,
    ball,
    distortion,
    load_space,
    max_separated_subset,
    packing_bound,
    space_to_doc,
)
from .spaces import grid_space, line_space, tree_space
from .spiral import (
    BlockLayout,
    PastedEmbedding,
    RadiiSchedule,
    analytic_bound,
    blend,
    blend_theta,
    c_constant,
    needed_bands,
    paste,
    radii_schedule,
    seam_check,
    small_norm_ratio,
    spiral_distortion,
    spiral_point,
)
from .sumspace import (
    FLAT_NOT_PROPORTIONAL,
    FLAT_PROPORTIONAL,
    NOT_FLAT,
    SUP,
    BlockVector,
    SumSpaceSpec,
    block_profile,
    flat_triple_check,
    norm,
    project,
)

__version__ = "0.1.0"
