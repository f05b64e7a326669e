"""Low-regret cutting-plane learners for contextual recommendation.

The library plays a repeated separation game over a shrinking knowledge
polytope: learners (inscribed-ellipsoid center, dilated centroid, random
point of the discretized centroid path) propose query points, oracles answer
with valid halfspace directions, and regret is the accumulated separation
margin. On top of the core game sit three contextual recommendation
variants (single action, list, local feedback), a packing-based lower-bound
instance, Monte Carlo property checks for the geometric lemmas the learners
rely on, and a deterministic experiment harness with a CLI.
"""

from .contextual import (
    ACTION_GENERATORS,
    ActionSet,
    FEEDBACK_POLICIES,
    LowerBoundInstance,
    Recommendation,
    best_response,
    fixed_catalog_actions,
    greedy_packing,
    make_lowerbound_instance,
    run_contextual_game,
    run_list_game,
    run_local_game,
    run_lowerbound_game,
    step_list,
    step_local,
    step_reduction,
    uniform_sphere_actions,
    vertex_cloud_actions,
)
from .cutting_plane import (
    LEARNERS,
    CuttingPlaneState,
    CentroidLearner,
    CurvatureRandomLearner,
    DoublingHorizonLearner,
    JohnCenterLearner,
    SteinerCentroidLearner,
    default_pieces,
    make_learner,
    propose_curvature_random,
    propose_john_center,
    propose_steiner_centroid,
    run_cutting_plane_game,
    update_knowledge,
)
from .errors import (
    ConfigError,
    CutplaneError,
    DimensionTooLarge,
    EmptyKnowledge,
    InvalidOracle,
    LPInfeasible,
    LPUnbounded,
    MissingHorizon,
    NonConvergence,
    PackingTooSmall,
)
from .geometry import (
    Ellipsoid,
    Polytope,
    centroid_dilated,
    discretize_curvature_path,
    john_ellipsoid,
    member_dilated,
    project,
    random_polytope,
    sample_dilated,
    support_point,
    volume_dilated,
    width,
)
from .harness import (
    ExperimentConfig,
    RegretTrace,
    emit_plot,
    run_experiment,
    run_sweep,
    summarize,
)
from .oracles import (
    ORACLES,
    MaxRegretOracle,
    MinCutOracle,
    WeakOracle,
    make_oracle,
    max_regret_direction,
    min_cut_direction,
    weak_response,
)
from .rng import RngStream

__version__ = "0.1.0"
