"""Community detection across social networks via overlapping users.

Stub communities are found on the hybrid multiplex network of overlapping
users by a joint NMF, then grown inside each full network over a
similarity graph reconstructed from follow relations.
"""

__version__ = "0.1.0"

from .baselines import (  # noqa: F401
    FusedNetwork,
    col_nmf,
    concat_nmf,
    kmeans_baseline,
    multi_nmf,
)
from .evaluate import (  # noqa: F401
    EvaluationReport,
    PipelineConfig,
    discovery_ratio,
    nmi,
    run_pipeline,
    text_similarity,
)
from .extend import (  # noqa: F401
    ExtensionResult,
    RecPolicy,
    StubCommunitySet,
    cl_strength,
    connection_strength,
    extend,
    merge,
)
from .kestimate import ModularityReport, estimate_k, louvain  # noqa: F401
from .model import (  # noqa: F401
    CommunityAssignment,
    MultiplexNetwork,
    SingleNetwork,
    UserIndex,
    harden,
)
from .reconstruct import SimilarityGraph, jaccard, reconstruct  # noqa: F401
from .solver import (  # noqa: F401
    FactorSet,
    SolveTrace,
    SolverConfig,
    objective,
    row_normalizer,
    solve,
    update_step,
)
from .synth import GroundTruth, SynthSpec, generate, hide_overlap  # noqa: F401
