"""Stroke-driven 2D scene manipulation.

Draw a stroke; the engine matches it against implicit object contours and
authored squidget curves, then inverts the best match into scene attribute
updates: snapshot restores, interpolated blends, rigid transforms, or a
bounded scalar search.
"""

from .config import EngineConfig
from .errors import (
    DocumentError,
    GeometryError,
    GestureError,
    SceneError,
    SessionError,
    SolveError,
    SquidgetError,
)
from .geometry import (
    RigidTransform2,
    Similarity2,
    arc_length,
    best_fit_rigid,
    count_crossings,
    detect_corners,
    dist_min_reverse,
    pairwise_dist,
    project_to_polyline,
    resample,
    smooth,
)
from .matching import MatchResult, match_continuous, match_discrete, match_implicit, select
from .registry import (
    Canvas,
    ContinuousSquidget,
    DiscreteSquidget,
    ImplicitSquidget,
    SquidgetRegistry,
)
from .scene import (
    AttributeChange,
    Scene,
    SceneObject,
    ellipse,
    figure,
    group,
    parse_path,
    path_str,
    polygon,
    spotlight,
)
from .session import Session, SessionEvent, replay
from .solver import (
    AttributeUpdate,
    apply_continuous,
    apply_discrete,
    apply_implicit_transform,
    solve_scalar,
)

__version__ = "0.1.0"
