"""Narrated camera-tour synthesis for hierarchical 3D structural models.

The pipeline has two halves: foraging compiles a story graph for a model
from local texts and remote encyclopedia extracts; synthesis turns that
graph into a renderer-agnostic timeline of camera, visibility, label, and
narration directives, either self-guided or following an input script.
"""

from .model import (
    Instance,
    Sphere,
    StructuralModel,
    StructureType,
    group_bounding_sphere,
    parse_model,
    serialize_model,
)
from .story import (
    Description,
    EdgeKind,
    RelationshipEdge,
    SourceKind,
    StoryGraph,
    TypeNode,
    deserialize_graph,
    serialize_graph,
)
from .foraging import (
    KeywordIndex,
    build_skeleton,
    detect_keywords,
    forage,
    forage_descriptions,
    forage_functional_edges,
    split_sentences,
)
from .sources import (
    DiskCache,
    FetchResult,
    LocalProvider,
    RemoteConfig,
    RemoteProvider,
    local_lookup,
    remote_fetch,
)
from .traversal import NarratoryTraversal, TraversalConfig
from .camera import (
    CameraKeyframe,
    CameraTarget,
    OrbitParams,
    curved_transition_keyframes,
    direct_fly_keyframes,
    focus_target,
    orbit_keyframes,
    overview_viewpoint,
)
from .cutting import (
    CuttingPlane,
    VisibilityDirective,
    focus_cut,
    is_culled,
    overview_cut,
    plane_interpolation,
)
from .commentary import (
    TemplateContext,
    TemplateSet,
    descriptive_commentary,
    estimate_duration,
    expand_template,
    navigational_commentary,
    structural_commentary,
)
from .timeline import (
    Scene,
    SceneKind,
    SynthesisConfig,
    Timeline,
    TransitionKind,
    generate_from_text,
    generate_self_guided,
    make_focus_scene,
    make_overview_scene,
    make_transition_scene,
)
from .documents import (
    narration_script,
    narration_ssml,
    timeline_from_json,
    timeline_to_json,
)

__version__ = "0.1.0"
