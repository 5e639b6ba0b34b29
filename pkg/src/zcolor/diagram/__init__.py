"""Link diagrams and coloring-aware Reidemeister moves."""

from .model import (
    Crossing,
    Diagram,
    DiagramError,
    DiagramSyntaxError,
    DiagramValidityError,
    components,
    crossing_graph_components,
    diagram_components,
    diagram_from_json,
    diagram_to_json,
    dump_diagram,
    faces_of,
    from_pd,
    infer_signs,
    linking_graph_connected,
    linking_matrix,
    parse_diagram,
    validate_diagram,
)
from .moves import (
    MOVE_KINDS,
    MoveError,
    Workspace,
    bigon_pairs,
    r1_add,
    r1_remove,
    r2_pull,
    r2_push_over,
    r2_push_under,
    r3_slide,
    triangle_sites,
)
from .canonical import canonical_form

__all__ = [name for name in dir() if not name.startswith("_")]
