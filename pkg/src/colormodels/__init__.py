"""Vertex and edge colouring models, their partition functions and edge reflection positivity."""

__version__ = "0.1.0"

from .errors import ModelError, NumericalError
from .graph_core import Fragment, Multigraph, canonical_key, enumerate_fragments, glue
from .models import (
    EdgeModelEval,
    EdgeModelTable,
    VertexModel,
    eval_edge,
    eval_vertex,
    twin_reduce,
)
from .szegedy import vertex_to_edge
from .erp import erp_decide_complex, erp_decide_real
