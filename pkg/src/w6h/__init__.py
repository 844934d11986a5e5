"""w6h-kit: the W6H enterprise architecture matrix as checkable structure."""
from .interrogatives import (
    DependencyRuleSet,
    Interrogative,
    canonical_order,
    is_answerable,
    next_questions,
    standard_rules,
    valid_orders,
    validate_rules,
    variant_rules,
)
from .model import (
    Artifact,
    BacklogPlan,
    Cell,
    CrudVerb,
    PerspectiveRow,
    SelectionLink,
    Snapshot,
    ViewSlice,
    Workspace,
    append_snapshot,
    populated,
    resolve,
)
from .dsl import ParseError, ParseErrors, export_interchange, parse, print_workspace
from .validator import Diagnostic, Profile, Severity, explain, validate
from .derivations import (
    CrudMatrix,
    ElicitationSession,
    answer,
    crud_findings,
    derive_crud,
    finish,
    start_session,
    validate_plan,
)
from .diff import ModelDelta, apply, diff, render_transition

__version__ = "0.1.0"
