"""Privacy and confidentiality toolkit for process-mining event logs."""

from .analysis import (
    RiskReport,
    UtilityReport,
    data_utility,
    disclosure_risk,
    render_risk,
    render_utility,
)
from .connector import decode as decode_dfg
from .connector import encode as encode_dfg
from .dp import DpParams, dp_publish, dp_variant_counts, reconstruct_log
from .ela import parse_ela, write_ela
from .errors import Pc4pmError
from .group_privacy import BackgroundKnowledge, TlkcParams, enforce, find_violations
from .guidance import (
    GuideQuery,
    TechniqueSignature,
    filter_techniques,
    registry,
    runner_schema,
    runner_schemas,
)
from .jobs import JobRunner
from .model import (
    ACTIVITY_KEY,
    RESOURCE_KEY,
    TIMESTAMP_KEY,
    DirectlyFollowsGraph,
    Event,
    EventLog,
    EventLogAbstraction,
    OperationRecord,
    PrivacyMetadata,
    Trace,
    TypedValue,
)
from .ops import (
    Atom,
    KeySpec,
    Selector,
    Taxonomy,
    add_noise,
    condense,
    de_pseudonymize,
    generalize,
    pseudonymize,
    substitute,
    suppress,
    swap,
)
from .repo import Repository, RepoEntry
from .roles import (
    ResourceActivityMatrix,
    Role,
    RoleSet,
    build_matrix,
    mine_roles,
    perturb_matrix,
    privacy_aware_roles,
)
from .stats import df_graph, variants
from .xes import parse_xes, write_xes

__version__ = "0.1.0"

__all__ = [
    "ACTIVITY_KEY",
    "Atom",
    "BackgroundKnowledge",
    "DirectlyFollowsGraph",
    "DpParams",
    "Event",
    "EventLog",
    "EventLogAbstraction",
    "GuideQuery",
    "JobRunner",
    "KeySpec",
    "OperationRecord",
    "Pc4pmError",
    "PrivacyMetadata",
    "RESOURCE_KEY",
    "RepoEntry",
    "Repository",
    "ResourceActivityMatrix",
    "RiskReport",
    "Role",
    "RoleSet",
    "Selector",
    "TIMESTAMP_KEY",
    "Taxonomy",
    "TechniqueSignature",
    "TlkcParams",
    "Trace",
    "TypedValue",
    "UtilityReport",
    "add_noise",
    "build_matrix",
    "condense",
    "data_utility",
    "de_pseudonymize",
    "decode_dfg",
    "df_graph",
    "disclosure_risk",
    "dp_publish",
    "dp_variant_counts",
    "encode_dfg",
    "enforce",
    "filter_techniques",
    "find_violations",
    "generalize",
    "mine_roles",
    "parse_ela",
    "parse_xes",
    "perturb_matrix",
    "privacy_aware_roles",
    "pseudonymize",
    "reconstruct_log",
    "registry",
    "render_risk",
    "render_utility",
    "runner_schema",
    "runner_schemas",
    "substitute",
    "suppress",
    "swap",
    "variants",
    "write_ela",
    "write_xes",
]
