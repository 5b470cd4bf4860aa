"""gwpair: global-workspace cognitive agents for social pairing simulation.

Five competing cognitive modules (emotion, memory, planning, social norms,
goal tracking) share a broadcast workspace; agents built on that loop run
batched speed-date conversations, evolve their preferences, and report
evolution metrics. An adaptive scenario assessment initializes agents from
real humans.
"""

from .agent import (
    AgentState,
    CognitiveConfig,
    check_convergence,
    integrate_outputs,
    process_turn,
    update_preferences,
)
from .assessment import (
    AssessmentConfig,
    AssessmentSession,
    Scenario,
    TraitEstimateState,
    analyze,
    apply_update,
    finalize,
    jsonl_event_sink,
    load_scenario_pool,
    next_scenario,
)
from .conflict import ConflictConfig, detect_conflicts, pair_conflict, resolve_conflict
from .config import RunConfig, default_simulation_script
from .ingest import ParticipantRecord, export_csv, infer_profile, parse_csv
from .memory import MemoryItem, MemoryStore, effective_k
from .metrics import (
    SnapshotRow,
    SnapshotTable,
    build_report,
    match_accuracy,
    pearson,
    percent_change,
    self_other_gap,
)
from .modules import build_module_prompt, run_cognitive_module
from .providers import (
    GenerationRequest,
    ReplayProvider,
    RemoteProvider,
    ScriptEntry,
    ScriptedProvider,
    extract_json_payload,
)
from .salience import SalienceConfig, compute_salience, personality_weights, softmax
from .simulator import (
    EvaluationScores,
    MatchMatrix,
    SessionContext,
    SessionRecord,
    build_context,
    build_match_matrix,
    decide,
    evaluate_compatibility,
    event_to_json,
    generate_pairs,
    heterosexual,
    run_event,
    run_session,
)
from .types import (
    ATTRIBUTES,
    MODULE_ORDER,
    ConflictMatrix,
    DatingAttributes,
    ModuleResponse,
    PersonalityProfile,
    SalienceVector,
)
from .workspace import CycleTrace, GlobalWorkspace, export_traces

__version__ = "0.1.0"
