from .memory import Memory, acquire_knowledge, acquire_with_source
from .qrm import (
    EpisodeRecord,
    EvalRecord,
    LearnParams,
    PhaseMetrics,
    QRMBatch,
    lifelong_update,
    prepare_targets,
    qrm_step,
    run_qrm,
    select_action,
)
from .qtable import PRESETS, CompositionMapping, QTable, compose

__all__ = [
    "PRESETS",
    "CompositionMapping",
    "EpisodeRecord",
    "EvalRecord",
    "LearnParams",
    "Memory",
    "PhaseMetrics",
    "QRMBatch",
    "QTable",
    "acquire_knowledge",
    "acquire_with_source",
    "compose",
    "lifelong_update",
    "prepare_targets",
    "qrm_step",
    "run_qrm",
    "select_action",
]
