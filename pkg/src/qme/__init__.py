"""Quality-model based software quality assessment.

Typical use::

    from qme import load_model, assess, MeasurementDataset

    model = load_model(["model/"])
    result = assess(model, MeasurementDataset("my-system", raw={"core/loc": 12000.0}))
    print(result.root_grade)
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

__version__ = "0.1.0"

from .adaptation import AdaptationGoal, AdaptationPlan, AdaptationTask, HistoryEntry, adapt, generate_tasks, pretailor
from .calibration import (
    BenchmarkCorpus,
    CalibrationStats,
    Thresholds,
    calibrate_model,
    calibrate_thresholds,
    calibration_stats,
    read_corpus,
)
from .engine.assess import Assessor, assess
from .engine.grades import GradeResult, grade, interpret
from .engine.normalise import MeasurementDataset, normalise
from .engine.result import AssessmentResult
from .engine.utility import UtilityInterval, aggregate, utility
from .engine.weights import roc_weights, weights_from_ranking
from .errors import QmeError
from .ingestion import ingest_findings, ingest_metrics, merge, read_findings, read_metrics
from .model import QualityModel, link, load_modules, validate
from .reporting import render_html, to_kiviat, to_sunburst


def load_model(paths: Iterable[str | Path], *, strict: bool = True) -> QualityModel:
    """Load module files (or directories of them) and link them into one model."""
    modules, _ = load_modules(paths, strict=strict)
    return link(modules)


__all__ = [
    "AdaptationGoal", "AdaptationPlan", "AdaptationTask", "AssessmentResult", "Assessor",
    "BenchmarkCorpus", "CalibrationStats", "GradeResult", "HistoryEntry", "MeasurementDataset",
    "QmeError", "QualityModel", "Thresholds", "UtilityInterval", "adapt", "aggregate", "assess",
    "calibrate_model", "calibrate_thresholds", "calibration_stats", "generate_tasks", "grade",
    "ingest_findings", "ingest_metrics", "interpret", "link", "load_model", "load_modules", "merge",
    "normalise", "pretailor", "read_corpus", "read_findings", "read_metrics", "render_html",
    "roc_weights", "to_kiviat", "to_sunburst", "utility", "validate", "weights_from_ranking",
]
