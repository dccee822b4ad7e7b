"""Meta-model types, module file I/O, linking and validation."""

from .io import dumps_module, model_digest, load_module, load_modules, module_from_dict, module_to_dict
from .link import link
from .types import (
    Entity,
    EvaluationSpec,
    Factor,
    Impact,
    Instrument,
    Measure,
    MeasureBinding,
    QmModule,
    QualityModel,
    UtilityFunction,
    WeightSpec,
    derived_key,
)
from .validate import Finding, validate

__all__ = [
    "Entity", "EvaluationSpec", "Factor", "Finding", "Impact", "Instrument", "Measure",
    "MeasureBinding", "QmModule", "QualityModel", "UtilityFunction", "WeightSpec",
    "derived_key", "dumps_module", "model_digest", "link", "load_module", "load_modules",
    "module_from_dict", "module_to_dict", "validate",
]
