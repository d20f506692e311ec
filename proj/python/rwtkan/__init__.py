"""Python access to the rwt models, attributions and equation bank.

Arrays are float64 and in normalized feature space. Library errors raise
RwtError with args (code, message).
"""

from ._core import (
    Model,
    RwtError,
    __version__,
    bank_equation,
    bank_evaluate,
    bank_keys,
    canonical_expression,
    evaluate_expression,
    fit_boosted,
    fit_forest,
    fit_kan,
    load_model,
    metrics,
    model_from_json,
    run_cli,
    shap_exact,
    snap_kan,
)

__all__ = [
    "Model",
    "RwtError",
    "__version__",
    "bank_equation",
    "bank_evaluate",
    "bank_keys",
    "canonical_expression",
    "evaluate_expression",
    "fit_boosted",
    "fit_forest",
    "fit_kan",
    "load_model",
    "metrics",
    "model_from_json",
    "run_cli",
    "shap_exact",
    "snap_kan",
]
