from .mscn import SampleError, fit_aggd, fit_ggd, mscn
from .brisque import (
    FEATURE_DIM,
    ModelError,
    SvrModel,
    brisque_features,
    brisque_score,
    load_svr_model,
    scale_features,
)
from .niqe import (
    NiqeError,
    NiqeModel,
    fit_niqe,
    load_niqe_model,
    niqe_score,
    save_niqe_model,
)

__all__ = [
    "SampleError",
    "fit_aggd",
    "fit_ggd",
    "mscn",
    "FEATURE_DIM",
    "ModelError",
    "SvrModel",
    "brisque_features",
    "brisque_score",
    "load_svr_model",
    "scale_features",
    "NiqeError",
    "NiqeModel",
    "fit_niqe",
    "load_niqe_model",
    "niqe_score",
    "save_niqe_model",
]
