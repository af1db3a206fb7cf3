"""Shape features of binary mask volumes."""

from ._core import (
    ShapeError,
    __version__,
    diameters,
    extract_features,
    features_json,
    load_npy,
    marching_cubes,
    resolve_backend,
    run_pipeline,
    save_npy,
    synth_mask,
)

__all__ = [
    "ShapeError",
    "diameters",
    "extract_features",
    "features_json",
    "load_npy",
    "marching_cubes",
    "resolve_backend",
    "run_pipeline",
    "save_npy",
    "synth_mask",
]
