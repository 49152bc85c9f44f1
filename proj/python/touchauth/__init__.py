"""Touch-stroke continuous authentication toolkit (python face of the C++ core)."""

try:
    from ._touchauth import (  # packaged layout (module installed into the package)
        __version__,
        bypass_probability,
        compute_rates,
        extract_features,
        feature_names,
        mutual_information,
        select_threshold_eer,
        synth_corpus_summary,
        window_count,
    )
except ImportError:  # in-tree runs: the module sits on PYTHONPATH next to the build dir
    from _touchauth import (
        __version__,
        bypass_probability,
        compute_rates,
        extract_features,
        feature_names,
        mutual_information,
        select_threshold_eer,
        synth_corpus_summary,
        window_count,
    )

__all__ = [
    "__version__",
    "bypass_probability",
    "compute_rates",
    "extract_features",
    "feature_names",
    "mutual_information",
    "select_threshold_eer",
    "synth_corpus_summary",
    "window_count",
]
