"""Generation experiments on Graph Words: sampling, latent operations and metrics."""

from .latent import hybridize, interpolate, mixup
from .metrics import GenerationMetrics, fingerprint, int_div, metrics, tanimoto
from .sampling import WordBank, consistency_report, decode_words, fewshot_sample, permutation_consistency

__all__ = [
    "GenerationMetrics",
    "WordBank",
    "consistency_report",
    "decode_words",
    "fewshot_sample",
    "fingerprint",
    "hybridize",
    "int_div",
    "interpolate",
    "metrics",
    "mixup",
    "permutation_consistency",
    "tanimoto",
]
