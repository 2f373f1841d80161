"""Signature-based similarity scores between image distributions."""

__version__ = "0.1.0"

from .tensor_algebra import (  # noqa: E402
    ContractError,
    TruncatedTensor,
    tensor_exp,
    tensor_log,
    tensor_mul,
    unit,
    zero,
)
from .signature import (  # noqa: E402
    Stream,
    brute_force_signature,
    flatten,
    sig_dim,
    stream_log_signature,
    stream_signature,
    unflatten,
)
from .metrics import MeanSignature, ScoreReport, mean_signature, mean_signatures, score  # noqa: E402
from .stats import StatReport, interpret, kruskal_wallis, levene, normality, run_pipeline  # noqa: E402
from .embed import Embedding, kmeans, pca2, pca_adaptive, pca_adaptive_tsne, tsne  # noqa: E402
from .ingest import image_to_stream, load_directory, resize, to_grayscale  # noqa: E402
