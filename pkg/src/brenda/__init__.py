"""brenda: end-to-end claim checking.

Check-worthy claim detection, web evidence retrieval with cosine snippet
filtering, a hierarchical aspect-guided attention classifier for claim
credibility, and a REST service tying the pipeline together for a
browser-extension client.
"""

from .textproc import (
    ASPECT_KINDS,
    Claim,
    EmbeddingTable,
    Sentence,
    Vocabulary,
    build_vocabulary,
    embed,
    load_embeddings,
    segment_sentences,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "ASPECT_KINDS",
    "Claim",
    "EmbeddingTable",
    "Sentence",
    "Vocabulary",
    "build_vocabulary",
    "embed",
    "load_embeddings",
    "segment_sentences",
    "tokenize",
    "__version__",
]
