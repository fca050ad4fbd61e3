from chatcorpus.text.pipeline import (
    STOPWORDS,
    SparseVector,
    TfidfIndex,
    build_index,
    cosine,
    load_stopwords,
    normalized,
    split_words,
    tokenize,
    vectorize,
)
from chatcorpus.text.stemmer import stem

__all__ = [
    "STOPWORDS", "SparseVector", "TfidfIndex", "build_index", "cosine",
    "load_stopwords", "normalized", "split_words", "stem", "tokenize", "vectorize",
]
