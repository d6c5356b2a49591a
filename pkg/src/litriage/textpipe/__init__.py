"""Bag-of-words text pipeline and the naive Bayes baseline classifier."""

from . import lovins
from .naive_bayes import (
    NBModel,
    cross_val_predict_nb,
    load_nb_model,
    nb_predict,
    nb_predict_citation,
    nb_train,
    save_nb_model,
    train_nb,
)
from .pipeline import (
    FIELD_CHOICES,
    PipelineConfig,
    VectorizeResult,
    Vocabulary,
    build_vocabulary,
    citation_tokens,
    count_vector,
    default_stopwords,
    get_stemmer,
    load_stopwords,
    register_stemmer,
    remove_stopwords,
    tokenize,
    vectorize_tfidf,
)

__all__ = [
    "lovins",
    "FIELD_CHOICES",
    "PipelineConfig",
    "VectorizeResult",
    "Vocabulary",
    "build_vocabulary",
    "citation_tokens",
    "count_vector",
    "default_stopwords",
    "get_stemmer",
    "load_stopwords",
    "register_stemmer",
    "remove_stopwords",
    "tokenize",
    "vectorize_tfidf",
    "NBModel",
    "nb_train",
    "nb_predict",
    "train_nb",
    "nb_predict_citation",
    "cross_val_predict_nb",
    "save_nb_model",
    "load_nb_model",
]
