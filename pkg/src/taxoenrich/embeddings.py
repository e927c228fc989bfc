"""Static word embeddings: text-format loading, vectorization and exact k-NN.

The vector file is the usual text format: a header line ``<count> <dim>``
followed by ``<token> <f1> ... <fdim>`` lines, single-space separated.
Nearest-neighbor search is brute force over unit-normalized vectors, so
results are exact and reproducible; ties are broken lexicographically.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import numpy as np

from .taxonomy import Synset
from .textnorm import normalize, subtokens

log = logging.getLogger(__name__)


class EmbeddingFormatError(ValueError):
    """Raised for malformed vector files."""


class EmbeddingStore:
    """Immutable token -> vector map with a unit-normalized search view.

    Zero-norm vectors are kept in ``vectors`` but excluded from neighbor
    search. Search rows are sorted lexicographically by token so that a
    stable sort on similarity yields the deterministic tie-break.
    """

    def __init__(self, dim: int, vectors: dict[str, np.ndarray]):
        if dim <= 0:
            raise EmbeddingFormatError(f"dimension must be positive, got {dim}")
        self.dim = dim
        self.vectors: dict[str, np.ndarray] = {}
        for token, vec in vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dim,):
                raise EmbeddingFormatError(
                    f"token {token!r}: expected {dim} values, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise EmbeddingFormatError(f"token {token!r}: non-finite vector entries")
            self.vectors[token] = arr
        searchable = sorted(t for t, v in self.vectors.items() if np.linalg.norm(v) > 0.0)
        self._search_tokens: list[str] = searchable
        if searchable:
            matrix = np.stack([self.vectors[t] for t in searchable])
            self._search_matrix = matrix / np.linalg.norm(matrix, axis=1, keepdims=True)
        else:
            self._search_matrix = np.zeros((0, dim))

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def load_embeddings(path: str | Path, limit: Optional[int] = None) -> EmbeddingStore:
    """Load a text-format vector file; at most ``limit`` tokens, in file order."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingFormatError(f"{path}:1: expected '<count> <dim>' header")
        try:
            _, dim = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingFormatError(f"{path}:1: non-numeric header") from None
        if dim <= 0:
            raise EmbeddingFormatError(f"{path}:1: dimension must be positive")
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            if limit is not None and len(vectors) >= limit:
                break
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: expected {dim} values, got {len(parts) - 1}")
            token = normalize(parts[0])
            try:
                values = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                raise EmbeddingFormatError(f"{path}:{lineno}: non-numeric vector entry") from None
            if token in vectors:
                log.warning("%s:%d: duplicate token %r, keeping first occurrence",
                            path, lineno, token)
                continue
            vectors[token] = values
    if not vectors:
        raise EmbeddingFormatError(f"{path}: no vectors loaded")
    return EmbeddingStore(dim, vectors)


def word_vector(store: EmbeddingStore, word: str) -> Optional[np.ndarray]:
    """Vector for a word, with a subtoken-mean fallback for multiword input.

    Lookup order: exact normalized token, then the mean of the vectors of the
    known subtokens (split on underscore/hyphen), then None.
    """
    token = normalize(word)
    vec = store.vectors.get(token)
    if vec is not None:
        return vec
    parts = subtokens(token)
    if len(parts) > 1:
        known = [store.vectors[p] for p in parts if p in store.vectors]
        if known:
            return np.mean(known, axis=0)
    return None


def synset_vector(store: EmbeddingStore, syn: Synset) -> Optional[np.ndarray]:
    """Mean of the resolvable lemma vectors of a synset; None if none resolve."""
    resolved = [v for v in (word_vector(store, lemma) for lemma in syn.lemmas)
                if v is not None]
    if not resolved:
        return None
    return np.mean(resolved, axis=0)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; 0.0 if either vector has zero norm."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def nearest_neighbors(store: EmbeddingStore, query: np.ndarray, k: int,
                      exclude: set[str] = frozenset()) -> list[tuple[str, float]]:
    """Top-k vocabulary tokens by cosine to ``query``, descending.

    Excluded tokens and zero-norm vectors never appear. Ties are broken by
    lexicographic token order. Returns fewer than k if the vocabulary is small.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (store.dim,):
        raise ValueError(f"query dimension {query.shape} != store dim {store.dim}")
    excluded = {normalize(t) for t in exclude}
    qnorm = np.linalg.norm(query)
    if qnorm == 0.0 or not store._search_tokens:
        sims = np.zeros(len(store._search_tokens))
    else:
        sims = store._search_matrix @ (query / qnorm)
    # stable sort over lexicographically sorted rows => deterministic tie-break
    order = np.argsort(-sims, kind="stable")
    results: list[tuple[str, float]] = []
    for idx in order:
        token = store._search_tokens[idx]
        if token in excluded:
            continue
        results.append((token, float(sims[idx])))
        if len(results) == k:
            break
    return results
