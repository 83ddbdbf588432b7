"""Entity embedding store: textual word-vector loading, lookups, cosine.

Multi-word entities are bridged to single-token embedding keys by
normalization: lowercase, internal whitespace collapsed to underscores.
"United States of America" and "united_states_of_america" name the same
vector.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatchError,
    DuplicateKeyError,
    MalformedLineError,
    ZeroVectorError,
)


def normalize_key(raw: str) -> str:
    """Lowercase and collapse whitespace runs to single underscores.

    Idempotent: normalize(normalize(x)) == normalize(x).
    """
    return "_".join(raw.lower().split())


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity sum(a_i b_i) / (||a|| ||b||), in [-1, 1].

    Raises ZeroVectorError when either norm is zero: the quotient is
    undefined there and a silent 0 would mask data problems.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"vector lengths differ: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError("cosine undefined for zero-norm vector")
    return float(np.dot(a, b) / (na * nb))


class EmbeddingStore:
    """Immutable map from normalized entity key to a fixed-dimension vector.

    Safe for concurrent reads once constructed; loading is single-threaded.
    """

    def __init__(self, dim: int, entries: dict[str, np.ndarray]):
        if dim <= 0:
            raise DimensionMismatchError(f"dimension must be positive, got {dim}")
        for key, vec in entries.items():
            if vec.shape != (dim,):
                raise DimensionMismatchError(
                    f"vector for {key!r} has length {vec.shape[0]}, expected {dim}"
                )
        self.dim = dim
        self._entries = entries

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return normalize_key(key) in self._entries

    def lookup(self, key: str) -> np.ndarray | None:
        """Vector for the normalized key, or None if unknown."""
        return self._entries.get(normalize_key(key))

    def similarity(self, key_a: str, key_b: str) -> float:
        """Cosine between two stored entries; KeyError if either is absent."""
        va = self.lookup(key_a)
        vb = self.lookup(key_b)
        if va is None:
            raise KeyError(key_a)
        if vb is None:
            raise KeyError(key_b)
        return cosine(va, vb)


def load_embeddings(path, expected_dim: int | None = None) -> EmbeddingStore:
    """Load a textual word-vector file.

    Format: header line "<count> <dim>", then one "<key> <v1> ... <v_dim>"
    per line, space-separated. Keys contain no spaces. Duplicate keys are
    an error rather than last-wins so that runs stay reproducible.
    """
    entries: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip():
            raise MalformedLineError(path, 1, "missing header line '<count> <dim>'")
        parts = header.split()
        if len(parts) != 2:
            raise MalformedLineError(
                path, 1, f"header must be '<count> <dim>', got {header.strip()!r}"
            )
        try:
            count, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLineError(
                path, 1, f"header must hold two integers, got {header.strip()!r}"
            ) from None
        if dim <= 0:
            raise MalformedLineError(path, 1, f"dimension must be positive, got {dim}")
        if expected_dim is not None and dim != expected_dim:
            raise DimensionMismatchError(
                f"{path}: file declares dimension {dim}, expected {expected_dim}"
            )

        for line_no, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            tokens = line.split()
            if len(tokens) != dim + 1:
                raise MalformedLineError(
                    path,
                    line_no,
                    f"expected 1 key + {dim} values, got {len(tokens)} tokens",
                )
            key = normalize_key(tokens[0])
            if key in entries:
                raise DuplicateKeyError(key, path)
            try:
                vec = np.array([float(t) for t in tokens[1:]], dtype=float)
            except ValueError:
                raise MalformedLineError(path, line_no, "non-numeric vector component") from None
            entries[key] = vec

    if len(entries) != count:
        raise MalformedLineError(
            path, 1, f"header declares {count} entries, file holds {len(entries)}"
        )
    return EmbeddingStore(dim, entries)
