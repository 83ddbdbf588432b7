"""The four per-triple features and standardized matrix assembly.

Features, in canonical column order:
  obj_entity_sim  cosine between entity and object embeddings
  ops             mean cosine between the object and the entity's page entities
  ops_rank        1-based position of the object when the whole object
                  universe is sorted by ops for that entity (1 = highest)
  object_mention  1.0 iff the object phrase occurs in the entity's page

Missing inputs never raise here: the affected feature becomes 0.0 and a
flag is recorded on the vector, so coverage gaps in embedding or corpus
files stay visible without killing a run.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .corpus import FULL_PAGE, Corpus, mentions
from .embeddings import EmbeddingStore, cosine, normalize_key
from .errors import (
    DuplicateKeyError,
    EmptyTrainingSetError,
    EmptyUniverseError,
    MalformedLineError,
    RelationMismatchError,
    ZeroVectorError,
)

FEATURE_NAMES = ("obj_entity_sim", "ops", "ops_rank", "object_mention")

# missing-data flags on FeatureVector
FLAG_ENTITY_EMBEDDING = "entity_embedding"
FLAG_OBJECT_EMBEDDING = "object_embedding"
FLAG_PAGE_RECORD = "page_record"
FLAG_OPS_TERMS = "ops_terms"

OPS_DENOM_EMBEDDED = "embedded"
OPS_DENOM_ALL = "all"


class Relation(str, Enum):
    PROFESSION = "profession"
    NATIONALITY = "nationality"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: str) -> "Relation":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(r.value for r in cls)
            raise ValueError(f"unknown relation {name!r}; expected one of: {valid}") from None


@dataclass(frozen=True)
class Triple:
    """(entity, relation, object) with an optional ground-truth score 0..7."""

    entity: str
    relation: Relation
    object: str
    truth: int | None = None

    def __post_init__(self):
        if self.truth is not None and not (0 <= self.truth <= 7):
            raise ValueError(f"truth score must be in [0, 7], got {self.truth}")

    @property
    def entity_key(self) -> str:
        return normalize_key(self.entity)

    @property
    def object_key(self) -> str:
        return normalize_key(self.object)


@dataclass(frozen=True)
class ObjectUniverse:
    """All objects of one relation, as sorted unique normalized keys."""

    relation: Relation
    objects: tuple[str, ...]

    @classmethod
    def from_names(cls, relation: Relation, names) -> "ObjectUniverse":
        seen = set()
        for name in names:
            key = normalize_key(name)
            if key in seen:
                raise DuplicateKeyError(key)
            seen.add(key)
        return cls(relation=relation, objects=tuple(sorted(seen)))


@dataclass(frozen=True)
class FeatureVector:
    obj_entity_sim: float
    ops: float
    ops_rank: float
    object_mention: float
    missing: frozenset[str] = frozenset()

    def values(self) -> tuple[float, float, float, float]:
        return (self.obj_entity_sim, self.ops, self.ops_rank, self.object_mention)


def object_entity_similarity(store: EmbeddingStore, entity: str, obj: str) -> float:
    """Cosine between the entity and object embeddings, 0.0 when unavailable."""
    value, _ = _similarity_with_flags(store, entity, obj)
    return value


def _similarity_with_flags(store, entity, obj):
    flags = set()
    ev = store.lookup(entity)
    ov = store.lookup(obj)
    if ev is None or not np.any(ev):
        flags.add(FLAG_ENTITY_EMBEDDING)
    if ov is None or not np.any(ov):
        flags.add(FLAG_OBJECT_EMBEDDING)
    if flags:
        return 0.0, flags
    return cosine(ev, ov), flags


def _ops_terms(store, record, obj):
    """Cosine terms between the object and each embedded page entity.

    Returns (terms in document order, total linked-entity count). Page
    entities without a usable embedding contribute no term; duplicates
    contribute one term per occurrence.
    """
    n_linked = len(record.linked_entities)
    obj_vec = store.lookup(obj)
    if obj_vec is None or not np.any(obj_vec):
        return [], n_linked
    terms = []
    for ent in record.linked_entities:
        vec = store.lookup(ent)
        if vec is None:
            continue
        try:
            terms.append(cosine(obj_vec, vec))
        except ZeroVectorError:
            continue
    return terms, n_linked


def ops(store: EmbeddingStore, corpus: Corpus, entity: str, obj: str,
        denominator: str = "embedded") -> float:
    """Average object-to-page-entity similarity; 0.0 when no term exists.

    denominator="embedded" divides by the number of contributing terms;
    "all" divides by the total linked-entity count, so unembeddable page
    entities drag the average toward zero.
    """
    if denominator not in (OPS_DENOM_EMBEDDED, OPS_DENOM_ALL):
        raise ValueError(
            f"denominator must be {OPS_DENOM_EMBEDDED!r} or {OPS_DENOM_ALL!r}, "
            f"got {denominator!r}"
        )
    record = corpus.get(entity)
    if record is None:
        return 0.0
    terms, n_linked = _ops_terms(store, record, obj)
    if not terms:
        return 0.0
    n = len(terms) if denominator == OPS_DENOM_EMBEDDED else n_linked
    return sum(terms) / n


def ops_rank(store: EmbeddingStore, corpus: Corpus, entity: str,
             universe: ObjectUniverse, denominator: str = "embedded") -> dict[str, int]:
    """1-based rank of every universe object by descending ops for the entity.

    Ties break on ascending object key so the ranking is a deterministic
    bijection onto 1..len(universe).
    """
    if not universe.objects:
        raise EmptyUniverseError("object universe is empty")
    scored = [(obj, ops(store, corpus, entity, obj, denominator)) for obj in universe.objects]
    order = sorted(scored, key=lambda pair: (-pair[1], pair[0]))
    return {obj: position for position, (obj, _) in enumerate(order, start=1)}


def object_mention_feature(corpus: Corpus, entity: str, obj: str) -> float:
    """1.0 iff the object phrase occurs anywhere in the entity's page."""
    record = corpus.get(entity)
    if record is None:
        return 0.0
    return 1.0 if mentions(record, obj, FULL_PAGE) else 0.0


class _EntityContext:
    """Per-entity memo shared by all of that entity's triples."""

    def __init__(self, store, corpus, universe, entity_key, denominator):
        self.record = corpus.get(entity_key)
        if self.record is None:
            self.n_page_terms = 0
        else:
            self.n_page_terms = sum(
                1
                for ent in self.record.linked_entities
                if (vec := store.lookup(ent)) is not None and np.any(vec)
            )
        self.ops_values = {
            obj: ops(store, corpus, entity_key, obj, denominator) for obj in universe.objects
        }
        order = sorted(self.ops_values.items(), key=lambda pair: (-pair[1], pair[0]))
        self.ranks = {obj: position for position, (obj, _) in enumerate(order, start=1)}

    def rank_of(self, obj_key, obj_ops):
        # Objects outside the universe take the position they would occupy
        # in the sorted list.
        if obj_key in self.ranks:
            return self.ranks[obj_key]
        ahead = sum(
            1
            for other, score in self.ops_values.items()
            if score > obj_ops or (score == obj_ops and other < obj_key)
        )
        return ahead + 1


def extract(store: EmbeddingStore, corpus: Corpus, universe: ObjectUniverse,
            triples: list[Triple], *, ops_denominator: str = "embedded",
            max_workers: int = 1) -> list[FeatureVector]:
    """Feature vectors for the triples, in input order.

    Ranking context is computed once per distinct entity and reused for
    all of that entity's triples. Results are independent of max_workers;
    workers only spread the per-entity context builds.
    """
    for t in triples:
        if t.relation != universe.relation:
            raise RelationMismatchError(
                f"triple relation {t.relation.value!r} does not match "
                f"universe relation {universe.relation.value!r}"
            )

    entity_keys = list(dict.fromkeys(t.entity_key for t in triples))

    def build(key):
        return _EntityContext(store, corpus, universe, key, ops_denominator)

    if max_workers > 1 and len(entity_keys) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            contexts = dict(zip(entity_keys, pool.map(build, entity_keys)))
    else:
        contexts = {key: build(key) for key in entity_keys}

    out = []
    for t in triples:
        ekey, okey = t.entity_key, t.object_key
        ctx = contexts[ekey]
        flags = set()

        sim, sim_flags = _similarity_with_flags(store, ekey, okey)
        flags |= sim_flags

        if ctx.record is None:
            flags.add(FLAG_PAGE_RECORD)

        if okey in ctx.ops_values:
            ops_value = ctx.ops_values[okey]
        else:
            ops_value = ops(store, corpus, ekey, okey, ops_denominator)
        # No term exists when the record or object vector is unusable or no
        # page entity has an embedding; same condition _ops_terms applies.
        if ctx.record is None or FLAG_OBJECT_EMBEDDING in sim_flags or ctx.n_page_terms == 0:
            flags.add(FLAG_OPS_TERMS)

        rank = float(ctx.rank_of(okey, ops_value))
        mention = object_mention_feature(corpus, ekey, okey)

        out.append(
            FeatureVector(
                obj_entity_sim=sim,
                ops=ops_value,
                ops_rank=rank,
                object_mention=mention,
                missing=frozenset(flags),
            )
        )
    return out


def matrix(vectors: list[FeatureVector]) -> np.ndarray:
    """Stack feature vectors into an (n, 4) float matrix."""
    return np.array([fv.values() for fv in vectors], dtype=float).reshape(len(vectors), len(FEATURE_NAMES))


@dataclass(frozen=True)
class Standardizer:
    """Per-column z-score transform fitted on training data.

    Columns with zero spread are centered only; population stddev is used.
    """

    means: tuple[float, ...]
    stddevs: tuple[float, ...]

    def apply(self, X) -> np.ndarray:
        X = _as_matrix(X)
        means = np.asarray(self.means)
        stds = np.asarray(self.stddevs)
        if X.shape[1] != means.shape[0]:
            raise ValueError(f"expected {means.shape[0]} columns, got {X.shape[1]}")
        scale = np.where(stds == 0.0, 1.0, stds)
        return (X - means) / scale

    def to_dict(self) -> dict:
        return {"means": list(self.means), "stddevs": list(self.stddevs)}

    @classmethod
    def from_dict(cls, data: dict) -> "Standardizer":
        return cls(means=tuple(data["means"]), stddevs=tuple(data["stddevs"]))


def _as_matrix(X) -> np.ndarray:
    if isinstance(X, np.ndarray):
        return np.asarray(X, dtype=float)
    if X and isinstance(X[0], FeatureVector):
        return matrix(X)
    return np.asarray(X, dtype=float)


def fit_standardizer(X) -> Standardizer:
    """Column means and population stddevs of a non-empty training matrix."""
    X = _as_matrix(X)
    if X.size == 0 or X.shape[0] == 0:
        raise EmptyTrainingSetError("cannot fit a standardizer on an empty matrix")
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    return Standardizer(means=tuple(float(m) for m in means),
                        stddevs=tuple(float(s) for s in stds))


def load_triples(path, relation: Relation) -> list[Triple]:
    """Load a TSV triple file: entity<TAB>object[<TAB>score].

    An absent or empty score column means unscored; otherwise the score
    must be an integer in [0, 7].
    """
    triples = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise MalformedLineError(
                    path, line_no, f"expected 2 or 3 tab-separated fields, got {len(fields)}"
                )
            entity, obj = fields[0].strip(), fields[1].strip()
            if not entity or not obj:
                raise MalformedLineError(path, line_no, "entity and object must be non-empty")
            truth = None
            if len(fields) == 3 and fields[2].strip():
                try:
                    truth = int(fields[2].strip())
                except ValueError:
                    raise MalformedLineError(
                        path, line_no, f"score must be an integer, got {fields[2].strip()!r}"
                    ) from None
                if not (0 <= truth <= 7):
                    raise MalformedLineError(path, line_no, f"score must be in [0, 7], got {truth}")
            triples.append(Triple(entity=entity, relation=relation, object=obj, truth=truth))
    return triples


def load_universe(path, relation: Relation) -> ObjectUniverse:
    """Load an object universe file: one object name per line.

    Lines starting with '#' are comments; a '# relation: <name>' comment
    declares the file's relation and must match the requested one.
    """
    names = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                body = stripped.lstrip("#").strip()
                if body.lower().startswith("relation:"):
                    declared = body.split(":", 1)[1].strip()
                    if Relation.parse(declared) != relation:
                        raise RelationMismatchError(
                            f"{path}:{line_no}: universe file declares relation "
                            f"{declared!r}, requested {relation.value!r}"
                        )
                continue
            names.append(stripped)
    try:
        return ObjectUniverse.from_names(relation, names)
    except DuplicateKeyError as exc:
        raise DuplicateKeyError(exc.key, path) from None


def matrix_to_tsv(triples: list[Triple], vectors: list[FeatureVector]) -> str:
    """Debug-friendly TSV with header: raw features plus missing flags."""
    header = "entity\tobject\ttruth\t" + "\t".join(FEATURE_NAMES) + "\tmissing"
    lines = [header]
    for t, fv in zip(triples, vectors):
        truth = "" if t.truth is None else str(t.truth)
        values = "\t".join(repr(v) for v in fv.values())
        flags = ",".join(sorted(fv.missing))
        lines.append(f"{t.entity}\t{t.object}\t{truth}\t{values}\t{flags}")
    return "\n".join(lines) + "\n"


def missing_summary(vectors: list[FeatureVector]) -> str:
    """One-line report of how many rows carry each missing-data flag."""
    counts: dict[str, int] = {}
    flagged = 0
    for fv in vectors:
        if fv.missing:
            flagged += 1
        for flag in fv.missing:
            counts[flag] = counts.get(flag, 0) + 1
    if not counts:
        return f"missing data: none ({len(vectors)} rows)"
    parts = ", ".join(f"{flag}: {counts[flag]}" for flag in sorted(counts))
    return f"missing data: {flagged}/{len(vectors)} rows flagged ({parts})"
