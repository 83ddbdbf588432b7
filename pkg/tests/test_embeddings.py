"""Embedding file loading, key normalization, and cosine similarity."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triplescore.embeddings import (
    EmbeddingStore,
    cosine,
    load_embeddings,
    normalize_key,
)
from triplescore.errors import (
    DimensionMismatchError,
    DuplicateKeyError,
    MalformedLineError,
    ZeroVectorError,
)


def write(tmp_path, text, name="emb.txt"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoad:
    def test_minimal_file(self, tmp_path):
        store = load_embeddings(write(tmp_path, "2 3\nparis 1 0 0\nfrance 0 1 0\n"))
        assert store.dim == 3
        assert len(store) == 2

    def test_round_trip_exact_vectors(self, tmp_path):
        store = load_embeddings(
            write(tmp_path, "2 2\na 0.25 -1.5\nb 3.125 0.0078125\n")
        )
        assert store.lookup("a").tolist() == [0.25, -1.5]
        assert store.lookup("b").tolist() == [3.125, 0.0078125]

    def test_wrong_component_count(self, tmp_path):
        path = write(tmp_path, "1 3\nparis 1 0\n")
        with pytest.raises(MalformedLineError) as err:
            load_embeddings(path)
        assert err.value.line_no == 2

    def test_duplicate_key(self, tmp_path):
        path = write(tmp_path, "2 2\nparis 1 0\nParis 0 1\n")
        with pytest.raises(DuplicateKeyError):
            load_embeddings(path)

    def test_header_count_mismatch(self, tmp_path):
        path = write(tmp_path, "3 2\nparis 1 0\n")
        with pytest.raises(MalformedLineError):
            load_embeddings(path)

    def test_bad_header(self, tmp_path):
        path = write(tmp_path, "not a header\n")
        with pytest.raises(MalformedLineError) as err:
            load_embeddings(path)
        assert err.value.line_no == 1

    def test_non_numeric_component(self, tmp_path):
        path = write(tmp_path, "1 2\nparis 1 x\n")
        with pytest.raises(MalformedLineError):
            load_embeddings(path)

    def test_expected_dim_mismatch(self, tmp_path):
        path = write(tmp_path, "1 3\nparis 1 0 0\n")
        with pytest.raises(DimensionMismatchError):
            load_embeddings(path, expected_dim=100)

    def test_expected_dim_match(self, tmp_path):
        path = write(tmp_path, "1 3\nparis 1 0 0\n")
        assert load_embeddings(path, expected_dim=3).dim == 3


class TestLookup:
    def test_normalizes_case(self, tmp_path):
        store = load_embeddings(write(tmp_path, "1 3\nparis 1 0 0\n"))
        assert store.lookup("Paris").tolist() == [1.0, 0.0, 0.0]

    def test_multiword_key(self, tmp_path):
        store = load_embeddings(
            write(tmp_path, "1 2\nunited_states_of_america 1 0\n")
        )
        assert store.lookup("United States of America") is not None
        assert "united  states of\tamerica" in store

    def test_absent_key_is_none(self, tmp_path):
        store = load_embeddings(write(tmp_path, "1 2\nparis 1 0\n"))
        assert store.lookup("atlantis_xyz") is None

    def test_similarity_raises_on_unknown(self, tmp_path):
        store = load_embeddings(write(tmp_path, "1 2\nparis 1 0\n"))
        with pytest.raises(KeyError):
            store.similarity("paris", "atlantis")


class TestNormalizeKey:
    def test_examples(self):
        assert normalize_key("United States of America") == "united_states_of_america"
        assert normalize_key("  Paris ") == "paris"
        assert normalize_key("a\t b") == "a_b"

    @given(st.text(max_size=40))
    def test_idempotent(self, raw):
        once = normalize_key(raw)
        assert normalize_key(once) == once


class TestCosine:
    def test_identity(self):
        assert cosine([1, 0], [1, 0]) == 1.0

    def test_orthogonal(self):
        assert cosine([1, 0], [0, 1]) == 0.0

    def test_right_angle_half(self):
        assert cosine([1, 0], [1, 1]) == pytest.approx(1 / math.sqrt(2), abs=1e-9)

    def test_hand_computed(self):
        assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(
            32 / (math.sqrt(14) * math.sqrt(77)), abs=1e-8
        )

    def test_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            cosine([0, 0], [1, 0])
        with pytest.raises(ZeroVectorError):
            cosine([1, 0], [0, 0])

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cosine([1, 0], [1, 0, 0])

    nonzero_vec = st.lists(
        st.integers(min_value=-5, max_value=5), min_size=2, max_size=6
    ).filter(lambda v: any(v))

    nonzero_pair = st.integers(min_value=2, max_value=6).flatmap(
        lambda n: st.tuples(
            st.lists(st.integers(-5, 5), min_size=n, max_size=n).filter(any),
            st.lists(st.integers(-5, 5), min_size=n, max_size=n).filter(any),
        )
    )

    @given(nonzero_pair)
    @settings(max_examples=80)
    def test_symmetry(self, pair):
        a, b = pair
        assert cosine(a, b) == pytest.approx(cosine(b, a), abs=1e-12)

    @given(nonzero_vec, st.floats(min_value=0.01, max_value=100))
    @settings(max_examples=80)
    def test_positive_scaling(self, a, s):
        assert cosine(a, [s * x for x in a]) == pytest.approx(1.0, abs=1e-9)

    @given(nonzero_vec)
    @settings(max_examples=80)
    def test_negation(self, a):
        assert cosine(a, [-x for x in a]) == pytest.approx(-1.0, abs=1e-9)

    @given(nonzero_pair)
    @settings(max_examples=80)
    def test_bounded(self, pair):
        a, b = pair
        assert -1 - 1e-12 <= cosine(a, b) <= 1 + 1e-12


class TestStore:
    def test_rejects_wrong_length_vector(self):
        with pytest.raises(DimensionMismatchError):
            EmbeddingStore(dim=3, entries={"a": np.array([1.0, 0.0])})

    def test_rejects_nonpositive_dim(self):
        with pytest.raises(DimensionMismatchError):
            EmbeddingStore(dim=0, entries={})

    def test_normalization_collision_is_duplicate(self, tmp_path):
        # "New York" and "new_york" normalize to the same key
        path = write(tmp_path, "2 2\nNew_York 1 0\nnew_york 0 1\n")
        with pytest.raises(DuplicateKeyError) as err:
            load_embeddings(path)
        assert err.value.key == "new_york"
