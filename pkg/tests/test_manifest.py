import json

import numpy as np
import pytest

from lcprotonets import (
    AdapterState,
    LabelSplit,
    ManifestError,
    SynthConfig,
    generate,
    load_adapter,
    load_manifest,
    load_split,
    save_adapter,
    write_manifest,
    write_split,
)
from lcprotonets.manifest import read_training_log, write_training_log


@pytest.fixture()
def dataset():
    return generate(SynthConfig(n_labels=6, dimension=10, items_per_label=4,
                                seed=13))


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


HEADER = json.dumps({"dimension": 3, "vocabulary": ["a", "b"]})


def record(item_id="x1", labels=("a",), embedding=(1.0, 0.0, 0.0), **overrides):
    payload = {"id": item_id, "labels": list(labels),
               "embedding": list(embedding)}
    payload.update(overrides)
    return json.dumps(payload)


class TestManifestRoundTrip:
    def test_bit_exact(self, tmp_path, dataset):
        path = tmp_path / "data.jsonl"
        write_manifest(path, dataset.items, dataset.vocabulary)
        loaded = load_manifest(path)
        assert loaded.vocabulary.names == dataset.vocabulary.names
        assert loaded.dimension == 10
        assert len(loaded.items) == len(dataset.items)
        for original, parsed in zip(dataset.items, loaded.items):
            assert parsed.id == original.id
            assert parsed.labels == original.labels
            np.testing.assert_array_equal(parsed.embedding, original.embedding)

    def test_blank_lines_skipped(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl", [HEADER, "", record(), "   "])
        loaded = load_manifest(path)
        assert len(loaded.items) == 1

    def test_header_line_is_json_object(self, tmp_path, dataset):
        path = tmp_path / "data.jsonl"
        write_manifest(path, dataset.items, dataset.vocabulary)
        first = path.read_text(encoding="utf-8").splitlines()[0]
        header = json.loads(first)
        assert header == {"dimension": 10,
                          "vocabulary": list(dataset.vocabulary.names)}


class TestManifestErrors:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ManifestError, match="empty"):
            load_manifest(path)

    def test_malformed_header_json(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl", ["{not json"])
        with pytest.raises(ManifestError, match="line 1"):
            load_manifest(path)

    def test_header_missing_keys(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl", [json.dumps({"dimension": 3})])
        with pytest.raises(ManifestError, match="line 1"):
            load_manifest(path)

    def test_non_integer_dimension(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl", [json.dumps(
            {"dimension": 2.5, "vocabulary": ["a"]})])
        with pytest.raises(ManifestError, match="positive integer"):
            load_manifest(path)

    def test_malformed_record_names_line(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl", [HEADER, record(), "{oops"])
        with pytest.raises(ManifestError, match="line 3") as exc:
            load_manifest(path)
        assert exc.value.line == 3

    def test_wrong_embedding_length_names_line(self, tmp_path):
        bad = record(item_id="x2", embedding=[0.0] * 127)
        path = write_lines(tmp_path / "m.jsonl", [HEADER, record(), bad])
        with pytest.raises(ManifestError, match="127") as exc:
            load_manifest(path)
        assert exc.value.line == 3

    def test_unknown_label_names_line(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl",
                           [HEADER, record(labels=["zebra"])])
        with pytest.raises(ManifestError, match="line 2"):
            load_manifest(path)

    def test_duplicate_id_names_line(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl",
                           [HEADER, record(), record()])
        with pytest.raises(ManifestError, match="duplicate id") as exc:
            load_manifest(path)
        assert exc.value.line == 3

    def test_duplicate_labels_rejected(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl",
                           [HEADER, record(labels=["a", "a"])])
        with pytest.raises(ManifestError, match="duplicates"):
            load_manifest(path)

    def test_empty_labels_rejected(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl", [HEADER, record(labels=[])])
        with pytest.raises(ManifestError, match="non-empty"):
            load_manifest(path)

    def test_non_numeric_embedding_rejected(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl",
                           [HEADER, record(embedding=[1.0, "x", 0.0])])
        with pytest.raises(ManifestError, match="numbers"):
            load_manifest(path)

    def test_boolean_embedding_rejected(self, tmp_path):
        path = write_lines(tmp_path / "m.jsonl",
                           [HEADER, record(embedding=[True, 0.0, 0.0])])
        with pytest.raises(ManifestError, match="numbers"):
            load_manifest(path)

    def test_non_finite_embedding_rejected(self, tmp_path):
        line = ('{"id": "x1", "labels": ["a"], '
                '"embedding": [1.0, NaN, 0.0]}')
        path = write_lines(tmp_path / "m.jsonl", [HEADER, line])
        with pytest.raises(ManifestError) as exc:
            load_manifest(path)
        assert exc.value.line == 2


class TestSplitFiles:
    def test_round_trip(self, tmp_path):
        split = LabelSplit(base=("x", "y"), validation_holdout=("z",),
                           novel=("w", "v"))
        path = tmp_path / "split.txt"
        write_split(path, split)
        assert load_split(path) == split

    def test_empty_sections_survive(self, tmp_path):
        split = LabelSplit(base=(), validation_holdout=(), novel=("only",))
        path = tmp_path / "split.txt"
        write_split(path, split)
        assert load_split(path) == split

    def test_unknown_section_names_line(self, tmp_path):
        path = write_lines(tmp_path / "split.txt",
                           ["[base]", "x", "[bogus]", "y"])
        with pytest.raises(ManifestError, match="line 3"):
            load_split(path)

    def test_label_before_section_rejected(self, tmp_path):
        path = write_lines(tmp_path / "split.txt", ["stray", "[base]"])
        with pytest.raises(ManifestError, match="line 1"):
            load_split(path)

    def test_duplicate_across_sections_rejected(self, tmp_path):
        path = write_lines(tmp_path / "split.txt",
                           ["[base]", "x", "[validation_holdout]", "x",
                            "[novel]"])
        with pytest.raises(ManifestError, match="disjoint"):
            load_split(path)


class TestAdapterFiles:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(21)
        adapter = AdapterState.random(6, 4, rng)
        path = tmp_path / "adapter.json"
        save_adapter(path, adapter)
        loaded = load_adapter(path)
        np.testing.assert_array_equal(loaded.weight, adapter.weight)
        np.testing.assert_array_equal(loaded.bias, adapter.bias)
        assert (loaded.d_in, loaded.d_out) == (6, 4)

    def test_missing_field_rejected(self, tmp_path):
        path = tmp_path / "adapter.json"
        path.write_text(json.dumps({"d_in": 2, "d_out": 2,
                                    "weight": [[1, 0], [0, 1]]}),
                        encoding="utf-8")
        with pytest.raises(ManifestError, match="bias"):
            load_adapter(path)

    def test_shape_mismatch_rejected(self, tmp_path):
        path = tmp_path / "adapter.json"
        path.write_text(json.dumps({
            "d_in": 3, "d_out": 2,
            "weight": [[1, 0], [0, 1]], "bias": [0, 0]}), encoding="utf-8")
        with pytest.raises(ManifestError, match="shape"):
            load_adapter(path)

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "adapter.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ManifestError, match="JSON"):
            load_adapter(path)


class TestTrainingLogFiles:
    def test_round_trip(self, tmp_path):
        rows = [(1, 0.6931471805599453, 0.5), (2, 0.25, 0.9166666666666666)]
        path = tmp_path / "log.csv"
        write_training_log(path, rows)
        assert read_training_log(path) == rows
        text = path.read_text(encoding="utf-8")
        assert text.splitlines()[0] == "epoch,mean_loss,val_macro_f1"

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("a,b,c\n1,2,3\n", encoding="utf-8")
        with pytest.raises(ManifestError, match="header"):
            read_training_log(path)
