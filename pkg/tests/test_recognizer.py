import io
import math
import random

import numpy as np
import pytest
from PIL import Image

from placeguide.errors import (
    DatasetError,
    ImageDecodeError,
    IndexFormatError,
    InvalidArgumentError,
)
from placeguide.recognizer import (
    DescriptorParams,
    LabelScore,
    ModelManifest,
    ReferenceIndex,
    SelectionPolicy,
    build_index,
    classify,
    decode_image,
    evaluate_index,
    extract_descriptor,
    load_index,
    save_index,
    select_place,
)
from placeguide.synthdata import generate_dataset, noise_image

from oracles import naive_confidences, naive_descriptor


def png_bytes(array):
    buf = io.BytesIO()
    Image.fromarray(array, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def uniform_image(value, size):
    return np.full((size, size, 3), value, dtype=np.uint8)


class TestExtractDescriptor:
    def test_uniform_mid_gray(self):
        vec = extract_descriptor(uniform_image(128, 64))
        assert vec.shape == (72,)
        grid, hist = vec[:48], vec[48:]
        # all cells identical; pre-normalization value is 128/255
        norm = math.sqrt(48 * (128 / 255) ** 2 + 3 * 1.0)
        assert np.allclose(grid, (128 / 255) / norm, atol=1e-12)
        # mass concentrated in one bin per channel (bin 4 covers [128, 160))
        hist = hist.reshape(3, 8)
        for channel in range(3):
            assert hist[channel, 4] == pytest.approx(1.0 / norm, abs=1e-12)
            assert np.count_nonzero(hist[channel]) == 1

    def test_resolution_invariant_for_uniform_input(self):
        small = extract_descriptor(uniform_image(200, 64))
        large = extract_descriptor(uniform_image(200, 128))
        assert np.allclose(small, large, atol=1e-6)

    def test_unit_norm(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            vec = extract_descriptor(noise_image(rng))
            assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-9)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(42)
        for size in (16, 33, 64):
            image = noise_image(rng, size=size)
            expected = naive_descriptor(
                [[tuple(px) for px in row] for row in image.tolist()]
            )
            got = extract_descriptor(image)
            assert np.allclose(got, np.array(expected), atol=1e-12)

    def test_non_default_params_length(self):
        params = DescriptorParams(grid_size=2, histogram_bins=4)
        vec = extract_descriptor(uniform_image(100, 32), params)
        assert vec.shape == (params.length,) == (24,)

    def test_too_small_image(self):
        with pytest.raises(InvalidArgumentError):
            extract_descriptor(np.zeros((3, 10, 3), dtype=np.uint8))

    def test_wrong_shape_or_dtype(self):
        with pytest.raises(InvalidArgumentError):
            extract_descriptor(np.zeros((8, 8), dtype=np.uint8))
        with pytest.raises(InvalidArgumentError):
            extract_descriptor(np.zeros((8, 8, 3), dtype=np.float64))


class TestDecodeImage:
    def test_round_trip(self):
        rng = np.random.default_rng(6)
        image = noise_image(rng, size=16)
        assert np.array_equal(decode_image(png_bytes(image)), image)

    @pytest.mark.parametrize("data", [b"", b"definitely not an image"])
    def test_undecodable(self, data):
        with pytest.raises(ImageDecodeError):
            decode_image(data)


class TestDescriptorParams:
    def test_default_length_is_72(self):
        assert DescriptorParams().length == 72

    @pytest.mark.parametrize("bins", [0, 7, 100])
    def test_bins_must_divide_256(self, bins):
        with pytest.raises(InvalidArgumentError):
            DescriptorParams(histogram_bins=bins)

    def test_temperature_positive(self):
        with pytest.raises(InvalidArgumentError):
            DescriptorParams(temperature=0.0)


class TestModelManifest:
    def test_rejects_empty_labels(self):
        with pytest.raises(InvalidArgumentError):
            ModelManifest(name="m", version="1", labels=())

    def test_rejects_duplicate_labels(self):
        with pytest.raises(InvalidArgumentError):
            ModelManifest(name="m", version="1", labels=("a", "a"))


class TestBuildIndex:
    def test_counts_and_sorted_labels(self, synth_dirs, synth_index):
        assert synth_index.manifest.labels == ("Kaaba", "Maqam Ibrahim", "Zamzam")
        assert synth_index.descriptor_count == 36
        for table in synth_index.entries.values():
            assert table.shape == (12, 72)

    def test_empty_label_folder(self, tmp_path):
        (tmp_path / "empty-label").mkdir()
        with pytest.raises(DatasetError, match="empty-label"):
            build_index(tmp_path)

    def test_undecodable_file_named(self, tmp_path):
        folder = tmp_path / "label"
        folder.mkdir()
        bad = folder / "broken.png"
        bad.write_bytes(b"junk")
        with pytest.raises(DatasetError, match="broken.png"):
            build_index(tmp_path)

    def test_no_label_folders(self, tmp_path):
        with pytest.raises(DatasetError):
            build_index(tmp_path)

    def test_rebuild_is_byte_identical(self, tmp_path):
        data = tmp_path / "data"
        generate_dataset(data, per_label=3, seed=5)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        save_index(build_index(data), out_a)
        save_index(build_index(data), out_b)
        for name in ("manifest.json", "descriptors.tsv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


class TestIndexSerialization:
    def test_round_trip_lossless(self, synth_index, tmp_path):
        save_index(synth_index, tmp_path / "idx")
        loaded = load_index(tmp_path / "idx")
        assert loaded.manifest == synth_index.manifest
        for label in synth_index.manifest.labels:
            assert np.array_equal(loaded.entries[label], synth_index.entries[label])

    def test_missing_directory(self, tmp_path):
        with pytest.raises(IndexFormatError):
            load_index(tmp_path / "nothing")

    def test_bad_descriptor_header(self, synth_index, tmp_path):
        out = tmp_path / "idx"
        save_index(synth_index, out)
        tsv = out / "descriptors.tsv"
        tsv.write_text("nonsense\n" + tsv.read_text().split("\n", 1)[1])
        with pytest.raises(IndexFormatError, match="header"):
            load_index(out)

    def test_unknown_label_row(self, synth_index, tmp_path):
        out = tmp_path / "idx"
        save_index(synth_index, out)
        tsv = out / "descriptors.tsv"
        lines = tsv.read_text().splitlines()
        lines.append("NotALabel\t" + "\t".join(["0.0"] * 72))
        tsv.write_text("\n".join(lines) + "\n")
        with pytest.raises(IndexFormatError, match="NotALabel"):
            load_index(out)

    def test_wrong_value_count(self, synth_index, tmp_path):
        out = tmp_path / "idx"
        save_index(synth_index, out)
        tsv = out / "descriptors.tsv"
        lines = tsv.read_text().splitlines()
        lines[1] = "\t".join(lines[1].split("\t")[:10])
        tsv.write_text("\n".join(lines) + "\n")
        with pytest.raises(IndexFormatError, match="expected 72"):
            load_index(out)

    def test_bad_manifest_format(self, synth_index, tmp_path):
        out = tmp_path / "idx"
        save_index(synth_index, out)
        (out / "manifest.json").write_text('{"format": "other/9"}')
        with pytest.raises(IndexFormatError, match="format"):
            load_index(out)


class TestClassify:
    def test_training_image_recovers_its_label(self, synth_dirs, synth_index):
        train, _ = synth_dirs
        sample = sorted((train / "Zamzam").iterdir())[0]
        scores = classify(sample.read_bytes(), synth_index)
        assert scores[0].label == "Zamzam"
        assert scores[0].confidence > 0.8

    def test_singleton_index_confidence_exactly_one(self, tmp_path):
        data = tmp_path / "one"
        generate_dataset(data, per_label=2, seed=9, labels=("Solo",))
        index = build_index(data)
        rng = np.random.default_rng(10)
        scores = classify(png_bytes(noise_image(rng)), index)
        assert [s.label for s in scores] == ["Solo"]
        assert scores[0].confidence == 1.0

    def test_equal_distances_split_evenly(self):
        image = uniform_image(100, 16)
        vec = extract_descriptor(image)
        manifest = ModelManifest(name="m", version="1", labels=("A", "B"))
        index = ReferenceIndex(manifest, {"A": vec[None, :], "B": vec[None, :]})
        scores = classify(png_bytes(image), index)
        assert [s.label for s in scores] == ["A", "B"]  # tie broken by label
        assert scores[0].confidence == 0.5
        assert scores[1].confidence == 0.5

    def test_confidences_sum_to_one(self, synth_dirs, synth_index):
        _, test = synth_dirs
        for folder in test.iterdir():
            for file in sorted(folder.iterdir())[:2]:
                scores = classify(file.read_bytes(), synth_index)
                total = sum(s.confidence for s in scores)
                assert total == pytest.approx(1.0, abs=1e-9)
                assert all(0.0 <= s.confidence <= 1.0 for s in scores)

    def test_sorted_descending(self, synth_dirs, synth_index):
        _, test = synth_dirs
        file = sorted((test / "Kaaba").iterdir())[0]
        scores = classify(file.read_bytes(), synth_index)
        confidences = [s.confidence for s in scores]
        assert confidences == sorted(confidences, reverse=True)

    def test_matches_naive_oracle(self, synth_dirs, synth_index):
        _, test = synth_dirs
        tables = {
            label: [list(row) for row in table]
            for label, table in synth_index.entries.items()
        }
        tau = synth_index.manifest.descriptor_params.temperature
        for folder in sorted(test.iterdir()):
            file = sorted(folder.iterdir())[0]
            image = decode_image(file.read_bytes())
            query = naive_descriptor(
                [[tuple(px) for px in row] for row in image.tolist()]
            )
            expected = naive_confidences(query, tables, tau)
            got = {s.label: s.confidence for s in classify(file.read_bytes(), synth_index)}
            for label in expected:
                assert got[label] == pytest.approx(expected[label], abs=1e-9)

    def test_undecodable_bytes(self, synth_index):
        with pytest.raises(ImageDecodeError):
            classify(b"not an image", synth_index)


class TestSelectPlace:
    def test_empty_input(self):
        selection = select_place([])
        assert selection.top is None
        assert selection.ranked == ()

    def test_one_entry_above_accept(self):
        selection = select_place(
            [LabelScore("Kaaba", 0.95), LabelScore("Zamzam", 0.60)]
        )
        assert selection.top == "Kaaba"
        assert [s.label for s in selection.ranked] == ["Kaaba"]

    def test_all_below_accept(self):
        selection = select_place(
            [LabelScore("Kaaba", 0.79), LabelScore("Zamzam", 0.75)]
        )
        assert selection.top is None
        assert selection.ranked == ()

    def test_boundary_is_inclusive(self):
        selection = select_place([LabelScore("Kaaba", 0.80)])
        assert selection.top == "Kaaba"

    def test_single_maximal_entry_selected(self):
        # a first-entry maximum must be selected, not skipped
        selection = select_place([LabelScore("A", 0.9)])
        assert selection.top == "A"

    def test_ties_broken_by_label(self):
        selection = select_place([LabelScore("B", 0.9), LabelScore("A", 0.9)])
        assert selection.top == "A"
        assert [s.label for s in selection.ranked] == ["A", "B"]

    def test_below_floor_entries_never_change_result(self):
        rng = random.Random(123)
        policy = SelectionPolicy()
        for _ in range(200):
            entries = [
                LabelScore(f"L{i}", round(rng.uniform(0.5, 1.0), 3))
                for i in range(rng.randint(0, 5))
            ]
            base = select_place(entries, policy)
            noise = [
                LabelScore(f"N{i}", round(rng.uniform(0.0, 0.499), 3))
                for i in range(rng.randint(1, 4))
            ]
            assert select_place(entries + noise, policy) == base

    def test_top_has_max_confidence(self):
        rng = random.Random(321)
        for _ in range(200):
            entries = [
                LabelScore(f"L{i}", round(rng.random(), 3)) for i in range(6)
            ]
            selection = select_place(entries)
            if selection.top is not None:
                best = max(s.confidence for s in selection.ranked)
                assert selection.ranked[0].confidence == best
                assert selection.top == selection.ranked[0].label

    def test_policy_validation(self):
        with pytest.raises(InvalidArgumentError):
            SelectionPolicy(floor=0.9, accept=0.8)
        with pytest.raises(InvalidArgumentError):
            LabelScore("x", 1.2)


class TestEvaluateIndex:
    def test_train_set_scores_perfectly(self, synth_dirs, synth_index):
        train, _ = synth_dirs
        report = evaluate_index(synth_index, train)
        assert report.accuracy == 1.0
        assert report.total == 36

    def test_held_out_accuracy(self, synth_dirs, synth_index):
        _, test = synth_dirs
        report = evaluate_index(synth_index, test)
        assert report.accuracy == 1.0
        assert report.total == 12
        for true_label, row in report.confusion.items():
            assert sum(row.values()) == 4  # 4 test images per label
            assert row[true_label] == 4
        assert sum(sum(row.values()) for row in report.confusion.values()) == 12

    def test_unknown_test_label(self, synth_index, tmp_path):
        generate_dataset(tmp_path, per_label=1, seed=3, labels=("Mystery",))
        with pytest.raises(DatasetError, match="Mystery"):
            evaluate_index(synth_index, tmp_path)

    def test_empty_test_set(self, synth_index, tmp_path):
        with pytest.raises(DatasetError):
            evaluate_index(synth_index, tmp_path)


class TestSyntheticSeparation:
    def test_noise_images_stay_below_floor(self, synth_index):
        rng = np.random.default_rng(2024)
        policy = SelectionPolicy()
        for _ in range(20):
            scores = classify(png_bytes(noise_image(rng)), synth_index)
            assert select_place(scores, policy).top is None

    def test_every_class_recognized_confidently(self, synth_dirs, synth_index):
        _, test = synth_dirs
        for folder in sorted(test.iterdir()):
            for file in sorted(folder.iterdir()):
                scores = classify(file.read_bytes(), synth_index)
                assert scores[0].label == folder.name
                assert scores[0].confidence >= 0.8
