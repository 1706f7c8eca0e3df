import numpy as np
import pytest

from lghp.config import ExtractionConfig, LghpParams
from lghp.dataset_io import scan_dataset
from lghp.gabor import DEFAULT_BANK_SPECS
from lghp.pipeline import extract_dataset, extract_descriptor
from lghp.synthetic import synthetic_corpus, write_corpus


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    write_corpus(root, classes=3, per_class=3, side=32, seed=11)
    return root


CONFIG32 = ExtractionConfig(kind="lghp", params=LghpParams(radius_limit=3, side=32))


class TestExtractDataset:
    def test_shapes_and_order(self, corpus_dir):
        manifest = scan_dataset(corpus_dir)
        index = extract_dataset(manifest, CONFIG32)
        assert len(index) == 9
        assert index.matrix.shape == (9, CONFIG32.descriptor_length)
        assert list(index.labels) == [e.label for e in manifest.entries]
        assert index.paths == tuple(e.path for e in manifest.entries)

    def test_thread_count_never_changes_output(self, corpus_dir):
        manifest = scan_dataset(corpus_dir)
        one = extract_dataset(manifest, CONFIG32, threads=1)
        four = extract_dataset(manifest, CONFIG32, threads=4)
        np.testing.assert_array_equal(one.matrix, four.matrix)

    def test_zero_variance_noise_matches_clean(self, corpus_dir):
        manifest = scan_dataset(corpus_dir)
        clean = extract_dataset(manifest, CONFIG32)
        noisy = extract_dataset(manifest, CONFIG32, noise=(0.0, 99))
        np.testing.assert_array_equal(clean.matrix, noisy.matrix)

    def test_noise_is_per_image_seeded(self, corpus_dir):
        manifest = scan_dataset(corpus_dir)
        a = extract_dataset(manifest, CONFIG32, noise=(0.05, 7))
        b = extract_dataset(manifest, CONFIG32, noise=(0.05, 7))
        c = extract_dataset(manifest, CONFIG32, noise=(0.05, 8))
        np.testing.assert_array_equal(a.matrix, b.matrix)
        assert (a.matrix != c.matrix).any()


class TestExtractDescriptor:
    def test_dispatch_by_kind(self):
        rng = np.random.default_rng(12)
        img = rng.integers(0, 256, (32, 32)).astype(np.float64)
        params = LghpParams(radius_limit=2, side=32)
        lghp_desc = extract_descriptor(img, ExtractionConfig("lghp", params))
        lbp_desc = extract_descriptor(img, ExtractionConfig("lbp", params))
        assert len(lghp_desc) == 2 * 6 * 512
        assert len(lbp_desc) == 512

    def test_dispatch_gabor(self):
        img = np.zeros((32, 32))
        params = LghpParams(radius_limit=1, side=32)
        config = ExtractionConfig("lghp", params, DEFAULT_BANK_SPECS)
        assert len(extract_descriptor(img, config)) == 4 * 6 * 512


class TestSyntheticCorpus:
    def test_reproducible(self):
        a, la = synthetic_corpus(classes=2, per_class=2, side=32, seed=5)
        b, lb = synthetic_corpus(classes=2, per_class=2, side=32, seed=5)
        np.testing.assert_array_equal(la, lb)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_range_and_shape(self):
        images, labels = synthetic_corpus(classes=2, per_class=3, side=48, seed=6)
        assert len(images) == 6
        assert list(labels) == [0, 0, 0, 1, 1, 1]
        for img in images:
            assert img.shape == (48, 48)
            assert img.min() >= 0.0 and img.max() <= 255.0

    def test_write_corpus_layout(self, tmp_path):
        write_corpus(tmp_path, classes=2, per_class=2, side=16, seed=4)
        files = sorted(p.relative_to(tmp_path).as_posix() for p in tmp_path.rglob("*.pgm"))
        assert files == [
            "class_00/face_00.pgm",
            "class_00/face_01.pgm",
            "class_01/face_00.pgm",
            "class_01/face_01.pgm",
        ]
