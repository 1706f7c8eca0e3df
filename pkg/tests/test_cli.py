import csv
import io

import numpy as np
import pytest

from lghp.cli import main
from lghp.dataset_io import load_image, write_pgm
from lghp.index_store import load_index
from lghp.matching import rank_all
from lghp.pipeline import extract_descriptor
from lghp.synthetic import class_texture, write_corpus


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("faces")
    write_corpus(root, classes=3, per_class=2, side=64, seed=21)
    return root


@pytest.fixture(scope="module")
def duplicate_dataset(tmp_path_factory):
    """Every image present twice in its class, so LOO gamma is exactly 100."""
    root = tmp_path_factory.mktemp("dups")
    rng = np.random.default_rng(22)
    for cls in range(2):
        d = root / f"p{cls}"
        d.mkdir()
        img = rng.integers(0, 256, (64, 64)).astype(np.float64)
        write_pgm(d / "a.pgm", img)
        write_pgm(d / "b.pgm", img)
    return root


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestIndexCommand:
    def test_default_index(self, dataset_dir, tmp_path, capsys):
        out = tmp_path / "idx.lghp"
        code, _, _ = run(["index", "--dataset", str(dataset_dir), "--output", str(out)], capsys)
        assert code == 0
        index = load_index(out)
        assert len(index) == 6
        assert index.config.descriptor_length == 9216

    def test_paper_256(self, dataset_dir, tmp_path, capsys):
        out = tmp_path / "idx256.lghp"
        code, _, _ = run(
            ["index", "--dataset", str(dataset_dir), "--output", str(out),
             "--binning", "paper-256"],
            capsys,
        )
        assert code == 0
        assert load_index(out).config.descriptor_length == 4608

    def test_gabor_bank(self, dataset_dir, tmp_path, capsys):
        out = tmp_path / "idxg.lghp"
        code, _, _ = run(
            ["index", "--dataset", str(dataset_dir), "--output", str(out), "--gabor"],
            capsys,
        )
        assert code == 0
        index = load_index(out)
        assert index.config.descriptor_length == 36864
        assert len(index.config.gabor_bank) == 4

    def test_bad_dataset_exits_nonzero(self, tmp_path, capsys):
        code, _, err = run(
            ["index", "--dataset", str(tmp_path / "nope"), "--output", str(tmp_path / "x")],
            capsys,
        )
        assert code == 1
        assert "error" in err


class TestQueryCommand:
    def test_identical_image_ranks_first(self, dataset_dir, tmp_path, capsys):
        out = tmp_path / "q.lghp"
        run(["index", "--dataset", str(dataset_dir), "--output", str(out)], capsys)
        some_image = sorted(dataset_dir.rglob("*.pgm"))[0]
        code, stdout, _ = run(
            ["query", "--index", str(out), "--image", str(some_image), "--top", "3"],
            capsys,
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO(stdout)))
        assert rows[0] == ["image_id", "path", "label", "distance"]
        assert rows[1][3] == "0"  # exact duplicate at distance 0
        assert rows[1][1].endswith(some_image.name)

    def test_top_larger_than_index_prints_all(self, dataset_dir, tmp_path, capsys):
        out = tmp_path / "q2.lghp"
        run(["index", "--dataset", str(dataset_dir), "--output", str(out)], capsys)
        some_image = sorted(dataset_dir.rglob("*.pgm"))[0]
        code, stdout, _ = run(
            ["query", "--index", str(out), "--image", str(some_image), "--top", "99"],
            capsys,
        )
        rows = list(csv.reader(io.StringIO(stdout)))
        assert len(rows) == 1 + 6

    def test_row_order_matches_rank_all(self, dataset_dir, tmp_path, capsys):
        out = tmp_path / "q3.lghp"
        run(["index", "--dataset", str(dataset_dir), "--output", str(out)], capsys)
        probe = sorted(dataset_dir.rglob("*.pgm"))[3]
        _, stdout, _ = run(["query", "--index", str(out), "--image", str(probe)], capsys)
        rows = list(csv.reader(io.StringIO(stdout)))[1:]

        index = load_index(out)
        query = extract_descriptor(load_image(probe, 64), index.config)
        expected = rank_all(query, index, include_self=True)
        assert [(int(r[0]), int(r[3])) for r in rows] == [
            (e.image_id, e.distance) for e in expected
        ]


class TestEvalCommand:
    def test_loo_duplicates_give_gamma_100(self, duplicate_dataset, tmp_path, capsys):
        ret = tmp_path / "ret.csv"
        rec = tmp_path / "rec.csv"
        code, _, _ = run(
            ["eval", "--dataset", str(duplicate_dataset), "--loo", "--max-n", "4",
             "--retrieval-out", str(ret), "--recognition-out", str(rec)],
            capsys,
        )
        assert code == 0
        rec_rows = list(csv.reader(ret.open()))
        assert rec_rows[0] == ["n", "apr", "arr"]
        assert len(rec_rows) == 1 + 4
        loo_rows = list(csv.reader(rec.open()))
        assert loo_rows[1] == ["loo", "", "", "100.000000"]

    def test_eval_from_stored_index(self, dataset_dir, tmp_path, capsys):
        out = tmp_path / "e.lghp"
        run(["index", "--dataset", str(dataset_dir), "--output", str(out)], capsys)
        code, stdout, _ = run(
            ["eval", "--index", str(out), "--max-n", "3"], capsys
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO(stdout)))
        assert rows[0] == ["n", "apr", "arr"]
        assert len(rows) == 4

        # CSV values match the evaluation module on the same index
        from lghp.evaluation import retrieval_sweep

        sweep = retrieval_sweep(load_index(out), range(1, 4))
        for row in rows[1:]:
            n = int(row[0])
            assert float(row[1]) == pytest.approx(sweep[n][0], abs=1e-6)
            assert float(row[2]) == pytest.approx(sweep[n][1], abs=1e-6)

    def test_split_rows(self, duplicate_dataset, tmp_path, capsys):
        rec = tmp_path / "rec2.csv"
        code, _, _ = run(
            ["eval", "--dataset", str(duplicate_dataset), "--splits", "0.5",
             "--folds", "3", "--seed", "1",
             "--retrieval-out", str(tmp_path / "r.csv"), "--recognition-out", str(rec)],
            capsys,
        )
        assert code == 0
        rows = list(csv.reader(rec.open()))
        assert rows[0] == ["mode", "probe_fraction", "fold", "gamma"]
        assert [r[:3] for r in rows[1:]] == [
            ["split", "0.5", "0"], ["split", "0.5", "1"], ["split", "0.5", "2"]
        ]

    def test_noise_needs_dataset(self, dataset_dir, tmp_path, capsys):
        out = tmp_path / "n.lghp"
        run(["index", "--dataset", str(dataset_dir), "--output", str(out)], capsys)
        code, _, err = run(
            ["eval", "--index", str(out), "--noise-variance", "0.05"], capsys
        )
        assert code == 1
        assert "noise" in err

    def test_noise_eval_runs(self, dataset_dir, tmp_path, capsys):
        ret = tmp_path / "noisy.csv"
        code, _, _ = run(
            ["eval", "--dataset", str(dataset_dir), "--noise-variance", "0.05",
             "--noise-seed", "3", "--max-n", "2", "--retrieval-out", str(ret)],
            capsys,
        )
        assert code == 0
        rows = list(csv.reader(ret.open()))
        assert len(rows) == 3


class TestVisualizeCommand:
    def test_writes_six_r_files(self, tmp_path, capsys):
        img_path = tmp_path / "face.pgm"
        write_pgm(img_path, class_texture(0, side=64, seed=30))
        out_dir = tmp_path / "fi"
        code, _, _ = run(
            ["visualize", "--image", str(img_path), "--output-dir", str(out_dir),
             "--radius", "2"],
            capsys,
        )
        assert code == 0
        files = sorted(p.name for p in out_dir.iterdir())
        assert len(files) == 12
        assert "face_D1_0-45.pgm" in files
        assert "face_D2_90-135.pgm" in files

    def test_constant_image_gives_black_maps(self, tmp_path, capsys):
        img_path = tmp_path / "flat.pgm"
        write_pgm(img_path, np.full((64, 64), 80.0))
        out_dir = tmp_path / "fi_flat"
        run(["visualize", "--image", str(img_path), "--output-dir", str(out_dir),
             "--radius", "1"], capsys)
        for p in out_dir.iterdir():
            img = load_image(p, 64)
            np.testing.assert_array_equal(img, 0.0)

    def test_pairs_produce_distinct_images(self, tmp_path, capsys):
        img_path = tmp_path / "tex.pgm"
        write_pgm(img_path, class_texture(3, side=64, seed=31))
        out_dir = tmp_path / "fi_tex"
        run(["visualize", "--image", str(img_path), "--output-dir", str(out_dir),
             "--radius", "1"], capsys)
        images = [load_image(p, 64) for p in sorted(out_dir.iterdir())]
        assert len(images) == 6
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                assert (images[i] != images[j]).any()
