import csv
import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from grasslrr.cli import main
from grasslrr.data import load_manifest, read_matrix
from grasslrr.grassmann import GrassmannPoint, geodesic_distance_sq


def digest(folder):
    h = hashlib.sha256()
    for path in sorted(Path(folder).rglob("*")):
        if path.is_file():
            h.update(str(path.relative_to(folder)).encode())
            h.update(path.read_bytes())
    return h.hexdigest()


def write_labels(path, labels):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "label"])
        for i, lab in enumerate(labels):
            w.writerow([f"p{i}", lab])


def test_synth_writes_files(tmp_path):
    out = tmp_path / "ds"
    code = main(["synth", "--r", "4", "--per-cluster", "30", "--d", "50", "--p", "5", "--sigma", "0.05", "--seed", "7", "--out", str(out)])
    assert code == 0
    files = sorted((out / "points").glob("*.txt"))
    assert len(files) == 120
    assert all(read_matrix(f).shape == (50, 5) for f in files[:5])
    m = load_manifest(out / "manifest.tsv")
    assert len(m.entries) == 120 and sorted(set(m.labels)) == [0, 1, 2, 3]
    assert (out / "truth.csv").read_text().splitlines()[0] == "id,label"


def test_synth_deterministic(tmp_path):
    args = ["synth", "--r", "2", "--per-cluster", "3", "--d", "8", "--p", "2", "--sigma", "0.1", "--seed", "3"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    assert digest(tmp_path / "a") == digest(tmp_path / "b")


def test_synth_zero_sigma(tmp_path):
    main(["synth", "--r", "2", "--per-cluster", "3", "--d", "8", "--p", "2", "--seed", "3", "--out", str(tmp_path)])
    m = load_manifest(tmp_path / "manifest.tsv")
    pts = [GrassmannPoint(read_matrix(m.resolve(e))) for e in m.entries]
    assert geodesic_distance_sq(pts[0], pts[1]) <= 1e-12 and geodesic_distance_sq(pts[0], pts[2]) <= 1e-12


def test_synth_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(["synth", "--r", "1", "--per-cluster", "2", "--d", "4", "--p", "1", "--out", str(blocker / "sub")])
    assert code == 3


@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("small")
    main(["synth", "--r", "2", "--per-cluster", "8", "--d", "20", "--p", "3", "--sigma", "0.05", "--seed", "2", "--out", str(out)])
    return out


def test_cluster_outputs(small_dataset, tmp_path):
    code = main(["cluster", str(small_dataset / "manifest.tsv"), "--p", "3", "--lam", "1", "--C", "7", "--R", "2", "--out", str(tmp_path)])
    assert code in (0, 4)
    labels = (tmp_path / "labels.csv").read_text().splitlines()
    assert labels[0] == "id,label" and len(labels) == 17
    assert labels[1].startswith("set00,")
    W = read_matrix(tmp_path / "W.txt")
    assert W.shape == (16, 16)
    np.testing.assert_allclose(W.sum(axis=1), 1.0, atol=1e-12)
    trace = (tmp_path / "trace.csv").read_text().splitlines()
    assert trace[0] == "iter,beta,primal_change,affine_residual"
    report = json.loads((tmp_path / "report.jsonl").read_text().splitlines()[-1])
    assert report["accuracy"] == 1.0
    assert report["converged"] == (code == 0)
    assert report["config"]["lam"] == 1.0


def test_cluster_two_points(tmp_path):
    main(["synth", "--r", "2", "--per-cluster", "1", "--d", "6", "--p", "2", "--seed", "1", "--out", str(tmp_path / "ds")])
    code = main(["cluster", str(tmp_path / "ds" / "manifest.tsv"), "--p", "2", "--C", "1", "--R", "2", "--out", str(tmp_path / "o")])
    assert code in (0, 4)
    np.testing.assert_array_equal(read_matrix(tmp_path / "o" / "W.txt"), [[0.0, 1.0], [1.0, 0.0]])


def test_cluster_missing_manifest(tmp_path):
    assert main(["cluster", str(tmp_path / "nope.tsv"), "--R", "2", "--out", str(tmp_path)]) == 2


def test_cluster_cut_locus(tmp_path, capsys):
    from grasslrr.data import ManifestEntry, write_manifest, write_matrix

    for k, theta in enumerate([0.0, np.pi / 2, np.pi / 2 + 0.01]):
        write_matrix(tmp_path / f"l{k}.txt", np.array([[np.cos(theta)], [np.sin(theta)]]))
    write_manifest(tmp_path / "m.tsv", [ManifestEntry(f"l{k}.txt", f"l{k}") for k in range(3)])
    code = main(["cluster", str(tmp_path / "m.tsv"), "--p", "1", "--C", "2", "--R", "2", "--out", str(tmp_path / "o")])
    assert code == 5
    assert "points 0 and 1" in capsys.readouterr().err


def test_cluster_bad_p_is_data_error(small_dataset, tmp_path):
    assert main(["cluster", str(small_dataset / "manifest.tsv"), "--p", "10", "--R", "2", "--out", str(tmp_path)]) == 3


def test_eval(tmp_path, capsys):
    write_labels(tmp_path / "a.csv", [0, 0, 1, 1])
    write_labels(tmp_path / "b.csv", [1, 1, 0, 0])
    write_labels(tmp_path / "c.csv", [0, 1, 0, 1])
    write_labels(tmp_path / "d.csv", [0, 1, 0])
    assert main(["eval", str(tmp_path / "a.csv"), str(tmp_path / "a.csv")]) == 0
    assert main(["eval", str(tmp_path / "a.csv"), str(tmp_path / "b.csv")]) == 0
    assert main(["eval", str(tmp_path / "c.csv"), str(tmp_path / "a.csv")]) == 0
    assert capsys.readouterr().out.split() == ["1.0000", "1.0000", "0.5000"]
    assert main(["eval", str(tmp_path / "a.csv"), str(tmp_path / "d.csv")]) != 0


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_lambda(small_dataset, tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", str(small_dataset / "manifest.tsv"), "--p", "3", "--C", "7", "--R", "2",
                 "--param", "lambda", "--values", "0.5,1,2", "--max-iters", "100", "--out", str(out)])
    assert code == 0
    rows = read_rows(out)
    assert [r["value"] for r in rows] == ["0.5", "1", "2"]
    assert all(0.0 <= float(r["accuracy"]) <= 1.0 for r in rows)


def test_sweep_single_point(small_dataset, tmp_path):
    out = tmp_path / "sweep.csv"
    main(["sweep", str(small_dataset / "manifest.tsv"), "--p", "3", "--R", "2", "--param", "C",
          "--values", "5", "--max-iters", "50", "--truth", str(small_dataset / "truth.csv"), "--out", str(out)])
    assert len(read_rows(out)) == 1


def test_sweep_empty_grid(small_dataset, tmp_path):
    code = main(["sweep", str(small_dataset / "manifest.tsv"), "--p", "3", "--R", "2", "--values", "", "--out", str(tmp_path / "s.csv")])
    assert code == 2


def test_usage_error():
    assert main(["cluster"]) == 2


def test_sweep_reuses_btensor(small_dataset, tmp_path, monkeypatch):
    import grasslrr.cli as cli

    calls = []
    real = cli.build_btensor
    monkeypatch.setattr(cli, "build_btensor", lambda *a: calls.append(1) or real(*a))
    main(["sweep", str(small_dataset / "manifest.tsv"), "--p", "3", "--C", "7", "--R", "2",
          "--values", "0.5,1,2", "--max-iters", "20", "--out", str(tmp_path / "s.csv")])
    assert len(calls) == 1
