import json
import os

from mtlforest.algebras import lukasiewicz_chain, parse_mtl, write_mtl
from mtlforest.cli import main
from mtlforest.morphisms import find_isomorphism


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def data(data_dir, name):
    return os.path.join(data_dir, name)


# ---------------------------------------------------------------- validate


def test_validate_algebra(capsys, data_dir):
    code, out, _ = run(capsys, "validate", data(data_dir, "l3.mtl"))
    assert code == 0 and "valid MTL-algebra" in out


def test_validate_forest_and_lforest(capsys, data_dir, tmp_path):
    forest = tmp_path / "f.forest"
    forest.write_text("nodes 2\nedge 0 1\n")
    code, out, _ = run(capsys, "validate", str(forest))
    assert code == 0 and "valid forest" in out
    code, out, _ = run(capsys, "validate", data(data_dir, "example8.lforest"))
    assert code == 0 and "labeled forest" in out


def test_validate_axiom_violation_is_verified_negative(capsys, tmp_path):
    l3 = lukasiewicz_chain(3)
    rows = write_mtl(l3).splitlines()
    # break one imp entry: residuation must fail
    imp_start = rows.index("imp") + 1
    row = rows[imp_start].split()
    row[0] = "0" if row[0] != "0" else "1"
    rows[imp_start] = " ".join(row)
    path = tmp_path / "bad.mtl"
    path.write_text("\n".join(rows) + "\n")
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 1 and "INVALID" in out


def test_validate_malformed_file_is_error(capsys, tmp_path):
    path = tmp_path / "junk.mtl"
    path.write_text("frobnicate 3\n")
    code, _, err = run(capsys, "validate", str(path))
    assert code == 2 and "error" in err


def test_missing_file_is_error(capsys):
    code, _, err = run(capsys, "validate", "no_such_file.mtl")
    assert code == 2


# ---------------------------------------------------------------- pipeline


def test_iso_self(capsys, data_dir):
    code, out, _ = run(capsys, "iso", data(data_dir, "l3.mtl"),
                       data(data_dir, "l3.mtl"))
    assert code == 0 and "isomorphic" in out


def test_iso_negative(capsys, data_dir):
    code, out, _ = run(capsys, "iso", data(data_dir, "l3.mtl"),
                       data(data_dir, "g3.mtl"))
    assert code == 1 and "not isomorphic" in out


def test_roundtrip_w_reports_witness(capsys, data_dir):
    code, out, _ = run(capsys, "--json", "roundtrip", data(data_dir, "W.mtl"))
    assert code == 1
    report = json.loads(out)
    assert report["representable"] is False
    assert report["witness"] == [2, 1]
    assert report["size"] == 4 and report["hg_size"] == 3
    assert report["iso"] is False


def test_roundtrip_representable(capsys, data_dir):
    code, out, _ = run(capsys, "--json", "roundtrip", data(data_dir, "g3.mtl"))
    assert code == 0
    report = json.loads(out)
    assert report["representable"] is True and report["iso"] is True


def test_kbuild_example8(capsys, data_dir):
    code, out, _ = run(capsys, "kbuild", data(data_dir, "example8.lforest"))
    assert code == 0
    assert "[l(a) ⊕ (l(c) ⊕ (l(g) × l(h)))] × [l(b) ⊕ (l(d) × l(e) × l(f))]" in out
    assert "n 54" in out


def test_decompose_and_reconstruct(capsys, data_dir, tmp_path):
    code, out, _ = run(capsys, "decompose", data(data_dir, "W.mtl"))
    assert code == 0 and "label 0 = L2" in out and "label 1 = L2" in out

    code, out, _ = run(capsys, "reconstruct", data(data_dir, "example8.lforest"))
    assert code == 0
    alg = parse_mtl(out)
    assert alg.n == 54


def test_reconstruct_equals_kbuild_result(capsys, data_dir):
    _, out_r, _ = run(capsys, "reconstruct", data(data_dir, "example8.lforest"))
    _, out_k, _ = run(capsys, "--json", "kbuild", data(data_dir, "example8.lforest"))
    a = parse_mtl(out_r)
    b = parse_mtl(json.loads(out_k)["mtl"])
    assert find_isomorphism(a, b) is not None


def test_sheaf_check(capsys, tmp_path):
    path = tmp_path / "v.lforest"
    path.write_text("nodes 3\nedge 0 1\nedge 0 2\n"
                    "label 0 = L2\nlabel 1 = L3\nlabel 2 = L2\n")
    code, out, _ = run(capsys, "--json", "sheaf-check", str(path))
    assert code == 0
    report = json.loads(out)
    assert report["failures"] == []
    assert len(report["downsets"]) == 5  # ∅, {r}, {r,x}, {r,y}, all
    assert all(s["chain"] for s in report["stalks"])


def test_enumerate_archimedean(capsys):
    code, out, _ = run(capsys, "--max-size", "4", "enumerate-archimedean")
    assert code == 0
    assert "size 2: 1" in out and "size 3: 1" in out and "size 4: 2" in out


def test_enumerate_archimedean_cap_is_error(capsys):
    code, _, err = run(capsys, "--max-size", "9", "enumerate-archimedean")
    assert code == 2


def test_max_size_guard(capsys, tmp_path, data_dir):
    code, _, err = run(capsys, "--max-size", "2", "iso",
                       data(data_dir, "l3.mtl"), data(data_dir, "l3.mtl"))
    assert code == 2 and "max-size" in err


def test_corpus_writes_files(capsys, tmp_path):
    out_dir = tmp_path / "corpus"
    code, out, _ = run(capsys, "--json", "corpus", "--out", str(out_dir))
    assert code == 0
    report = json.loads(out)
    assert report["files"] > 100
    names = os.listdir(out_dir)
    assert any(n.endswith(".mtl") for n in names)
    assert any(n.endswith(".lforest") for n in names)


# ---------------------------------------------------------------- serialization


def test_serialization_round_trips(data_dir):
    for name in ("l3.mtl", "g3.mtl", "W.mtl", "bool2.mtl"):
        with open(data(data_dir, name)) as fh:
            text = fh.read()
        alg = parse_mtl(text)
        assert write_mtl(alg) == text  # canonical files are byte-stable
        assert parse_mtl(write_mtl(alg)) == alg
