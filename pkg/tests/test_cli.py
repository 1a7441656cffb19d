import json

from reebforge.cli import main

MINIMAL = {"vertices": [{"id": "a", "value": "0/1"},
                        {"id": "b", "value": "1/1"}],
           "edges": [{"u": "a", "v": "b", "r": 0}]}

THETA = {"vertices": [{"id": "a", "value": "0/1"},
                      {"id": "b", "value": "1/1"}],
         "edges": [{"u": "a", "v": "b", "r": -1},
                   {"u": "a", "v": "b", "r": -1}]}

ODD_LEAF = {"vertices": [{"id": "a", "value": "0/1"},
                         {"id": "b", "value": "1/1"}],
            "edges": [{"u": "a", "v": "b", "r": -1}]}


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_check_accepts_theta(tmp_path):
    assert main(["check", write(tmp_path, "g.json", THETA)]) == 0


def test_check_rejects_odd_leaf(tmp_path, capsys):
    rc = main(["check", write(tmp_path, "g.json", ODD_LEAF)])
    assert rc == 1
    out = capsys.readouterr().out
    assert "a" in out and "FAIL" in out


def test_check_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{oops")
    assert main(["check", str(p)]) == 2


def test_build_writes_manifold(tmp_path, capsys):
    out = tmp_path / "m.json"
    rc = main(["build", write(tmp_path, "g.json", MINIMAL),
               "--out", str(out)])
    assert rc == 0
    assert "tetrahedra" in capsys.readouterr().out
    doc = json.loads(out.read_text())
    assert len(doc["tetrahedra"]) < 10_000


def test_build_rejected_graph_writes_nothing(tmp_path):
    out = tmp_path / "m.json"
    rc = main(["build", write(tmp_path, "g.json", ODD_LEAF),
               "--out", str(out)])
    assert rc == 1
    assert not out.exists()


def test_verify_round_trip(tmp_path):
    assert main(["verify", write(tmp_path, "g.json", MINIMAL)]) == 0


def test_verify_mislabel_hook(tmp_path, capsys):
    rc = main(["verify", write(tmp_path, "g.json", MINIMAL),
               "--debug-mislabel-edge", "0"])
    assert rc == 3
    assert "failed" in capsys.readouterr().err


def test_extract_from_built_manifold(tmp_path, capsys):
    mpath = tmp_path / "m.json"
    main(["build", write(tmp_path, "g.json", THETA), "--out", str(mpath)])
    gpath = tmp_path / "r.json"
    rc = main(["extract", str(mpath), "--out", str(gpath)])
    assert rc == 0
    doc = json.loads(gpath.read_text())
    assert len(doc["vertices"]) == 2
    assert sorted(e["r"] for e in doc["edges"]) == [-1, -1]


def test_extract_dot(tmp_path, capsys):
    mpath = tmp_path / "m.json"
    main(["build", write(tmp_path, "g.json", MINIMAL), "--out", str(mpath)])
    rc = main(["extract", str(mpath), "--dot"])
    assert rc == 0
    assert "graph R {" in capsys.readouterr().out


def test_surface_gen_and_classify(tmp_path, capsys):
    mesh = tmp_path / "klein.json"
    assert main(["surface", "gen", "-2", "1", "--out", str(mesh)]) == 0
    rc = main(["surface", "classify", str(mesh)])
    assert rc == 0
    assert "r=-2" in capsys.readouterr().out


def test_surface_gen_off(tmp_path):
    mesh = tmp_path / "s.off"
    assert main(["surface", "gen", "3", "2", "--off",
                 "--out", str(mesh)]) == 0
    assert mesh.read_text().startswith("OFF")


def test_surface_classify_rejects_nonmanifold(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "vertices": [0, 1, 2, 3, 4],
        "triangles": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3],
                      [0, 1, 4]],
    }))
    rc = main(["surface", "classify", str(bad)])
    assert rc == 1
    assert "3 triangles" in capsys.readouterr().err


def test_corpus_writes_files(tmp_path):
    out = tmp_path / "corpus"
    rc = main(["corpus", "--count", "3", "--seed", "7", "--out", str(out)])
    assert rc == 0
    assert len(list(out.glob("ok_*.json"))) == 3
    assert len(list(out.glob("reject_*.json"))) == 3
