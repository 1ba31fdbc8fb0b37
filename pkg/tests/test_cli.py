import json

import pytest

from equiburn.cli import main


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


Z5 = {"type": "abelian", "orders": [5]}
P1_W1 = {"schema": 1, "pspace": {"group": Z5, "weights": [[0], [1]]}}
P1_W2 = {"schema": 1, "pspace": {"group": Z5, "weights": [[0], [2]]}}
P1_W1_NEG = {"schema": 1, "pspace": {"group": Z5, "weights": [[0], [4]]}}


def test_present_text(tmp_path, capsys):
    g = write(tmp_path, "g.json", Z5)
    code, out, _ = run(capsys, "--format", "text", "present", "--group", g, "--n", "1", "--flavor", "b")
    assert code == 0
    assert out.splitlines()[0] == "free_rank: 4, torsion: [], basis: 4, relations: 0"

    g2 = write(tmp_path, "g2.json", {"type": "abelian", "orders": [2]})
    code, out, _ = run(capsys, "--format", "text", "present", "--group", g2, "--n", "2", "--flavor", "b")
    assert code == 0
    assert out.startswith("free_rank: 0, torsion: []")


def test_present_malformed_orders(tmp_path, capsys):
    g = write(tmp_path, "bad.json", {"type": "abelian", "orders": [3, 2]})
    code, out, err = run(capsys, "present", "--group", g, "--n", "1", "--flavor", "b")
    assert code == 2
    assert "error:" in err


def test_present_cache_and_determinism(tmp_path, capsys):
    g = write(tmp_path, "g.json", Z5)
    cache = str(tmp_path / "cache")
    code, out1, _ = run(
        capsys, "--cache", cache, "present", "--group", g, "--n", "2", "--flavor", "b"
    )
    assert code == 0
    code, out2, _ = run(
        capsys, "--cache", cache, "present", "--group", g, "--n", "2", "--flavor", "b"
    )
    assert code == 0
    assert out1 == out2  # byte-identical reruns, second served from cache


def test_class_frozen(tmp_path, capsys):
    a = write(tmp_path, "a.json", P1_W1)
    code, out, _ = run(capsys, "--format", "text", "class", "--action", a)
    assert code == 0
    assert out.strip() == "[(1)] + [(4)]"

    a2 = write(tmp_path, "a2.json", {"schema": 1, "pspace": {"group": {"type": "abelian", "orders": [2]}, "weights": [[0], [1]]}})
    code, out, _ = run(capsys, "--format", "text", "class", "--action", a2)
    assert code == 0
    assert out.strip() == "2·[(1)]"

    bad = write(tmp_path, "bad.json", {"schema": 1, "pspace": {"group": Z5, "weights": [[0], [0]]}})
    code, out, err = run(capsys, "class", "--action", bad)
    assert code == 2 and "error:" in err


def test_eq_exit_codes(tmp_path, capsys):
    g = write(tmp_path, "g.json", Z5)
    a1 = write(tmp_path, "a1.json", P1_W1)
    a2 = write(tmp_path, "a2.json", P1_W2)
    a3 = write(tmp_path, "a3.json", P1_W1_NEG)

    def class_file(action_path, name):
        code, out, _ = run(capsys, "class", "--action", action_path)
        assert code == 0
        path = tmp_path / name
        path.write_text(out)
        return str(path)

    c1 = class_file(a1, "c1.json")
    c2 = class_file(a2, "c2.json")
    c3 = class_file(a3, "c3.json")

    code, out, _ = run(
        capsys, "eq", "--group", g, "--n", "1", "--flavor", "b", "--lhs", c1, "--rhs", c2
    )
    assert code == 1
    payload = json.loads(out)
    assert payload["verdict"] == "distinct"
    assert payload["certificate"]["snf_image"]

    code, out, _ = run(
        capsys, "eq", "--group", g, "--n", "1", "--flavor", "b", "--lhs", c1, "--rhs", c3
    )
    assert code == 0
    assert json.loads(out)["verdict"] == "equal"

    code, out, _ = run(
        capsys, "eq", "--group", g, "--n", "1", "--flavor", "b", "--lhs", c1, "--rhs", c1
    )
    assert code == 0


def test_blowup(tmp_path, capsys):
    act = {"schema": 1, "pspace": {"group": Z5, "weights": [[0], [1], [3]]}}
    a = write(tmp_path, "a.json", act)
    code, out, _ = run(capsys, "blowup", "--action", a, "--cone", "0,1")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "equal"
    assert len(payload["action"]["fan"]["rays"]) == 4

    code, _, err = run(capsys, "blowup", "--action", a, "--cone", "0,9")
    assert code == 2

    p1 = write(tmp_path, "p1.json", P1_W1)
    code, _, err = run(capsys, "blowup", "--action", p1, "--cone", "0")
    assert code == 2


def test_det(tmp_path, capsys):
    act = {
        "schema": 1,
        "pspace": {
            "group": {"type": "abelian", "orders": [5, 5]},
            "weights": [[0, 0], [1, 0], [0, 1]],
        },
    }
    a = write(tmp_path, "a.json", act)
    code, out, _ = run(capsys, "det", "--action", a)
    assert code == 0
    payload = json.loads(out)
    assert payload["sign_classes"] == ["{1,4}"]
    assert payload["consistent"]


def test_vanish(tmp_path, capsys):
    s = write(
        tmp_path,
        "s.json",
        {"flavor": "b", "group": Z5, "n": 2, "beta": [[1], [4]]},
    )
    code, out, _ = run(capsys, "--format", "text", "vanish", "--symbol", s)
    assert code == 0
    assert out.strip() == "contains_zero: false, sumzero: true"

    ks = write(
        tmp_path,
        "ks.json",
        {
            "flavor": "k",
            "group": {"type": "abelian", "orders": [2]},
            "n": 3,
            "H": [[0], [1]],
            "Y": [[0]],
            "beta": [[0, 1], [0, 1]],
            "field": {"label": "k(F)", "trdeg": 1, "params": 1},
        },
    )
    code, out, _ = run(capsys, "vanish", "--symbol", ks)
    assert code == 0
    payload = json.loads(out)
    assert payload["stable_range"] is True


def test_compress(tmp_path, capsys):
    s = write(
        tmp_path,
        "s.json",
        {
            "flavor": "c",
            "group": {"type": "abelian", "orders": [2]},
            "n": 2,
            "H": [[0], [1]],
            "Y": [[0]],
            "beta": [[0, 1]],
        },
    )
    code, out, _ = run(capsys, "compress", "--symbol", s)
    assert code == 0
    payload = json.loads(out)
    assert len(payload["witnesses"]) == 1
    assert payload["incompressible_combinatorially"] is False
    assert payload["witnesses"][0]["pair"] == [0, 1]


def test_output_byte_identical(tmp_path, capsys):
    a = write(tmp_path, "a.json", {"schema": 1, "pspace": {"group": Z5, "weights": [[0], [1], [3]]}})
    outs = set()
    for _ in range(3):
        code, out, _ = run(capsys, "class", "--action", a)
        assert code == 0
        outs.add(out)
    assert len(outs) == 1
