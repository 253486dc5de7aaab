import json

import numpy as np
import pytest

from locc23 import io
from locc23.cli import main
from locc23.families import Thm7Params, thm7_paper_params
from locc23.protocol import verify_perfect_discrimination
from locc23.search import random_orthogonal_set


def test_state_set_roundtrip(tmp_path, fixtures):
    f = fixtures["thm5"]
    path = tmp_path / "s.json"
    io.save_state_set(path, f.states)
    back = io.load_state_set(path)
    assert np.max(np.abs(back.states - f.states.states)) < 1e-12


def test_protocol_roundtrip(tmp_path, fixtures):
    f = fixtures["thm7"]
    path = tmp_path / "p.json"
    io.save_protocol(path, f.protocol)
    back = io.load_protocol(path)
    assert verify_perfect_discrimination(back, f.states).perfect
    assert io.protocol_to_dict(back) == io.protocol_to_dict(f.protocol)


def test_params_roundtrip():
    p = thm7_paper_params()
    q = io.params_from_dict(Thm7Params, json.loads(json.dumps(io.params_to_dict(p))))
    assert np.allclose(q.a, p.a) and q.alpha == p.alpha


@pytest.mark.parametrize("payload,where", [
    ({"dims": [2, 3]}, "$"),
    ({"dims": [2, 3], "states": [[[[1, 0]]]]}, "$.states[0]"),
    ({"dims": [2, 3], "states": [[[[1, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], "x"]]]}, "$.states[0][1][2]"),
])
def test_parse_errors_have_locations(payload, where):
    with pytest.raises(io.FormatError) as e:
        io.state_set_from_dict(payload)
    assert e.value.where == where


def test_protocol_rejects_incomplete_measurement():
    d = {"dims": [2, 3], "root": {"party": "A", "kraus_matrices": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]],
                                  "children": [{"leaf": 0}]}}
    with pytest.raises(io.FormatError, match="not a measurement"):
        io.protocol_from_dict(d)


def run(args, capsys):
    code = main(args)
    return code, capsys.readouterr()


def test_cli_generate_verify_classify(tmp_path, capsys):
    prefix = str(tmp_path / "t5")
    code, out = run(["generate", "thm5", "--paper-example", "--out", prefix], capsys)
    assert code == 0
    code, out = run(["verify", prefix + ".states.json", prefix + ".protocol.json"], capsys)
    assert code == 0 and "perfect discrimination: yes" in out.out
    code, out = run(["validate", prefix + ".states.json"], capsys)
    assert code == 0 and "2 product, 2 entangled" in out.out
    code, out = run(["classify", prefix + ".states.json", "--format", "json"], capsys)
    assert code == 0 and json.loads(out.out)["status"] == "LOCC_ONLY"


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert run(["validate", str(bad)], capsys)[0] == 2
    four = tmp_path / "four.json"
    io.save_state_set(four, random_orthogonal_set(2, 3, 4, "generic", seed=0))
    code, out = run(["classify", str(four)], capsys)
    assert code == 1 and "LOCC_INDISTINGUISHABLE" in out.out
    seven = tmp_path / "seven.json"
    io.save_state_set(seven, random_orthogonal_set(3, 3, 7, "generic", seed=0))
    assert run(["classify", str(seven)], capsys)[0] == 2
    nonorth = tmp_path / "no.json"
    io.write_json(nonorth, {"dims": [2, 3], "states": [io.encode_matrix(np.outer([1, 0], [1, 0, 0]))] * 2})
    code, out = run(["validate", str(nonorth)], capsys)
    assert code == 1 and "0 and 1" in out.out
    assert run(["generate", "thm5"], capsys)[0] == 2
    assert run(["nonsense"], capsys)[0] == 2


def test_cli_wrong_protocol_exits_1(tmp_path, capsys):
    prefix = str(tmp_path / "t6")
    run(["generate", "thm6", "--paper-example", "--out", prefix], capsys)
    d = json.loads(open(prefix + ".protocol.json").read())
    first = d["root"]["children"][0]
    while "leaf" not in first:
        first = first["children"][0]
    first["leaf"] = 3 if first["leaf"] != 3 else 2
    io.write_json(prefix + ".protocol.json", d)
    code, out = run(["verify", prefix + ".states.json", prefix + ".protocol.json"], capsys)
    assert code == 1 and "no (leaf" in out.out


def test_cli_constraint_violation_exit_1(tmp_path, capsys):
    params = json.dumps({"a1": 1, "b1": 1, "c1": 1, "d1": -1, "a2": -1, "b2": 1, "c2": 1, "d2": 1,
                         "alpha": [[0, 0], [1, 0]]})
    code, out = run(["generate", "thm5", "--params", params, "--out", str(tmp_path / "x")], capsys)
    assert code == 1 and "k" in out.err


def test_cli_multiround_and_rounds_search(tmp_path, capsys):
    prefix = str(tmp_path / "mr")
    code, out = run(["generate", "multiround", "--n", "2", "--out", prefix], capsys)
    assert code == 0 and "3 states, 2-round" in out.out
    code, _ = run(["search", prefix + ".states.json", "--mode", "rounds", "--max-rounds", "1"], capsys)
    assert code == 1
    code, _ = run(["search", prefix + ".states.json", "--mode", "rounds", "--max-rounds", "2"], capsys)
    assert code == 0


def test_cli_generated_files_roundtrip(tmp_path, capsys):
    prefix = str(tmp_path / "r7")
    assert run(["generate", "thm7", "--random", "--seed", "7", "--out", prefix], capsys)[0] == 0
    from locc23.families import gen_thm7_family, sample_thm7_params

    states, _ = gen_thm7_family(sample_thm7_params(np.random.default_rng(7)))
    back = io.load_state_set(prefix + ".states.json")
    assert np.max(np.abs(back.states - states.states)) < 1e-12
