import io
import json
import subprocess
import sys

import pytest

from skewbiext import biext, campaigns, cli, mgrp, ore
from skewbiext.gf import make_field

F_BASIC = '{"p":3,"m":1,"terms":[{"e":-1,"c":[2]},{"e":1,"c":[1]}]}'


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out.strip() else None), err


@pytest.mark.parametrize("p,size", [(2, 4), (3, 9), (5, 25)])
def test_example(capsys, p, size):
    code, rep, _ = run_json(capsys, "example", "--p", str(p))
    assert code == 0
    rec = rep["records"][0]
    assert rec["status"] == "pass" and rec["kernel_size"] == size
    assert rec["witt_class"] == "NormForm"
    assert rec["gauss_sum"] == {"conductor": 1, "coeffs": [-p]}
    assert all(rec["checks"].values())
    assert rep["schema"] == "biext-witt/1"


def test_theorem1_odd_dimension(capsys):
    code, rep, _ = run_json(capsys, "verify-theorem1", "--p", "3", "--n", "3", "--trials", "50")
    assert code == 0
    assert rep["summary"] == {"trials": 50, "pass": 50, "fail": 0, "cap": 0}
    assert {r["witt_class"] for r in rep["records"]} == {"NormForm"}
    assert {r["kernel_size"] for r in rep["records"]} <= {9, 81, 729}
    assert rep["config"]["seed"] == 0 and rep["config"]["trials"] == 50


def test_theorem1_even_dimension(capsys):
    code, rep, _ = run_json(capsys, "verify-theorem1", "--p", "3", "--d", "2", "--trials", "20")
    assert code == 0 and rep["summary"]["pass"] == 20
    assert {r["witt_class"] for r in rep["records"]} == {"Zero"}


def test_campaigns_are_deterministic(capsys):
    argv = ["verify-theorem1", "--p", "2", "--n", "2", "--trials", "6", "--seed", "7"]
    _, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    _, out3, _ = run(capsys, *argv, "--jobs", "2")
    assert out1 == out2 == out3
    _, out4, _ = run(capsys, *argv[:-1], "8")
    assert out4 != out1


@pytest.mark.parametrize("d,sign", [(1, -1), (2, 1), (3, -1)])
def test_verify_gauss(capsys, d, sign):
    code, rep, _ = run_json(capsys, "verify-gauss", "--p", "3", "--d", str(d), "--trials", "6")
    assert code == 0
    for r in rep["records"]:
        gs = r["gauss_sum"]
        assert gs["conductor"] == 1
        assert gs["coeffs"][0] == sign * 3 ** (r["log_p_kernel"] // 2)


def test_verify_gauss_p4_value(capsys):
    # find a d = 1 trial with |A| = p^4
    code, rep, _ = run_json(capsys, "verify-gauss", "--p", "3", "--n", "2", "--trials", "8")
    big = [r for r in rep["records"] if r["kernel_size"] == 81]
    assert big and all(r["gauss_sum"]["coeffs"] == [-9] for r in big)


def test_kernel_command(capsys):
    code, rep, _ = run_json(capsys, "kernel", F_BASIC)
    assert code == 0 and rep["kernel_size"] == 9 and rep["witt_class"] == "NormForm"
    elems = [e[0] for e in rep["q"]]
    assert elems == sorted(elems)


def test_kernel_of_matrix_and_zero(capsys):
    f = json.loads(F_BASIC)
    zero = {"p": 3, "m": 1, "terms": []}
    M = {"rows": [[f, zero], [zero, f]]}
    code, rep, _ = run_json(capsys, "kernel", json.dumps(M))
    assert code == 0 and rep["kernel_size"] == 81 and rep["witt_class"] == "Zero"
    code, rep, _ = run_json(capsys, "kernel", json.dumps(zero))
    assert code == 0 and rep["connected"] and rep["kernel_size"] == 1


def test_witt_and_gauss_commands(capsys):
    mg = json.dumps(mgrp.norm_form_group(3).to_json())
    code, rep, _ = run_json(capsys, "witt", mg)
    assert code == 0 and rep["witt_class"] == "NormForm"
    assert rep["exponent_p_class"] == "NormFormClass"
    code, rep, _ = run_json(capsys, "gauss", mg)
    assert code == 0 and rep["value"] == -3 and rep["order"] == 9
    code, rep, _ = run_json(capsys, "witt", json.dumps(mgrp.rank1_form(3, 2).to_json()))
    assert rep["witt_class"] == "Rank1(2)" and rep["exponent_p_class"] is None


def test_descend_command(capsys):
    code, rep, _ = run_json(capsys, "descend", F_BASIC, "[]")
    assert code == 0 and rep["f"] == json.loads(F_BASIC)
    for seed in range(20):
        f = ore.random_skew(make_field(3, 1), 2, seed)
        M = biext.metric_from_skew(f)
        iso = campaigns.isotropic_line(M)
        if iso is not None:
            break
    line = M.element(iso)
    L = {"m": M.kernel_field.N, "elements": [list(line.coeffs)]}
    code, rep, _ = run_json(capsys, "descend", json.dumps(f.to_json()), json.dumps(L))
    assert code == 0 and rep["kernel_size_before"] == 81 and rep["kernel_size_after"] == 9


def test_descend_rejects_non_isotropic(capsys):
    code, _, err = run(capsys, "descend", F_BASIC, "[[1, 0]]")
    assert code == 2 and "error" in err


def test_pullback_command(capsys):
    phi = '{"p":3,"m":1,"terms":[{"e":0,"c":[2]},{"e":1,"c":[1]}]}'
    code, rep, _ = run_json(capsys, "pullback", F_BASIC, phi)
    assert code == 0 and rep["kernel_size"] == 81
    code, rep, _ = run_json(capsys, "pullback", F_BASIC, '{"p":3,"m":1,"terms":[{"e":0,"c":[1]}]}')
    assert rep["f"] == json.loads(F_BASIC)


def test_file_and_stdin_inputs(capsys, tmp_path, monkeypatch):
    path = tmp_path / "f.json"
    path.write_text(F_BASIC)
    code, rep, _ = run_json(capsys, "kernel", str(path))
    assert code == 0 and rep["kernel_size"] == 9
    monkeypatch.setattr(sys, "stdin", io.StringIO(F_BASIC))
    code, rep, _ = run_json(capsys, "kernel", "-")
    assert code == 0 and rep["kernel_size"] == 9


def test_output_file_and_table(capsys, tmp_path):
    out = tmp_path / "rep.json"
    code, text, _ = run(capsys, "verify-theorem1", "--trials", "3", "--table", "--output", str(out))
    assert code == 0
    assert text.splitlines()[-1] == "summary: 3 pass, 0 fail, 0 cap of 3"
    assert json.loads(out.read_text())["summary"]["pass"] == 3


def test_usage_errors(capsys):
    assert run(capsys, "kernel", "not-a-file")[0] == 2
    assert run(capsys, "kernel", "{bad json")[0] == 2
    assert run(capsys, "kernel", '{"p":3,"m":1,"terms":[{"e":1,"c":[1]}]}')[0] == 2  # not skew
    assert run(capsys, "verify-theorem1", "--p", "4")[0] == 2
    assert run(capsys, "verify-theorem1", "--trials", "0")[0] == 2
    assert run(capsys, "witt", '{"p":2,"shape":[2],"q":[[[0],0,0],[[1],1,1]]}')[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2


def test_cap_exit_code(capsys):
    assert run(capsys, "kernel", F_BASIC, "--max-ext", "1")[0] == 3
    code, rep, _ = run_json(capsys, "verify-theorem1", "--d", "2", "--pairs-cap", "10",
                            "--trials", "2")
    assert code == 3 and rep["summary"]["cap"] == 2


def test_assertion_failure_exit_code(capsys, monkeypatch):
    real = mgrp.gauss_sum
    monkeypatch.setattr(mgrp, "gauss_sum", lambda A, cap=None: real(A) + mgrp.CycInt.from_int(A.p, 1))
    code, rep, _ = run_json(capsys, "verify-gauss", "--trials", "2")
    assert code == 1 and rep["summary"]["fail"] == 2
    assert run(capsys, "example")[0] == 1


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "skewbiext", "kernel", F_BASIC, "--table"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "kernel_size: 9" in out.stdout
