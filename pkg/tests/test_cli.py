"""Command line interface: file formats, subcommands, exit codes."""

import contextlib
import io
import os
import subprocess
import sys

import pytest

from laddermod import Matrix, QQ
from laddermod.cli import (
    MorphismDoc,
    ParseError,
    main,
    parse_module_text,
    parse_morphism_text,
    print_module,
    print_morphism,
)


def run_cli(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def data(data_dir, name):
    return os.path.join(data_dir, name)


def test_module_round_trip(running):
    text = print_module(running.V)
    assert parse_module_text(text) == running.V
    assert print_module(parse_module_text(text)) == text


def test_morphism_round_trip(running):
    text = print_morphism(running.doc)
    doc2 = parse_morphism_text(text)
    assert doc2 == running.doc
    assert print_morphism(doc2) == text


def test_golden_corpus_is_canonical(data_dir):
    for name in sorted(os.listdir(data_dir)):
        path = os.path.join(data_dir, name)
        with open(path) as f:
            text = f.read()
        if text.startswith("morphism"):
            assert print_morphism(parse_morphism_text(text)) == text, name
        else:
            assert print_module(parse_module_text(text)) == text, name


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as exc:
        parse_module_text("module\ndims 1 2\nmap 1\n1 2 3\n")
    assert exc.value.lineno == 4
    with pytest.raises(ParseError):
        parse_module_text("module\nfield rational\n")
    with pytest.raises(ParseError):
        parse_morphism_text("morphism\ndelta 0\n")


def test_zero_dimension_maps_round_trip():
    # map 1 is 0x1 (no row lines at all); map 2 is 1x0 (one blank row line)
    good = "module\nfield rational\ndims 1 0 1\nmap 1\nmap 2\n\n"
    m = parse_module_text(good)
    assert m.dims == (1, 0, 1)
    assert print_module(m) == good
    # a row with the wrong number of entries is rejected
    with pytest.raises(ParseError):
        parse_module_text("module\nfield rational\ndims 1 0 1\nmap 1\nmap 2\n0\n")


def test_barcode_command(data_dir):
    code, out = run_cli("barcode", data(data_dir, "V.txt"))
    assert code == 0
    assert out == "[0,4] [1,7] [4,4]\n"


def test_barcode_diagram_and_svg(data_dir, tmp_path):
    svg_path = str(tmp_path / "V.svg")
    code, out = run_cli("barcode", data(data_dir, "V.txt"), "--diagram", "--svg", svg_path)
    assert code == 0
    assert "#####...  [0,4]" in out
    assert "wrote" in out
    with open(svg_path) as f:
        svg = f.read()
    assert svg.startswith("<?xml")
    assert "<svg" in svg and "</svg>" in svg


def test_decompose_command(data_dir):
    code, out = run_cli("decompose", data(data_dir, "run.txt"))
    assert code == 0
    assert "nestedness domain Xi=3" in out
    assert "nestedness codomain Xi=inf" in out
    assert "precondition 2*delta=2 < min(Xi): ok" in out
    assert "certified 1-interleaving: yes" in out
    assert "summands: R [0,4]->[0,4], R [1,7]->[0,5], I+ [4,4]" in out


def test_decompose_pivot_rule_flag(data_dir):
    code, out = run_cli("decompose", data(data_dir, "run.txt"), "--pivot-rule", "last")
    assert code == 0
    assert "summands: R [0,4]->[0,4], R [1,7]->[0,5], I+ [4,4]" in out


def test_decompose_counterexample_exits_2(data_dir):
    code, out = run_cli("decompose", data(data_dir, "cex.txt"))
    assert code == 2
    assert "stuck at entry" in out
    assert "exhaustive search: 3 states explored, exhausted=True" in out
    assert "matching form found: False" in out


def test_decompose_coarse(data_dir):
    code, out = run_cli("decompose", data(data_dir, "run.txt"), "--q", "2", "--variant", "both")
    assert code == 0
    assert "coarse variant=both q=2 delta=1 bound=2" in out
    assert "inequality 2*delta+q < min(Xi): ok" in out
    assert "summands: R [0,4]->[0,4], R [1,7]->[0,5]" in out


def test_match_command(data_dir):
    code, out = run_cli("match", data(data_dir, "run.txt"))
    assert code == 0
    assert "pair [0,4] -> [1,5] x1" in out
    assert "pair [1,7] -> [1,6] x1" in out
    assert "unmatched source [4,4] x1" in out
    assert "cost 1" in out


def test_match_methods_agree_on_running(data_dir):
    code, out = run_cli("match", data(data_dir, "run.txt"), "--compare")
    assert code == 0
    assert "methods agree" in out


def test_match_methods_differ_on_bl(data_dir):
    code_phi, out_phi = run_cli("match", data(data_dir, "bl_phi.txt"), "--compare")
    code_psi, out_psi = run_cli("match", data(data_dir, "bl_psi.txt"), "--compare")
    assert code_phi == 0 and code_psi == 0
    assert "methods agree" in out_phi
    assert "methods differ" in out_psi


def test_verify_command(data_dir):
    code, out = run_cli("verify", data(data_dir, "run.txt"), "--delta", "1")
    assert code == 0
    assert "domain triangles: pass" in out
    assert "codomain triangles: pass" in out
    assert "certified 1-interleaving" in out


def test_verify_failure_exits_2(data_dir):
    code, out = run_cli("verify", data(data_dir, "run.txt"), "--delta", "0")
    assert code == 2
    assert "FAIL" in out


def test_verify_scan(data_dir):
    code, out = run_cli("verify", data(data_dir, "run.txt"), "--scan-delta-max", "3")
    assert code == 0
    assert "smallest certified delta: 1" in out
    code, out = run_cli("verify", data(data_dir, "id.txt"), "--scan-delta-max", "3")
    assert code == 0
    assert "smallest certified delta: 0" in out


def test_match_identity_cost_zero(data_dir):
    code, out = run_cli("match", data(data_dir, "id.txt"))
    assert code == 0
    assert "cost 0" in out


def test_missing_file_exits_1(tmp_path):
    code = main(["barcode", str(tmp_path / "absent.txt")])
    assert code == 1


def test_bad_arguments_exit_1():
    # argparse failures leave through SystemExit, remapped to status 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_console_script_and_module_entry(data_dir, tmp_path):
    r = subprocess.run(
        ["laddermod", "barcode", data(data_dir, "V.txt")],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0
    assert r.stdout == "[0,4] [1,7] [4,4]\n"
    r = subprocess.run(
        [sys.executable, "-m", "laddermod.cli", "decompose", data(data_dir, "cex.txt")],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 2

    bad = tmp_path / "bad.txt"
    bad.write_text("module\ndims 1 2\nmap 1\n1 2 3\n")
    r = subprocess.run(
        ["laddermod", "barcode", str(bad)], capture_output=True, text=True
    )
    assert r.returncode == 1
    assert "line" in r.stderr


def test_field_env_default(data_dir, tmp_path):
    with open(data(data_dir, "V.txt")) as f:
        text = f.read()
    nofield = tmp_path / "nofield.txt"
    nofield.write_text(text.replace("field rational\n", ""))
    env = dict(os.environ, LADDERMOD_FIELD="prime 5")
    r = subprocess.run(
        ["laddermod", "barcode", str(nofield)], capture_output=True, text=True, env=env
    )
    assert r.returncode == 0
    assert r.stdout == "[0,4] [1,7] [4,4]\n"
    env = dict(os.environ, LADDERMOD_FIELD="prime 4")
    r = subprocess.run(
        ["laddermod", "barcode", str(nofield)], capture_output=True, text=True, env=env
    )
    assert r.returncode == 1


def test_prime_field_file_round_trip(data_dir):
    code, out = run_cli("barcode", data(data_dir, "mod5.txt"))
    assert code == 0
    assert out == "[0,3] [1,5] [2,2]\n"


def test_inverse_file_flag(running, data_dir, tmp_path):
    # split the running pair into two files: phi-only and psi-as-its-own-doc
    phi_only = MorphismDoc(running.V, running.W, 1, running.phi.comps, ())
    psi_only = MorphismDoc(running.W, running.V, 1, running.psi.comps, ())
    fa = tmp_path / "phi.txt"
    fb = tmp_path / "psi.txt"
    fa.write_text(print_morphism(phi_only))
    fb.write_text(print_morphism(psi_only))
    code, out = run_cli("verify", str(fa), "--delta", "1", "--inverse", str(fb))
    assert code == 0
    assert "certified 1-interleaving" in out
    code, out = run_cli("decompose", str(fa), "--inverse", str(fb))
    assert code == 0
    assert "certified 1-interleaving: yes" in out


def test_verify_without_inverse_exits_1(running, tmp_path):
    phi_only = MorphismDoc(running.V, running.W, 1, running.phi.comps, ())
    f = tmp_path / "phi.txt"
    f.write_text(print_morphism(phi_only))
    code = main(["verify", str(f), "--delta", "1"])
    assert code == 1
