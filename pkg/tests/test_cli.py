import time

import pytest

from pdaproc import repro
from pdaproc.cli import run
from pdaproc.parser import parse_aut, parse_pda, parse_spec

C = "corpus:"


def test_bisim_counter(capsys):
    assert run(["bisim", "k", C + "counter.pspec", C + "counter.pda", "--depth", "12"]) == 0
    assert "equivalent up to depth 12" in capsys.readouterr().out


def test_check_guarded(capsys):
    assert run(["check-guarded", C + "unguarded.pspec"]) == 1
    assert "[X]" in capsys.readouterr().out
    assert run(["check-guarded", C + "counter.pspec"]) == 0


def test_unguarded_input_elsewhere(capsys):
    assert run(["lts", C + "unguarded_seqc.pspec"]) == 1
    assert "[X]" in capsys.readouterr().err


def test_repro_fig9_matches_golden(capsys):
    assert run(["repro", "fig9"]) == 0
    assert capsys.readouterr().out == repro.golden("fig9")


def test_all_repro_targets_match_goldens_quickly(capsys):
    start = time.perf_counter()
    assert run(["repro", "all", "--check"]) == 0
    assert time.perf_counter() - start < 60
    assert capsys.readouterr().err == ""


def test_usage_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as e:
        run(["frobnicate"])
    assert e.value.code == 2
    assert run(["lts", str(tmp_path / "missing.pspec")]) == 2
    bad = tmp_path / "bad.pspec"
    bad.write_text("spec s { init X; X = a. }")
    assert run(["lts", str(bad)]) == 2
    assert "1:" in capsys.readouterr().err
    assert run(["repro", "fig99"]) == 2
    assert run(["convert", "onestate", C + "counter.pspec"]) == 2


@pytest.mark.parametrize("fmt", ["aut", "dot", "text"])
def test_lts_formats(capsys, tmp_path, fmt):
    out = tmp_path / f"g.{fmt}"
    assert run(["lts", C + "counter.pda", "--depth", "3", "--format", fmt, "--out", str(out)]) == 0
    text = out.read_text()
    if fmt == "aut":
        assert parse_aut(text).n_states == 4
    else:
        assert text.strip()


def test_convert_commands(capsys):
    assert run(["convert", "onestate", C + "counter.pda"]) == 0
    assert list(parse_spec(capsys.readouterr().out).idents) == ["X", "X_1"]
    assert run(["convert", "to-pda", C + "fig9.pspec"]) == 0
    assert len(parse_pda(capsys.readouterr().out).states) == 2
    assert run(["convert", "to-signal-spec", C + "fig7.pda"]) == 0
    assert parse_spec(capsys.readouterr().out).vars == ("state_up", "state_down")
    assert run(["convert", "signal-to-pda", C + "cointoss.pspec"]) == 0
    assert parse_pda(capsys.readouterr().out).finals


def test_witness_round_trip(capsys, tmp_path):
    w = tmp_path / "w.json"
    assert run(["bisim", "k", C + "fig9.pspec", C + "counter.pspec", "--depth", "6", "--witness-out", str(w)]) == 1
    assert "witness replay: ok" in capsys.readouterr().out
    assert run(["bisim", "replay", C + "fig9.pspec", C + "counter.pspec", str(w), "--depth", "6"]) == 1
    assert run(["bisim", "replay", C + "counter.pspec", C + "counter.pda", str(w), "--depth", "6"]) == 2


def test_stateless_and_minimize(capsys):
    assert run(["bisim", "stateless", "[P] -> a.1", "[P] -> b.1", "--vars", "P"]) == 1
    assert run(["bisim", "stateless", "1;a.1", "a.1"]) == 0
    assert run(["bisim", "minimize", C + "cointoss.pspec", "--format", "text"]) == 0
    assert run(["bisim", "minimize", C + "counter.pda"]) == 2


def test_normal_forms_and_hnf(capsys):
    assert run(["separate", C + "nonseparation.pspec"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("// P_sep = {Y}") and "Y#dag" in parse_spec(out).idents
    assert run(["gnf", C + "fig9.pspec"]) == 0
    assert run(["aignf", C + "nonseparation.pspec"]) == 0
    capsys.readouterr()
    assert run(["hnf", C + "fig9.pspec", "--expr", "X;Y", "--trace"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1] == "a.(X;Y;Y) + b.Y"
    assert any(ln.startswith("hnf-seqc [") and " at root: " in ln for ln in lines)


def test_axioms(capsys):
    assert run(["axioms", "list", "--mode", "seq"]) == 0
    assert capsys.readouterr().out.splitlines()[3].startswith("A4")
    assert run(["axioms", "soundness", "--axiom", "A9", "--n", "20"]) == 0
    assert "20/20 pass" in capsys.readouterr().out
    assert run(["axioms", "soundness", "--axiom", "A4", "--n", "100", "--allow-unsound"]) == 1
    assert run(["axioms", "soundness", "--axiom", "A4"]) == 2
