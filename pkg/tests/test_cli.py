import json
import math
import random
import re
from pathlib import Path

import pytest

from xordgames.cli import run
from xordgames.equivalence import random_equivalent
from xordgames.game import LabeledGameGraph, complete_pairs, parse_game, read_game, write_game
from xordgames.sdp import load_sdp, solve

GAMES = Path(__file__).resolve().parents[1] / "games"


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_perms(capsys):
    code, out, _ = call(capsys, "perms", 3)
    assert code == 0
    assert "P1: ok, P2: ok" in out
    assert len(re.findall(r"^pi_\d", out, re.M)) == 3


def test_classical_c5(capsys):
    code, out, _ = call(capsys, "classical", GAMES / "c5_dashed.game")
    assert code == 0
    assert out.splitlines()[0] == "beta_c=1 gamma_c=4 omega_c=0.8"


def test_aq_chsh(capsys):
    code, out, _ = call(capsys, "aq", GAMES / "chsh.game")
    assert code == 0
    m = re.match(r"gamma_aq=3\.41421 gap=(\S+)$", out.splitlines()[0])
    assert m and float(m.group(1)) < 1e-7


def test_json_matches_text(capsys):
    _, text, _ = call(capsys, "aq", GAMES / "k5_dashed.game", "--precision", 17)
    _, js, _ = call(capsys, "aq", GAMES / "k5_dashed.game", "--format", "json")
    val = float(re.search(r"gamma_aq=(\S+)", text).group(1))
    doc = json.loads(js)
    assert abs(doc["values"]["gamma_aq"] - val) < 1e-12
    assert doc["solver"]["status"] == "Optimal" and doc["solver"]["iters"] > 0
    assert set(doc) == {"game", "values", "solver", "verdicts"}


def test_tsv_format(capsys):
    code, out, _ = call(capsys, "classical", GAMES / "k5_dashed.game", "--format", "tsv")
    head, vals = out.strip().split("\n")
    assert dict(zip(head.split("\t"), vals.split("\t")))["beta_c"] == "4"


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.game"
    bad.write_text("xordgame 2 3\nedge 0 1 7\n")
    code, _, err = call(capsys, "classical", bad)
    assert code == 2
    assert "line 2, column 10" in err


def test_missing_file_and_bad_verb(capsys):
    assert call(capsys, "classical", "/nonexistent.game")[0] == 2
    assert call(capsys, "frobnicate")[0] == 2


def test_resource_limit_exit(capsys, tmp_path):
    p = tmp_path / "big.game"
    write_game(LabeledGameGraph.single_color(23, complete_pairs(23)), p)
    assert call(capsys, "classical", p)[0] == 3


def test_nonconvergence_exit(capsys):
    code, out, err = call(capsys, "aq", GAMES / "k5_dashed.game", "--max-iter", 2)
    assert code == 4
    assert "gamma_aq=" in out and "MaxIterations" in out


def test_kg_roundtrip(capsys):
    code, out, _ = call(capsys, "kg", GAMES / "chsh.game")
    kg = parse_game(out)
    assert code == 0 and kg.d == 1 and kg.n == 8 and len(kg.edges) == 8


def test_canon_and_equiv(capsys, tmp_path):
    src = GAMES / "k33_xor3_beta2.game"
    h = random_equivalent(read_game(src), random.Random(5), scale=True)
    write_game(h, tmp_path / "h.game")
    _, c1, _ = call(capsys, "canon", src)
    _, c2, _ = call(capsys, "canon", tmp_path / "h.game")
    assert c1 == c2 and re.fullmatch(r"[0-9a-f]+\n", c1)
    code, out, _ = call(capsys, "equiv", src, tmp_path / "h.game")
    assert code == 0 and out.startswith("equivalent: yes") and "switches:" in out
    _, out, _ = call(capsys, "equiv", src, GAMES / "k33_xor3_beta1.game")
    assert out.strip() == "equivalent: no"


def test_cycles_and_bipartize(capsys):
    code, out, _ = call(capsys, "cycles", GAMES / "c5_dashed.game")
    assert code == 0 and "xi_good=0 xi_bad=1 xi_ugly=0" in out
    code, out, _ = call(capsys, "bipartize", GAMES / "k5_dashed.game")
    assert code == 0 and out.startswith("beta2=4")
    assert call(capsys, "bipartize", GAMES / "chsh.game")[0] == 2


def test_theta_and_dump(capsys, tmp_path):
    dump = tmp_path / "t.sdp"
    code, out, _ = call(capsys, "theta", GAMES / "c5_dashed.game", "--dump-sdp", dump)
    assert code == 0
    theta = float(re.search(r"theta=(\S+)", out).group(1))
    assert abs(theta - 2 * math.sqrt(5)) < 1e-4
    assert abs(solve(load_sdp(dump.read_text())).dual_value - theta) < 1e-4


def test_sdp_dump_verb(capsys, tmp_path):
    code, out, _ = call(capsys, "sdp-dump", GAMES / "chsh.game", "--kind", "aq", "--out", tmp_path / "a.sdp")
    assert code == 0 and "dim=9" in out
    p = load_sdp((tmp_path / "a.sdp").read_text())
    assert p.dim == 9


def test_screen(capsys):
    code, out, _ = call(capsys, "screen", GAMES / "chained3.game")
    assert code == 0 and "verdict: no pseudo-telepathy, certified numerically" in out


def test_survey_verb(capsys, tmp_path):
    out_file = tmp_path / "s.tsv"
    code, out, err = call(capsys, "survey", "--n", 5, "--out", out_file)
    assert code == 0 and "estimate:" in err
    assert "gamma_aq > gamma_c: 2" in out
    lines = out_file.read_text().splitlines()
    assert lines[0].split("\t") == ["canonical_id", "n", "edges", "bipartite", "beta_c", "gamma_c",
                                    "gamma_aq", "theta", "flags"]
    assert len(lines) == 12
    code, _, err = call(capsys, "survey", "--n", 6, "--max-sdps", 3)
    assert code == 3


@pytest.mark.parametrize("name", sorted(p.name for p in GAMES.glob("*.game")))
def test_corpus_parses(name):
    g = read_game(GAMES / name)
    assert g.colored_edge_count > 0
