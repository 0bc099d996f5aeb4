import json

import pytest

from robustguard.cli import RunConfig, main
from robustguard.geometry import PolygonWithHoles


def run(tmp_path, *argv):
    return main([str(a) for a in argv])


@pytest.fixture
def sq(tmp_path):
    path = tmp_path / "sq.json"
    assert main(["gen", "square", "--out", str(path)]) == 0
    return path


def test_vis_writes_region_and_svg(tmp_path, sq):
    out, svg = tmp_path / "r.json", tmp_path / "out.svg"
    assert run(tmp_path, "vis", "--polygon", sq, "--guard", "0.5,0.5", "--alpha", "0.25",
               "--svg", svg, "--out", out) == 0
    obj = json.loads(out.read_text())
    assert obj["config"]["alpha"] == 0.25
    assert obj["region"]["pieces"]
    assert svg.read_text().startswith("<svg")


def test_guard_then_verify(tmp_path):
    corr, sol = tmp_path / "c.json", tmp_path / "s.json"
    assert run(tmp_path, "gen", "corridor", "--length", 20, "--width", 1, "--out", corr) == 0
    assert run(tmp_path, "guard-polygon", "--polygon", corr, "--alpha", 0.5, "--out", sol) == 0
    assert run(tmp_path, "verify", "--polygon", corr, "--solution", sol, "--density", 80,
               "--out", tmp_path / "v.json") == 0
    # a stricter level than certified fails verification
    assert run(tmp_path, "verify", "--polygon", corr, "--solution", sol, "--level", 0.5,
               "--density", 40, "--out", tmp_path / "v2.json") == 1
    ex = tmp_path / "x.json"
    assert run(tmp_path, "expand", "--solution", sol, "--out", ex) == 0
    assert json.loads(ex.read_text())["implicit"] == []


def test_gen_spikebox(tmp_path):
    lines = tmp_path / "lines.json"
    lines.write_text(json.dumps([[[0, 0], [4, 1]], [[0, 3], [3, 0]], [[1, 0], [2, 4]]]))
    out = tmp_path / "sb.json"
    assert run(tmp_path, "gen", "spikebox", "--lines", lines, "--alpha", 0.4, "--out", out) == 0
    obj = json.loads(out.read_text())
    P = PolygonWithHoles.from_json(obj)
    assert len(obj["tips"]) == 3 and P.shapely.is_valid


def test_discrete_and_inverse(tmp_path, sq):
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps([[0.2, 0.2], [0.8, 0.7]]))
    out = tmp_path / "d.json"
    assert run(tmp_path, "guard-discrete", "--polygon", sq, "--points", pts, "--alpha", 0.5, "--out", out) == 0
    sol = tmp_path / "d.json"
    assert run(tmp_path, "verify", "--polygon", sq, "--solution", sol, "--points", pts,
               "--out", tmp_path / "v.json") == 0
    assert run(tmp_path, "inv-vis", "--polygon", sq, "--point", "0.2,0.3", "--alpha", 0.3,
               "--out", tmp_path / "i.json") == 0


def test_render(tmp_path, sq):
    svg = tmp_path / "d.svg"
    assert run(tmp_path, "render", "--polygon", sq, "--decomposition", "--svg", svg) == 0
    assert "circle" in svg.read_text()


def test_output_deterministic(tmp_path, sq):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(tmp_path, "guard-polygon", "--polygon", sq, "--alpha", 0.25, "--out", p) == 0
    assert a.read_text() == b.read_text()


def test_exit_codes(tmp_path, sq, capsys):
    assert run(tmp_path, "vis", "--polygon", sq, "--guard", "5,5") == 2
    assert run(tmp_path, "vis", "--polygon", tmp_path / "missing.json", "--guard", "0.5,0.5") == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"outer": [[0, 0], [1, 1], [1, 0], [0, 1]]}))
    assert run(tmp_path, "vis", "--polygon", bad, "--guard", "0.5,0.5") == 2
    assert run(tmp_path, "guard-polygon", "--polygon", sq, "--alpha", 0.9) == 2
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["vis", "--polygon", str(sq), "--guard", "0.5"])
    assert e.value.code == 2


def test_config_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 0.3, "seed": 7}))
    assert RunConfig.load(str(cfg), {}).alpha == 0.3
    assert RunConfig.load(str(cfg), {"alpha": 0.2}).alpha == 0.2
    assert RunConfig.load(str(cfg), {"alpha": None}).seed == 7
    monkeypatch.setenv("ROBUSTGUARD_CONFIG", str(cfg))
    assert RunConfig.load(None, {}).alpha == 0.3
    monkeypatch.delenv("ROBUSTGUARD_CONFIG")
    assert RunConfig.load(None, {}).alpha == 0.25
    cfg.write_text(json.dumps({"alpah": 0.3}))
    from robustguard.errors import InputError
    with pytest.raises(InputError):
        RunConfig.load(str(cfg), {})
