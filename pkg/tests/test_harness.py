import json
import math
import shutil
import subprocess
import sys
import time
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linepierce import instance_io
from linepierce.cli import main
from linepierce.construction import SimplexPoint
from linepierce.generate import gen_colorful, gen_pairwise_intersecting
from linepierce.geom import Family, Instance, Point, convex_hull
from linepierce.instance_io import InstanceFormatError
from linepierce.render import RenderSpec, clip_to_disk, render, render_svg
from linepierce.solver import solve_single

SVG = "{http://www.w3.org/2000/svg}"
V = instance_io.INSTANCE_VERSION


# ------------------------------------------------------------------------ io

def test_round_trip_is_bit_exact(tmp_path):
    inst = gen_colorful(3)
    p = tmp_path / "i.json"
    instance_io.save(p, inst, anchor=Point(4.0, -1.5), expected={"t3": True}, extra={"note": "x"})
    f = instance_io.load(p)
    assert f.anchor == Point(4.0, -1.5)
    assert f.expected == {"t3": True}
    assert f.extra == {"note": "x"}
    for a, b in zip(inst.families, f.instance.families):
        assert a.name == b.name
        for u, v in zip(a.bodies, b.bodies):
            assert np.array_equal(u.vertices, v.vertices)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)), min_size=1, max_size=8))
def test_round_trip_arbitrary_floats(pts):
    inst = Instance((Family((convex_hull(pts),)),))
    back = instance_io.loads(instance_io.dumps(inst)).instance
    assert np.array_equal(back.families[0].bodies[0].vertices, inst.families[0].bodies[0].vertices)


def test_one_body_per_line():
    inst = Instance((gen_pairwise_intersecting(4, 0),))
    text = instance_io.dumps(inst)
    body_lines = [ln for ln in text.splitlines() if ln.strip().startswith("[[")]
    assert len(body_lines) == 4
    json.loads(text)


def test_segment_and_point_bodies_accepted():
    text = json.dumps({"version": V, "families": [{"bodies": [[[0, 0], [1, 1]], [[2, 3]]]}]})
    f = instance_io.loads(text)
    a, b = f.instance.families[0].bodies
    assert len(a) == 2 and len(b) == 1
    assert f.instance.families[0].name == "F1"


@pytest.mark.parametrize("payload,needle", [
    ({"families": [{"bodies": [[[0, 0]]]}]}, "version"),
    ({"version": "9", "families": [{"bodies": [[[0, 0]]]}]}, "unsupported"),
    ({"version": V, "families": []}, "families"),
    ({"version": V, "families": [{"bodies": []}]}, "families[0].bodies"),
    ({"version": V, "families": [{"bodies": [[[0, "a"]]]}]}, "families[0].bodies[0][0]"),
    ({"version": V, "families": [{"bodies": [[[0, 0, 1]]]}]}, "families[0].bodies[0][0]"),
    ({"version": V, "families": [{"bodies": [[[0, 0]]]}], "anchor": [1]}, "anchor"),
])
def test_format_errors_carry_context(payload, needle):
    with pytest.raises(InstanceFormatError) as e:
        instance_io.loads(json.dumps(payload))
    assert needle in str(e.value)


def test_invalid_json_reports_position():
    with pytest.raises(InstanceFormatError) as e:
        instance_io.loads('{"version": "%s",\n "families": [' % V, "bad.json")
    assert "bad.json:" in str(e.value)


def test_non_finite_rejected():
    with pytest.raises(InstanceFormatError) as e:
        instance_io.loads('{"version": "%s", "families": [{"bodies": [[[NaN, 0]]]}]}' % V)
    assert "non-finite" in str(e.value)


def test_result_round_trip(tmp_path):
    fam = gen_pairwise_intersecting(5, 4)
    res = solve_single(fam)
    p = tmp_path / "r.json"
    p.write_text(json.dumps(instance_io.result_to_dict(res)))
    back = instance_io.load_result(p)
    assert back.family == res.family
    assert back.M == res.M
    assert back.normalization_scale == res.similarity.scale
    for a, b in zip(back.lines, res.lines):
        assert abs(a.signed_distance(b.anchor)) < 1e-12
    assert len(back.raw["trace"]) == len(res.trace)


# -------------------------------------------------------------------- render

def parse(svg):
    return ET.fromstring(svg)


def classes(root):
    return [el.get("class", "") for el in root.iter()]


def test_render_is_valid_and_deterministic():
    inst = Instance((gen_pairwise_intersecting(6, 1),))
    x = SimplexPoint((0.2,) * 5, 0.01)
    a = render_svg(inst, x)
    assert a == render_svg(inst, x)
    root = parse(a)
    assert root.tag == SVG + "svg"
    cls = classes(root)
    assert sum(c.startswith("region-label") for c in cls) == 6
    assert sum(c.startswith("line ") for c in cls) == 3
    assert sum(c.startswith("circle-point f") for c in cls) == 5
    assert "center M" in cls and "unit-circle" in cls


def test_render_marks_pierced_bodies():
    fam = gen_pairwise_intersecting(8, 2)
    res = solve_single(fam)
    norm = Instance((fam,)).map(res.similarity.apply_body)
    root = parse(render_svg(norm, res.x))
    bodies = [c for c in classes(root) if c.startswith("body ")]
    assert len(bodies) == 8
    assert all(c.endswith("pierced") for c in bodies)


def test_render_region_classes_for_unpierced():
    x = SimplexPoint((0.2,) * 5, 0.01)
    far = convex_hull([(0.0, -0.9), (0.01, -0.9), (0.0, -0.89)])
    root = parse(render_svg(Instance((Family((far,)),)), x))
    body = [c for c in classes(root) if c.startswith("body ")][0]
    assert "region-R" in body


def test_render_without_instance_and_file(tmp_path):
    x = SimplexPoint((0.3, 0.1, 0.2, 0.2, 0.2), 0.01)
    p = tmp_path / "f.svg"
    render(None, x, p, RenderSpec(size=300))
    root = parse(p.read_text())
    assert root.get("width") == "300"


def test_clip_to_disk():
    from linepierce.geom import Line
    seg = clip_to_disk(Line.through((0, 0.5), (1, 0.5)), 1.0)
    (x1, y1), (x2, y2) = seg
    assert {round(x1, 12), round(x2, 12)} == {round(-math.sqrt(0.75), 12), round(math.sqrt(0.75), 12)}
    assert clip_to_disk(Line.through((0, 2), (1, 2)), 1.0) is None


# ----------------------------------------------------------------------- CLI

def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_gen_check_solve_verify(tmp_path, capsys):
    inst = tmp_path / "p.json"
    res = tmp_path / "r.json"
    svg = tmp_path / "s.svg"
    assert run(["gen", "--kind", "pairwise", "--n", "7", "--seed", "3", "--out", str(inst)], capsys)[0] == 0
    code, out, _ = run(["check-t3", str(inst)], capsys)
    assert code == 0 and "yes" in out
    code, out, _ = run(["solve", str(inst), "--json", "--render", str(svg)], capsys)
    assert code == 0
    res.write_text(out)
    parse(svg.read_text())
    code, out, _ = run(["verify", str(inst), str(res)], capsys)
    assert code == 0
    code, out, _ = run(["pierce-bruteforce", str(inst), "--kmax", "1"], capsys)
    assert code == 0 and "family 1" in out


def test_cli_verify_detects_tampering(tmp_path, capsys):
    inst = tmp_path / "p.json"
    run(["gen", "--kind", "pairwise", "--n", "5", "--out", str(inst)], capsys)
    code, out, _ = run(["solve", str(inst), "--json"], capsys)
    data = json.loads(out)
    data["lines"][0]["through"] = [[50.0, 50.0], [51.0, 50.0]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert run(["verify", str(inst), str(bad)], capsys)[0] == 1


def test_cli_check_t3_counterexample(tmp_path, capsys):
    p = tmp_path / "c.json"
    pts = [[[0, 0]], [[1, 0]], [[0, 1]]]
    p.write_text(json.dumps({"version": V, "families": [{"bodies": pts}]}))
    code, out, err = run(["check-t3", str(p)], capsys)
    assert code == 1 and "no" in out
    assert err.count("counterexample member") == 3
    assert run(["solve", str(p)], capsys)[0] == 1


def test_cli_anchor_errors(tmp_path, capsys):
    p = tmp_path / "p.json"
    run(["gen", "--kind", "pairwise", "--n", "4", "--out", str(p)], capsys)
    hull = instance_io.load(p).instance.all_vertices()
    c = hull.mean(axis=0)
    assert run(["solve", str(p), "--anchor", f"{c[0]},{c[1]}"], capsys)[0] == 4
    assert run(["solve", str(p), "--anchor", "nonsense"], capsys)[0] == 2
    far = c + 10
    code, out, _ = run(["solve", str(p), "--anchor", f"{far[0]},{far[1]}", "--json"], capsys)
    assert code == 0
    assert json.loads(out)["anchor"] == [far[0], far[1]]


def test_cli_budget_and_usage(tmp_path, capsys):
    p = tmp_path / "p.json"
    run(["gen", "--kind", "colorful", "--seed", "2", "--out", str(p)], capsys)
    assert run(["solve", str(p), "--budget", "5"], capsys)[0] == 3
    assert run(["solve", str(p), "--delta0", "0.01", "--delta-min", "0.1"], capsys)[0] == 2
    assert run(["gen", "--kind", "pairwise", "--out", str(p)], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["check-t3", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_cli_bad_file(tmp_path, capsys):
    p = tmp_path / "x.json"
    p.write_text('{"families": []}')
    code, _, err = run(["check-t3", str(p)], capsys)
    assert code == 2 and "version" in err


def test_cli_too_large(tmp_path, capsys):
    bodies = [[[float(i), float(i * i % 7)]] for i in range(400)]
    p = tmp_path / "big.json"
    p.write_text(json.dumps({"version": V, "families": [{"bodies": bodies}]}))
    assert run(["pierce-bruteforce", str(p), "--kmax", "3"], capsys)[0] == 5


def test_cli_kkm_demo(capsys):
    code, out, _ = run(["kkm-demo", "--n", "4", "--k", "8"], capsys)
    assert code == 0 and "rainbow point" in out
    assert run(["kkm-demo", "--n", "3", "--k", "6", "--cover", "shifted"], capsys)[0] == 0


def test_gen_fast_and_t3(tmp_path, capsys):
    p = tmp_path / "g.json"
    t0 = time.perf_counter()
    assert run(["gen", "--kind", "pairwise", "--n", "15", "--seed", "9", "--out", str(p)], capsys)[0] == 0
    assert time.perf_counter() - t0 < 5
    assert len(instance_io.load(p).instance.families[0]) == 15


@pytest.mark.skipif(shutil.which("linepierce") is None, reason="console script not installed")
def test_console_script_help():
    r = subprocess.run(["linepierce", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "solve" in r.stdout


def test_module_runs_as_script():
    r = subprocess.run([sys.executable, "-m", "linepierce.cli", "frobnicate"],
                       capture_output=True, text=True)
    assert r.returncode == 2
