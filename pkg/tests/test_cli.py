import json
from pathlib import Path

import pytest

from transversal.cli import main

SCENES = Path(__file__).resolve().parents[1] / "scenes"


def scene(name):
    return str(SCENES / f"{name}.json")


def run_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_distance_on_three_points(capsys):
    code, rep = run_json(capsys, "distance", "--scene", scene("three_points"))
    assert code == 0
    r = rep["results"]
    assert r["d1"]["value"] == pytest.approx(5.0)
    assert r["d2"]["value"] == pytest.approx(2.5)
    assert r["d3"]["value"] == pytest.approx(3.0)
    assert r["d2"]["points"][-1] == [2.5]


def test_reports_are_deterministic(tmp_path):
    for k in (0, 1):
        assert main(["modulus", "--scene", scene("perpendicular_lines_max"), "--samples", "300",
                     "--out", str(tmp_path / str(k))]) == 0
    a = (tmp_path / "0" / "report.json").read_text()
    assert a == (tmp_path / "1" / "report.json").read_text()
    assert "seconds" not in a
    assert json.loads(a)["seed"] == 7


def test_seed_override_is_recorded(capsys):
    code, rep = run_json(capsys, "modulus", "--scene", scene("perpendicular_lines_max"), "--samples", "200",
                         "--seed", "11")
    assert code == 0 and rep["seed"] == 11
    assert rep["results"]["modulus"]["lower"] == pytest.approx(1.0, abs=1e-9)


def test_csv_summary(tmp_path):
    assert main(["distance", "--scene", scene("three_points"), "--format", "csv", "--out", str(tmp_path)]) == 0
    rows = dict(line.split(",", 1) for line in (tmp_path / "summary.csv").read_text().splitlines()[1:])
    assert float(rows["results.d3.value"]) == pytest.approx(3.0)
    assert (tmp_path / "timings.json").exists()


def test_plot_output_writes_png(tmp_path):
    assert main(["translate", "--scene", scene("separated_clouds"), "--format", "plot", "--out", str(tmp_path)]) == 0
    png = (tmp_path / "plot.png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"
    assert (tmp_path / "plot.dat").read_text().strip()
    assert (tmp_path / "report.json").exists()


def test_translate_modes(capsys):
    code, rep = run_json(capsys, "translate", "--scene", scene("separated_clouds"))
    assert code == 0 and rep["results"]["check"]["holds"] is True
    code, rep = run_json(capsys, "translate", "--scene", scene("touching_halfplanes"), "--mode", "pipeline")
    assert code == 0
    assert rep["results"]["metric_condition"]["holds"] is True
    assert rep["results"]["alpha_stationary"]["check"]["holds"] is True


def test_theta_and_ekeland(capsys):
    code, rep = run_json(capsys, "theta", "--scene", scene("perpendicular_lines_max"))
    assert code == 0 and rep["results"]["theta"]["value"] == pytest.approx(0.05, abs=1e-8)
    code, rep = run_json(capsys, "ekeland", "--scene", scene("finite_ekeland"))
    assert code == 0 and rep["results"]["holds"] is True
    assert rep["results"]["evp"]["x_hat"] == 1


def test_certify_converts(capsys):
    code, rep = run_json(capsys, "certify", "--scene", scene("touching_halfplanes"), "--alpha", "0.5",
                         "--convert", "zero-sum")
    assert code == 0
    assert rep["results"]["converted"]["form"] == "zero-sum"


def test_negative_search_exits_three(capsys):
    code = main(["certify", "--scene", scene("perpendicular_lines_max"), "--form", "zero-sum"])
    err = json.loads(capsys.readouterr().err)
    assert code == 3 and err["error"] == "not-found-at-budget"
    code, rep = run_json(capsys, "stationarity", "--scene", scene("perpendicular_lines_max"), "--budget", "50")
    assert code == 3 and rep["results"]["status"] == "not-found-at-budget"


def test_missing_parameter_exits_two(capsys):
    assert main(["translate", "--scene", scene("three_points")]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "precondition-failed"


@pytest.mark.parametrize("payload, needle", [
    ("{", "json"),
    ('{"sets": [{"name": "a", "set": {"variant": "Blob"}}]}', "variant"),
    ('{"sets": [{"name": "a", "set": {"variant": "Ball", "center": [0, 0], "radius": -1}}]}', "radius"),
])
def test_malformed_scenes_exit_two(tmp_path, capsys, payload, needle):
    path = tmp_path / "bad.json"
    path.write_text(payload)
    assert main(["oracle", "--scene", str(path)]) == 2
    assert needle in capsys.readouterr().err.lower()


def test_missing_scene_file(capsys, tmp_path):
    assert main(["distance", "--scene", str(tmp_path / "nope.json")]) == 2
