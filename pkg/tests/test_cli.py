import csv
import json
import re

import pytest

from twocenters import make_params
from twocenters.cli import OUT_ENV, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_molecule_text(capsys):
    code, out, _ = run(capsys, "molecule", "--mu", "0.25", "--c", "-1.2")
    assert code == 0
    assert "chain: A - B - A - A" in out


def test_molecule_json_mirrored(capsys):
    code, out, _ = run(capsys, "molecule", "--mu", "0.75", "--c", "-0.4", "--format", "json")
    assert code == 0
    result = json.loads(out)
    assert result["mu"] == 0.75
    atoms = [n["atom"] for n in result["graphs"][0]["nodes"]]
    assert "A*" in atoms


def test_diagram_files(capsys, tmp_path):
    code, _, _ = run(capsys, "diagram", "--mu", "0.25", "--resolution", "120", "--out", str(tmp_path))
    assert code == 0
    svg = (tmp_path / "diagram.svg").read_text()
    assert set(re.findall(r'polyline id="(l\d)"', svg)) == {"l1", "l2", "l3", "l4", "l5"}
    with open(tmp_path / "diagram.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 120 * 120
    labels = {r["label"] for r in rows}
    assert {"S", "S'", "L", "P", "forbidden"} <= labels


def test_diagram_l4_only_inside_band():
    from twocenters.diagram import curve_polylines
    p = make_params(0.25)
    l4 = curve_polylines(p, (-3, 3), (-3, -0.05))["l4"]
    assert l4[:, 1].min() >= p.cJ and l4[:, 1].max() <= p.cH


def test_diagram_equal_masses(capsys, tmp_path):
    code, _, _ = run(capsys, "diagram", "--mu", "0.5", "--resolution", "80", "--out", str(tmp_path))
    assert code == 0
    with open(tmp_path / "diagram.csv") as fh:
        assert "S'" not in {r["label"] for r in csv.DictReader(fh)}


def test_out_directory_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    code, _, _ = run(capsys, "diagram", "--mu", "0.25", "--resolution", "10", "--out", str(tmp_path / "flag"))
    assert code == 0
    assert (tmp_path / "env" / "diagram.csv").exists()
    assert not (tmp_path / "flag").exists()


def test_lyapunov_orbit_output(capsys, tmp_path):
    code, _, _ = run(capsys, "orbit", "--mu", "0.25", "--c", "-1.2", "--lyapunov", "--out", str(tmp_path))
    assert code == 0
    recs = [json.loads(line) for line in (tmp_path / "orbit.jsonl").read_text().splitlines()]
    nus = [r["nu_unwrapped"] for r in recs]
    assert max(nus) - min(nus) < 1e-8


def test_orbit_svg(capsys, tmp_path):
    code, _, _ = run(capsys, "orbit", "--mu", "0.25", "--g", "0.3", "--c", "-2.2", "--span", "10",
                     "--format", "svg", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "orbit.svg").read_text().startswith("<svg")


def test_rotation(capsys):
    code, out, _ = run(capsys, "rotation", "--mu", "0.25", "--g", "0.3", "--c", "-2.2", "--component", "moon")
    assert code == 0
    assert json.loads(out)["rotation_number"] > 1.0


def test_family(capsys, tmp_path):
    code, _, _ = run(capsys, "family", "--mu", "0.25", "--k", "1", "--l", "2", "--family", "L",
                     "--c", "-1.2", "-1.1", "--out", str(tmp_path))
    assert code == 0
    assert len((tmp_path / "family.csv").read_text().splitlines()) == 3


def test_homoclinic(capsys, tmp_path):
    code, _, _ = run(capsys, "homoclinic", "--mu", "0.25", "--c", "-1.2", "--component", "earth",
                     "--orbits", "20", "--out", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "homoclinic.json").read_text())
    assert report["verdict"] == "pass" and len(report["orbits"]) == 20


def test_collision_homoclinic(capsys, tmp_path):
    code, out, _ = run(capsys, "homoclinic", "--mu", "0.25", "--c", "-1.2", "--collision", "E", "M",
                       "--out", str(tmp_path))
    assert code == 0


def test_knot(capsys, tmp_path):
    code, _, _ = run(capsys, "knot", "--mu", "0.25", "--c", "-2.2", "--k", "9", "--l", "8", "--out", str(tmp_path))
    assert code == 0
    cert = json.loads((tmp_path / "knot.json").read_text())
    assert cert["pass"] and (cert["k_observed"], cert["l_observed"]) == (9, 8)


def test_missing_knot_family_is_an_error(capsys, tmp_path):
    # R stays in (1.02, 1.14) on every torus at this energy, so T_{1,2} does not exist
    code, _, err = run(capsys, "knot", "--mu", "0.25", "--c", "-2.2", "--k", "1", "--l", "2",
                       "--out", str(tmp_path))
    assert code == 2
    assert json.loads(err)["error"] == "NoRoot"
    assert not (tmp_path / "knot.json").exists()


@pytest.mark.parametrize("argv,error", [
    (["molecule", "--mu", "1.5", "--c", "-1.2"], "DomainError"),
    (["molecule", "--mu", "0.25", "--c", "0.5"], "DomainError"),
    (["orbit", "--mu", "0.25", "--g", "5", "--c", "-1.2"], "InadmissiblePoint"),
    (["homoclinic", "--mu", "0.25", "--c", "-2.2"], "BandError"),
    (["homoclinic", "--mu", "0.5", "--c", "-1.5"], "ExplicitlyDegenerate"),
    (["molecule", "--mu", "0.25", "--c", "-1.0"], "BandEdge"),
])
def test_errors_are_json(capsys, argv, error):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert json.loads(err)["error"] == error


def test_deterministic_output(capsys, tmp_path):
    outs = []
    for sub in ("a", "b"):
        run(capsys, "homoclinic", "--mu", "0.25", "--c", "-1.2", "--orbits", "3", "--seed", "5",
            "--out", str(tmp_path / sub))
        outs.append((tmp_path / sub / "homoclinic.json").read_text())
    assert outs[0] == outs[1]
