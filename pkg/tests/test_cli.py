import csv
import io
import json
import math

import pytest

from morrey import __version__
from morrey.cli import EXIT_FAILED, EXIT_GUARD, EXIT_INVALID, EXIT_OK, main
from morrey.experiments import COUNTEREXAMPLES
from morrey.radial import RadialProfile


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_norm_power():
    code, text = run(["norm", "--construct", "power", "--d", "1", "--q", "2", "--p", "1"])
    assert code == EXIT_OK
    obj = json.loads(text)
    assert obj["norm"]["kind"] == "finite"
    assert obj["norm"]["value"] == pytest.approx(2 * math.sqrt(2), rel=1e-10)
    assert obj["params"] == {"d": 1, "p": 1.0, "q": 2.0} and obj["version"] == __version__


def test_norm_divergent_is_success():
    argv = ["norm", "--construct", "thm13", "--d", "1", "--p1", "1", "--p2", "1.5", "--q", "2", "--K", "4096", "--p", "1.5"]
    code, text = run(argv)
    assert code == EXIT_OK
    verdict = json.loads(text)["norm"]
    assert verdict["kind"] == "infinite" and verdict["regime"] == "r->inf"
    assert verdict["growth"] == pytest.approx(0.5 - 0.625 / 1.5, abs=0.02)


def test_norm_p_above_q_is_invalid(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(RadialProfile.indicator([(0.0, 1.0)]).to_json())
    code, _ = run(["norm", "--profile", str(path), "--p", "3", "--q", "2"])
    assert code == EXIT_INVALID


@pytest.mark.parametrize(
    "argv",
    [
        ["norm", "--construct", "power", "--d", "1"],  # no q
        ["norm", "--construct", "thm13", "--q", "2", "--p1", "1"],  # missing p2, K
        ["norm", "--construct", "g", "--q", "2", "--p1", "1", "--p2", "3"],  # beta >= d
        ["norm", "--q", "2"],  # no profile at all
        ["construct", "--construct", "probe", "--d", "2", "--N", "3"],
        ["maximal-probe", "--q", "1", "--N", "4"],
        ["norm", "--profile", "/nonexistent/f.json", "--q", "2"],
    ],
)
def test_invalid_parameters(argv):
    assert run(argv)[0] == EXIT_INVALID


def test_unreadable_profile(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(["norm", "--profile", str(path), "--q", "2"])[0] == EXIT_INVALID


def test_resource_guard():
    argv = ["construct", "--construct", "thm13", "--p1", "1", "--p2", "1.5", "--q", "2", "--K", "20000000"]
    assert run(argv)[0] == EXIT_GUARD


def test_construct_roundtrip(tmp_path):
    code, text = run(["construct", "--construct", "sec4", "--q", "2", "--epsilon", "0.25", "--K", "6"])
    assert code == EXIT_OK
    f = RadialProfile.from_json(text)
    assert f.lo[3] == 4.0 and f.hi[3] == pytest.approx(4 + 4 ** -0.25)
    path = tmp_path / "f.json"
    path.write_text(text)
    code, text = run(["norm", "--profile", str(path), "--q", "2", "--exact"])
    assert code == EXIT_OK and json.loads(text)["norm"]["kind"] == "finite"


def test_norm_flags():
    code, text = run(["norm", "--construct", "ball", "--radius", "2", "--d", "2", "--q", "3", "--weak", "--audit", "--samples", "6"])
    obj = json.loads(text)
    want = (math.pi * 4) ** (1 / 3)
    assert obj["norm"]["value"] == pytest.approx(want, rel=1e-12)
    assert obj["weak"]["value"] == pytest.approx(want, rel=1e-12)
    assert obj["norm"]["audit"]["flag"] is False and obj["norm"]["audit"]["n_samples"] == 36
    code, text = run(["norm", "--construct", "power", "--d", "1", "--q", "2", "--r-lo", "1", "--r-hi", "100"])
    assert abs(json.loads(text)["growth_fit"]["slope"]) < 1e-6


def test_norm_csv():
    code, text = run(["norm", "--construct", "ball", "--q", "2", "--format", "csv"])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == EXIT_OK and len(rows) == 1
    assert float(rows[0]["value"]) == pytest.approx(math.sqrt(2))


def test_maximal_probe_csv():
    code, text = run(["maximal-probe", "--q", "2", "--N", "16"])
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "N,norm_f,lower_bound_norm_Mf,ratio"
    row = next(csv.DictReader(io.StringIO(text)))
    assert int(row["N"]) == 16 and float(row["ratio"]) > 1


def test_counterexamples():
    code, text = run(["counterexample", "thm13"])
    assert code == EXIT_OK
    obj = json.loads(text)
    assert obj["passed"] and obj["params"]["K"] == 8192 and obj["version"] == __version__
    # the embedded parameters reproduce every value
    again = COUNTEREXAMPLES["thm13"](**obj["params"]).to_json_obj()
    for a, b in zip(obj["checks"], again["checks"]):
        assert a["check"] == b["check"]
        assert b["value"] == pytest.approx(a["value"], rel=1e-12)
    assert run(["counterexample", "thm14"])[0] == EXIT_OK
    code, text = run(["counterexample", "thm14", "--p", "1.5", "--q", "2"])
    assert code == EXIT_OK and any("verified-indirect" in n for n in json.loads(text)["notes"])
    assert run(["counterexample", "thm41", "--K", "1024"])[0] == EXIT_OK


def test_counterexample_failure_exit():
    # an impossibly tight tolerance makes the exponent checks fail
    assert run(["counterexample", "thm13", "--tol", "1e-9"])[0] == EXIT_FAILED


def test_counterexample_invalid():
    assert run(["counterexample", "thm13", "--p1", "2", "--p2", "1.5"])[0] == EXIT_INVALID
    assert run(["counterexample", "thm14", "--p", "3", "--q", "2"])[0] == EXIT_INVALID


def test_report_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["report", "--out", str(a), "--seed", "7", "--quick"])[0] == EXIT_OK
    assert run(["report", "--out", str(b), "--seed", "7", "--quick"])[0] == EXIT_OK
    files = sorted(p.name for p in a.iterdir())
    assert "summary.json" in files and len([f for f in files if not f.endswith("_series.csv")]) == 9
    assert files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    summary = json.loads((a / "summary.json").read_text())
    assert summary["passed"] and len(summary["experiments"]) == 8
    header = (a / "01_exact_constants.csv").read_text().splitlines()[0]
    assert header == "experiment,check,d,p,q,p1,p2,q1,q2,epsilon,K,N,value,predicted,tolerance,pass"
