import json
import subprocess
import sys

import pytest

from hybrid_betti.cli import RunManifest, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_betti_on_c4(capsys):
    code, out, _ = run(capsys, "betti", "--graph", "fixture:c4", "--r", "1")
    doc = json.loads(out)
    assert code == 0 and doc["r"] == 1 and doc["absolute"] == 1 and doc["mode"] == "exact"


def test_cliques_on_octahedron(capsys):
    _, out, _ = run(capsys, "cliques", "--graph", "fixture:octahedron", "--k", "3")
    assert len(out.splitlines()) == 8
    _, js, _ = run(capsys, "cliques", "--graph", "fixture:octahedron", "--k", "3", "--format", "json")
    assert len(json.loads(js)) == 8


def test_stochastic_betti_twice_is_byte_identical(capsys):
    args = ("betti", "--graph", "fixture:octahedron", "--r", "2", "--mode", "stochastic", "--seed", "4")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b


def test_manifest_rerun(tmp_path, capsys):
    m = tmp_path / "m.json"
    out = tmp_path / "o.json"
    run(capsys, "betti", "--graph", "fixture:petersen", "--r", "1", "--mode", "stochastic", "--manifest", str(m), "--out", str(out))
    manifest = RunManifest.from_json(m.read_text())
    assert manifest.args["seed"] == 0 and "estimate" in manifest.timings
    code, rerun_out, _ = run(capsys, "rerun", str(m))
    assert code == 0 and rerun_out == out.read_text()


def test_rerun_detects_tampered_digest(tmp_path, capsys):
    m = tmp_path / "m.json"
    run(capsys, "cost", "--n", "10", "--r", "1", "--s-r", "5", "--edges", "5", "--epsilon", "0.1", "--manifest", str(m))
    doc = json.loads(m.read_text())
    doc["output_sha256"] = "0" * 64
    m.write_text(json.dumps(doc))
    with pytest.raises(SystemExit) as info:
        main(["rerun", str(m)])
    assert info.value.code == 3
    assert json.loads(capsys.readouterr().err)["error"] == "DeterminismError"


def test_sweep_and_verify(capsys):
    _, out, _ = run(capsys, "sweep", "--image", "fixture:two_blobs", "--r", "0", "--mode", "exact", "--thresholds", "0.2,0.5")
    rows = out.splitlines()
    assert rows[0].startswith("threshold,") and len(rows) == 3
    _, out, _ = run(capsys, "sweep", "--state", "bell", "--r", "0", "--thresholds", "0.1", "--format", "json")
    assert json.loads(out)["samples"][0]["absolute"] == pytest.approx(1)
    _, out, _ = run(capsys, "verify", "--graph", "fixture:octahedron", "--r", "2")
    report = json.loads(out)
    assert report["passed"] and report["checks"]["gram"]["kernel_dim_exact"] == 1


def test_cost_subcommand(capsys):
    _, out, _ = run(capsys, "cost", "--n", "100", "--r", "2", "--s-r", "100", "--edges", "200", "--arboricity", "2", "--epsilon", "0.1")
    assert json.loads(out)["hybrid_classical"]["arboricity"] == 400


@pytest.mark.parametrize(
    "argv,kind",
    [
        (["betti", "--graph", "/does/not/exist"], "FileNotFoundError"),
        (["betti", "--graph", "fixture:c4", "--r", "2"], "EstimationError"),
        (["sweep", "--points", "fixture:circle8", "--thresholds", "0.3,0.1", "--r", "0"], "PipelineError"),
        (["betti", "--graph", "fixture:c4", "--epsilon", "2"], "EstimationError"),
        (["cliques", "--graph", "fixture:c4"], "UsageError"),
        (["betti", "--bogus"], "UsageError"),
    ],
)
def test_errors_are_json_on_stderr(argv, kind, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code != 0
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == kind


def test_console_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "hybrid_betti.cli", "betti", "--graph", "fixture:triangle", "--r", "1"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(res.stdout)["absolute"] == pytest.approx(0, abs=1e-12)
