import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from phasetv import PhasePair, SolveConfig, compute_metrics, decompose, fixed_point_denoise
from phasetv import io
from phasetv.cli import main

SMALL = ["--rows", "32", "--cols", "32", "--phase-range", str(4 * math.pi)]


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 9), st.integers(1, 9))))
def test_field_round_trip_is_bit_exact(tmp_path_factory, field):
    path = tmp_path_factory.mktemp("phf") / "f.phf"
    io.write_field(path, field)
    back = io.read_field(path)
    assert back.shape == field.shape
    assert back.tobytes() == field.astype("<f8").tobytes()


def test_field_header(tmp_path):
    io.write_field(tmp_path / "f.phf", np.zeros((3, 5)))
    raw = (tmp_path / "f.phf").read_bytes()
    assert raw[:4] == b"PHF2"
    assert raw[4:16] == (1).to_bytes(4, "little") + (3).to_bytes(4, "little") + (5).to_bytes(4, "little")
    assert len(raw) == 16 + 8 * 15


@pytest.mark.parametrize(
    "mutate",
    [lambda r: b"XXXX" + r[4:], lambda r: r[:4] + (2).to_bytes(4, "little") + r[8:], lambda r: r[:-8], lambda r: r[:10]],
)
def test_field_rejects_malformed(tmp_path, mutate):
    io.write_field(tmp_path / "f.phf", np.ones((2, 2)))
    (tmp_path / "g.phf").write_bytes(mutate((tmp_path / "f.phf").read_bytes()))
    with pytest.raises(io.FormatError):
        io.read_field(tmp_path / "g.phf")


def test_pgm_preview(tmp_path):
    f = np.array([[-math.pi, 0.0], [math.pi, 10.0]])
    io.write_pgm16(tmp_path / "p.pgm", f)
    levels, maxval = io.read_pgm(tmp_path / "p.pgm")
    assert maxval == 65535
    assert levels.tolist() == [[0, 32768], [65535, 65535]]


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def generated(tmp_path, capsys):
    out = tmp_path / "gen"
    assert run(["generate", *SMALL, "--snr-db", 43.34, "--seed", 3, "--out", out]) == 0
    line = capsys.readouterr().out.strip()
    return out, line


def test_generate(generated):
    out, line = generated
    assert line.startswith("achieved_snr_db=")
    assert abs(float(line.split("=")[1]) - 43.34) <= 0.1
    for name in ("phi", "clean_psi", "noisy_psi", "clean_real", "clean_im", "noisy_real", "noisy_im"):
        assert (out / f"{name}.phf").exists()
    assert json.loads((out / "scene.json").read_text())["noise"]["seed"] == 3


def test_generate_is_byte_reproducible(tmp_path):
    for name in ("a", "b"):
        assert run(["generate", *SMALL, "--snr-db", 30, "--seed", 8, "--out", tmp_path / name]) == 0
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes(), f.name


def test_generate_vanishing_noise(tmp_path):
    assert run(["generate", *SMALL, "--snr-db", 300, "--out", tmp_path]) == 0
    clean = np.stack([io.read_field(tmp_path / "clean_real.phf"), io.read_field(tmp_path / "clean_im.phf")])
    noisy = np.stack([io.read_field(tmp_path / "noisy_real.phf"), io.read_field(tmp_path / "noisy_im.phf")])
    assert np.linalg.norm(noisy - clean) / np.linalg.norm(clean) < 1e-12


def test_denoise_fixed_point(generated, tmp_path):
    src, _ = generated
    out = tmp_path / "fp"
    assert run(["denoise", "--in", src, "--out", out]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["converged"] and report["method"] == "fixed-point"
    assert report["params"] == {"lambda1": 2.5, "lambda2": 2.5, "lambda3": 5.0, "beta": 0.001}
    assert report["final_rel_change"] < 1e-7
    assert set(report["timing"]) == {"wall_time"}
    with open(out / "trace.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == io.TRACE_COLUMNS
    assert len(rows) == report["iterations"] + 2
    energies = [float(r[2]) for r in rows[1:]]
    assert all(b <= a + 1e-10 * abs(a) for a, b in zip(energies, energies[1:]))

    # the CLI output equals the library call on the same files
    data = PhasePair(io.read_field(src / "noisy_real.phf"), io.read_field(src / "noisy_im.phf"))
    ref, _ = fixed_point_denoise(data, SolveConfig())
    assert np.array_equal(io.read_field(out / "denoised_real.phf"), ref.real)
    for name in ("denoised_im", "denoised_psi", "pyth_dev"):
        assert (out / f"{name}.phf").exists()
    assert (out / "metrics.json").exists()


def test_denoise_strobel_has_no_trace(generated, tmp_path):
    src, _ = generated
    out = tmp_path / "st"
    assert run(["denoise", "--method", "strobel", "--filter", "mean3", "--in", src, "--out", out]) == 0
    assert not (out / "trace.csv").exists()
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["mse_real"] > 0


def test_denoise_config_file_and_override(generated, tmp_path):
    src, _ = generated
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lambda1": 4.0, "lambda3": 1.0, "max_outer": 3, "epsilon": 1e-30}))
    out = tmp_path / "cfg_run"
    assert run(["denoise", "--config", cfg, "--lambda3", 2.0, "--in", src, "--out", out]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["params"]["lambda1"] == 4.0 and report["params"]["lambda3"] == 2.0
    assert report["iterations"] == 3 and not report["converged"]


def test_denoise_bad_config_key(generated, tmp_path):
    src, _ = generated
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lambda9": 1}))
    assert run(["denoise", "--config", cfg, "--in", src, "--out", tmp_path / "x"]) == 2


def test_denoise_divergence_exit_code(generated, tmp_path):
    src, _ = generated
    out = tmp_path / "gd"
    code = run(["denoise", "--method", "gradient-descent", "--tau", 5.0, "--in", src, "--out", out])
    assert code == 3
    report = json.loads((out / "report.json").read_text())
    assert "error" in report and not report["converged"]
    with open(out / "trace.csv") as fh:
        rows = list(csv.reader(fh))
    # every completed iteration is preserved, plus the initial row
    assert len(rows) - 1 >= report["iterations"]
    assert rows[1][0] == "0" and rows[1][2] != ""


def test_exit_codes(tmp_path, capsys):
    assert run(["denoise", "--in", tmp_path / "missing", "--out", tmp_path / "o"]) == 4
    with pytest.raises(SystemExit) as exc:
        main(["denoise", "--method", "magic", "--in", "a", "--out", "b"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    assert run(["generate", "--rows", 1, "--snr-db", 10, "--out", tmp_path / "g"]) == 2


def test_metrics_identity(generated, tmp_path):
    src, _ = generated
    res = tmp_path / "res"
    res.mkdir()
    for c in ("real", "im"):
        (res / f"denoised_{c}.phf").write_bytes((src / f"clean_{c}.phf").read_bytes())
    assert run(["metrics", "--result", res, "--reference", src, "--out", tmp_path / "m.json"]) == 0
    m = json.loads((tmp_path / "m.json").read_text())
    assert m["mse_real"] == 0 and m["mse_im"] == 0 and m["iqi_real"] == 1 and m["iqi_im"] == 1


def test_metrics_external_pair(generated, tmp_path):
    src, _ = generated
    ext = tmp_path / "ext"
    ext.mkdir()
    rng = np.random.default_rng(0)
    pair = PhasePair(rng.uniform(-1, 1, (32, 32)), rng.uniform(-1, 1, (32, 32)))
    io.write_field(ext / "real.phf", pair.real)
    io.write_field(ext / "im.phf", pair.im)
    assert run(["metrics", "--result", ext, "--reference", src, "--out", tmp_path / "m.json"]) == 0
    got = json.loads((tmp_path / "m.json").read_text())
    ref = PhasePair(io.read_field(src / "clean_real.phf"), io.read_field(src / "clean_im.phf"))
    want = compute_metrics(pair, ref, io.read_field(src / "noisy_psi.phf")).as_dict()
    assert got == pytest.approx(want, rel=0, abs=0)


def test_metrics_shape_mismatch(generated, tmp_path):
    src, _ = generated
    ext = tmp_path / "ext"
    ext.mkdir()
    io.write_field(ext / "real.phf", np.zeros((4, 4)))
    io.write_field(ext / "im.phf", np.zeros((4, 4)))
    assert run(["metrics", "--result", ext, "--reference", src, "--out", tmp_path / "m.json"]) == 2


def test_compare_table(generated, tmp_path):
    src, _ = generated
    runs = []
    for method in ("fixed-point", "strobel"):
        out = tmp_path / method
        assert run(["denoise", "--method", method, "--in", src, "--out", out]) == 0
        runs.append(out)
    assert run(["compare", "--runs", *runs, "--out", tmp_path / "t.csv"]) == 0
    with open(tmp_path / "t.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == [
        "method", "mse_real", "mse_im", "iqi_real", "iqi_im", "pyth_mean", "pyth_max", "iterations", "wall_time",
    ]
    assert rows[0]["method"] == "fixed-point" and rows[1]["method"] == "strobel(mean3)"
    assert int(rows[1]["iterations"]) == 0 and int(rows[0]["iterations"]) > 0


def test_import_pgm_and_png(tmp_path):
    levels = np.array([[0, 64, 128], [192, 255, 32]], dtype=np.uint8)
    pgm = tmp_path / "img.pgm"
    pgm.write_bytes(b"P5\n# comment\n3 2\n255\n" + levels.tobytes())
    assert run(["import", "--image", pgm, "--out", tmp_path / "a"]) == 0
    psi = io.read_field(tmp_path / "a" / "noisy_psi.phf")
    expected = -math.pi + 2 * math.pi * levels / 255
    expected[expected <= -math.pi] = math.pi
    np.testing.assert_allclose(psi, expected, atol=1e-14)
    meta = json.loads((tmp_path / "a" / "import.json").read_text())
    assert meta["mapping"]["maxval"] == 255

    from PIL import Image

    wide = np.array([[0, 30000], [65535, 12]], dtype=np.uint16)
    Image.fromarray(wide).save(tmp_path / "img.png")
    assert run(["import", "--image", tmp_path / "img.png", "--out", tmp_path / "b"]) == 0
    psi = io.read_field(tmp_path / "b" / "noisy_psi.phf")
    assert psi[0, 1] == pytest.approx(-math.pi + 2 * math.pi * 30000 / 65535)
    pair = decompose(psi)
    assert np.array_equal(io.read_field(tmp_path / "b" / "noisy_real.phf"), pair.real)
