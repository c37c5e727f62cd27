import hashlib
import json
import math

import numpy as np
import pytest

from twomode.cli import main

FIG3_CFG = """
[run]
seed = 3

[model]
gamma_c = 0.75
p = 0.81

[spectrum]
x_min = 0.0
x_max = 4.0
n = 801
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def read_rows(path):
    lines = path.read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    return header, body[0].split(","), [l.split(",") for l in body[1:]]


def test_spectrum_command_crossings(tmp_path):
    cfg = write(tmp_path, "run.ini", FIG3_CFG)
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--config", str(cfg), "--out", str(out)]) == 0
    header, cols, rows = read_rows(out)
    assert cols == ["x", "re_e_upper", "im_e_upper", "re_e_lower", "im_e_lower"]
    assert len(rows) == 801
    x = np.array([float(r[0]) for r in rows])
    im_u = np.array([float(r[2]) for r in rows])
    im_l = np.array([float(r[4]) for r in rows])
    assert x[0] == 0.0

    def crossings(im):
        s = np.sign(im)
        idx = np.nonzero((s[:-1] != s[1:]) & (s[:-1] != 0))[0]
        return [0.5 * (x[i] + x[i + 1]) for i in idx]

    cu, cl = crossings(im_u), crossings(im_l)
    # on the coexistence line both branches cross zero at the same density
    shared_u = min(cu, key=lambda v: abs(v - 2.0))
    shared_l = min(cl, key=lambda v: abs(v - 2.0))
    assert abs(shared_u - 2.0) < 0.01
    assert abs(shared_l - 2.0) < 0.01


def test_spectrum_first_row_is_linear_spectrum(tmp_path):
    cfg = write(tmp_path, "run.ini", FIG3_CFG)
    out = tmp_path / "spec.csv"
    main(["spectrum", "--config", str(cfg), "--out", str(out)])
    _, _, rows = read_rows(out)
    from twomode.model import ModelParams, spectrum

    sp = spectrum(ModelParams(gamma_c=0.75, p=0.81), 0.0)
    assert float(rows[0][1]) == pytest.approx(sp.e_upper.real)
    assert float(rows[0][2]) == pytest.approx(sp.e_upper.imag)


def test_steady_and_stability_commands(tmp_path):
    cfg = write(tmp_path, "run.ini", FIG3_CFG)
    out = tmp_path / "steady.csv"
    assert main(["steady", "--config", str(cfg), "--out", str(out)]) == 0
    _, cols, rows = read_rows(out)
    assert cols == ["x", "n_x", "n_c", "phi_cx", "energy", "branch", "stability", "margin"]
    assert len(rows) == 3
    assert {r[5] for r in rows} == {"upper", "lower"}

    cut_cfg = write(
        tmp_path,
        "cut.ini",
        "[model]\ngamma_c = 1.0\np = 1.0\n\n[stability]\naxis = p\nmin = 0.75\nmax = 0.95\nn = 21\n",
    )
    out2 = tmp_path / "cut.csv"
    assert main(["stability", "--config", str(cut_cfg), "--out", str(out2)]) == 0
    _, cols2, rows2 = read_rows(out2)
    assert cols2[0] == "axis_value"
    verdicts = {r[7] for r in rows2}
    assert "stable" in verdicts and "unstable" in verdicts


def test_evolve_command_oscillating_tail(tmp_path):
    cfg = write(
        tmp_path,
        "ev.ini",
        "[run]\nseed = 5\n\n[model]\ngamma_c = 0.75\np = 0.81\n\n"
        "[evolve]\nstart = equal_superposition\nt_end = 600.0\n",
    )
    out = tmp_path / "traj.csv"
    assert main(["evolve", "--config", str(cfg), "--out", str(out)]) == 0
    text = out.read_text()
    assert "# verdict = oscillating" in text
    freq_line = [l for l in text.splitlines() if l.startswith("# frequency = ")]
    assert freq_line
    freq = float(freq_line[0].split("=")[1])
    assert freq == pytest.approx(2 * math.sqrt(1 - 0.75**2), rel=0.02)
    _, cols, rows = read_rows(out)
    assert cols == ["t", "re_psiC", "im_psiC", "re_psiX", "im_psiX", "nC2", "nX2"]
    r = rows[10]
    assert float(r[5]) == pytest.approx(float(r[1]) ** 2 + float(r[2]) ** 2, rel=1e-10)


def test_evolve_overflow_marks_partial_and_exit_3(tmp_path):
    cfg = write(
        tmp_path,
        "ov.ini",
        "[model]\ngamma_c = 0.0\np = 2.0\ne_c = 0.0\ne_x = 0.0\ng1 = 1e-300\ng2 = 0.0\n\n"
        "[evolve]\nstart = explicit\npsi_c_re = 0.5\npsi_x_re = 0.5\nt_end = 300.0\n",
    )
    out = tmp_path / "traj.csv"
    assert main(["evolve", "--config", str(cfg), "--out", str(out)]) == 3
    text = out.read_text()
    assert "# verdict = diverged" in text
    assert "# error = " in text
    assert len([l for l in text.splitlines() if not l.startswith("#")]) > 1


def test_sweep_command_emits_grid_and_points(tmp_path):
    cfg = write(
        tmp_path,
        "sw.ini",
        "[model]\ngamma_c = 1.0\np = 1.0\n\n"
        "[sweep]\ngamma_min = 0.9\ngamma_max = 1.2\np_min = 0.6\np_max = 1.2\nn_gamma = 12\nn_p = 12\n\n"
        "[locate]\ngamma_lo = 1.0\ngamma_hi = 1.8\n",
    )
    out = tmp_path / "grid.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    points_path = out.with_suffix(".points.json")
    assert points_path.exists()
    _, cols, rows = read_rows(out)
    assert cols == "gamma_c,p,n_solutions,n_stable,region,sel_energy,sel_x,sel_nc,sel_phase,sel_branch".split(",")
    assert len(rows) == 144
    payload = "\n".join(l for l in points_path.read_text().splitlines() if not l.startswith("#"))
    doc = json.loads(payload)
    assert doc["ep"][0] == 1.0
    assert abs(doc["ep"][1] - 1.06) < 1e-6
    assert doc["r_line"]["slope"] == 1.0
    assert isinstance(doc["transition"], list)


def test_locate_command(tmp_path):
    cfg = write(tmp_path, "loc.ini", "[model]\ngamma_c = 1.0\np = 1.0\n\n[locate]\ntarget = ep\n")
    out = tmp_path / "pts.json"
    assert main(["locate", "--config", str(cfg), "--out", str(out)]) == 0
    payload = "\n".join(l for l in out.read_text().splitlines() if not l.startswith("#"))
    doc = json.loads(payload)
    assert abs(doc["ep"][1] - 1.06) < 1e-6
    assert doc["et"] is None
    assert doc["transition"] == []


def test_thresholds_command(tmp_path):
    cfg = write(
        tmp_path,
        "th.ini",
        "[model]\ngamma_c = 1.0\np = 1.0\n\n[thresholds]\np_min = 0.02\np_max = 2.0\nn = 300\n",
    )
    out = tmp_path / "th.csv"
    assert main(["thresholds", "--config", str(cfg), "--out", str(out)]) == 0
    _, cols, rows = read_rows(out)
    assert cols[0] == "p"
    kinds = [r[1] for r in rows]
    assert "vacuum" in kinds and "solutions" in kinds


def test_config_error_exit_2(tmp_path):
    cfg = write(tmp_path, "bad.ini", "[model]\ngamma_c = 1.0\np = 1.0\nunknown = 3\n")
    assert main(["steady", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
    missing = tmp_path / "nope.ini"
    assert main(["steady", "--config", str(missing), "--out", str(tmp_path / "x.csv")]) == 2
    g2zero = write(tmp_path, "g2.ini", "[model]\ngamma_c = 1.0\np = 1.0\ng2 = 0.0\n")
    assert main(["steady", "--config", str(g2zero), "--out", str(tmp_path / "x.csv")]) == 2


def test_header_round_trip_reproduces_bytes(tmp_path):
    cfg = write(tmp_path, "run.ini", FIG3_CFG)
    out1 = tmp_path / "a.csv"
    assert main(["spectrum", "--config", str(cfg), "--out", str(out1)]) == 0
    # reuse the emitted header itself as the next config
    header = "\n".join(
        l[1:].strip() for l in out1.read_text().splitlines() if l.startswith("#") and ("=" in l or l[1:].strip().startswith("["))
    )
    cfg2 = write(tmp_path, "roundtrip.ini", header)
    out2 = tmp_path / "b.csv"
    assert main(["spectrum", "--config", str(cfg2), "--out", str(out2)]) == 0
    assert hashlib.sha256(out1.read_bytes()).hexdigest() == hashlib.sha256(out2.read_bytes()).hexdigest()


def test_inputs_never_mutated(tmp_path):
    cfg = write(tmp_path, "run.ini", FIG3_CFG)
    before = hashlib.sha256(cfg.read_bytes()).hexdigest()
    main(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "s.csv")])
    main(["steady", "--config", str(cfg), "--out", str(tmp_path / "st.csv")])
    assert hashlib.sha256(cfg.read_bytes()).hexdigest() == before


def test_seed_flag_overrides_config(tmp_path):
    cfg = write(
        tmp_path,
        "rand.ini",
        "[run]\nseed = 1\n\n[model]\ngamma_c = 1.0\np = 1.2\n\n"
        "[evolve]\nstart = random\nt_end = 50.0\n",
    )
    out1, out2, out3 = (tmp_path / n for n in ("r1.csv", "r2.csv", "r3.csv"))
    assert main(["evolve", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["evolve", "--config", str(cfg), "--out", str(out2), "--seed", "1"]) == 0
    assert main(["evolve", "--config", str(cfg), "--out", str(out3), "--seed", "2"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() != out3.read_bytes()
