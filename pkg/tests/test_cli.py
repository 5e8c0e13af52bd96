import json
import subprocess
import sys

import pytest

from zzfree.cli import ConfigError, fmt, main, parse_config, render

ZERO_G = """
[circuit]
w1 = 5.192
w2 = 5.292
wc = 6.492
d1 = 0.6
d2 = -0.33
g1c = 0
g2c = 0
g12 = 0
truncations = 4, 3, 4

[sweep]
axis = Delta
start = 0.05
stop = 0.2
points = 7
"""

FIG3B = """
[circuit]
w1 = 5.192
w2 = 5.292
wc = 6.492
d1 = 0.6
d2 = -0.33
g1c = 80
g2c = 80
truncations = 4, 3, 4

[sweep]
axis = Delta
start = 0.05
stop = 0.25
points = 9
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_fmt_six_significant_digits():
    assert fmt(1 / 3) == "0.333333"
    assert fmt(None) == "none" and fmt(float("nan")) == "nan"


def test_zero_coupling_zeta_column_is_zero(tmp_path, capsys):
    code, out, _ = run(capsys, "static-zz", "--config", write(tmp_path, ZERO_G))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "Delta_GHz,zeta_exact_kHz,zeta_pert_kHz"
    assert len(lines) == 8
    for row in lines[1:]:
        ze, zp = (float(x) for x in row.split(",")[1:])
        assert abs(ze) < 1e-6 and zp == 0


def test_deterministic_output(tmp_path, capsys):
    cfg = write(tmp_path, FIG3B)
    a = run(capsys, "static-zz", "--config", cfg)[1]
    b = run(capsys, "static-zz", "--config", cfg)[1]
    assert a == b


def test_parallel_output_order(tmp_path, capsys):
    cfg = write(tmp_path, FIG3B)
    a = run(capsys, "static-zz", "--config", cfg, "--workers", "1")[1]
    b = run(capsys, "static-zz", "--config", cfg, "--workers", "4")[1]
    assert a == b


def test_env_thread_count(tmp_path, capsys, monkeypatch):
    cfg = write(tmp_path, FIG3B)
    a = run(capsys, "static-zz", "--config", cfg)[1]
    monkeypatch.setenv("ZZFREE_THREADS", "3")
    assert run(capsys, "static-zz", "--config", cfg)[1] == a


def test_output_file_and_json(tmp_path, capsys):
    cfg = write(tmp_path, FIG3B)
    out = tmp_path / "zz.json"
    code, stdout, _ = run(capsys, "static-zz", "--config", cfg, "--format", "json", "-o", str(out))
    assert code == 0 and stdout == ""
    doc = json.loads(out.read_text())
    assert doc["columns"] == ["Delta_GHz", "zeta_exact_kHz", "zeta_pert_kHz"]
    assert len(doc["rows"]) == 9


@pytest.mark.parametrize("text", [
    "[circuit]\nw1 = 5\nbogus = 1\n",
    "[nonsense]\nx = 1\n",
    "[circuit]\nw1 = five\n",
    "[sweep]\naxis = Delta\nstart = 0\nstop = 1\n",
    "[sweep]\naxis = phase\nstart = 0\nstop = 1\npoints = 3\n",
    "[drive]\nmethod = XY\n",
    "[output]\nformat = xml\n",
])
def test_bad_config_rejected(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_config_units():
    cfg = parse_config(FIG3B + "\n[drive]\nomega = 5, 10\nmethod = sw\n")
    assert cfg.circuit["g1c"] == pytest.approx(0.08)
    assert cfg.drive == {"omega": [0.005, 0.01], "method": "SW"}
    assert cfg.sweep["points"] == 9


def test_exit_code_config_error(tmp_path, capsys):
    code, _, err = run(capsys, "static-zz", "--config", write(tmp_path, "[circuit]\nbogus = 1\n"))
    assert code == 2 and "config error" in err


def test_exit_code_unknown_preset(capsys):
    assert run(capsys, "cancel-amp", "--preset", "42")[0] == 2


def test_exit_code_missing_file(capsys, tmp_path):
    assert run(capsys, "static-zz", "--config", str(tmp_path / "nope.ini"))[0] == 2


def test_exit_code_numerical_guard(tmp_path, capsys):
    # coupler resonant with qubit 1: the mediated-coupling denominator vanishes
    text = FIG3B.replace("wc = 6.492", "wc = 5.192").replace("truncations = 4, 3, 4", "").split("[sweep]")[0]
    code, _, err = run(capsys, "static-zz", "--config", write(tmp_path, text))
    assert code == 3 and "numerical guard [divergence]" in err


def test_cancel_amp_preset5_none(capsys):
    code, out, _ = run(capsys, "cancel-amp", "--preset", "5")
    assert code == 0 and out.strip() == "none"


def test_cancel_amp_preset1_la(capsys):
    code, out, _ = run(capsys, "cancel-amp", "--preset", "1", "--method", "la")
    assert code == 0 and out.strip() != "none"
    assert abs(float(out) - 42) <= max(0.15 * 42, 5)


def test_cancel_amp_formula(capsys):
    code, out, _ = run(capsys, "cancel-amp", "--preset", "9", "--method", "formula")
    assert code == 0 and float(out) == pytest.approx(46, abs=1)


def test_cr_sweep_columns(capsys):
    code, out, _ = run(capsys, "cr-sweep", "--preset", "8", "--omega-max", "10")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "Omega_MHz,alpha_ZX_MHz,alpha_ZZ_kHz,method"
    assert len(lines) == 5 and lines[1].startswith("2.5,") and lines[-1].endswith(",LA")


def test_gate_error_columns(capsys):
    code, out, err = run(capsys, "gate-error", "--preset", "8", "--omega-max", "20", "--omega-step", "10")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "Omega_MHz,t_g_ns,error" and len(lines) == 3
    assert "pi pulses" in err


def test_csfq_columns(capsys):
    code, out, _ = run(capsys, "csfq")
    head, row = out.strip().splitlines()
    assert head == "xi,f01_GHz,delta_GHz,f01_oracle_GHz,delta_oracle_GHz"
    xi, f, d, fo, do = (float(x) for x in row.split(","))
    assert abs(f - fo) / fo < 0.01 and d > 0


def test_csfq_rejects_bad_alpha(capsys):
    assert run(capsys, "csfq", "--alpha", "0.7")[0] == 2


def test_render_json_nan_is_null():
    doc = json.loads(render(["a"], [[float("nan")]], "json"))
    assert doc["rows"] == [[None]]


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "zzfree.cli", "cancel-amp", "--preset", "9", "--method", "formula"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and abs(float(r.stdout) - 46) < 1
