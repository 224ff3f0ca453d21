import os

import numpy as np
import pytest

from eit_forge import cli

FAST = ("grid_n_points=121\ndist_n_nodes=401\ndist_half_range_mhz=480\n"
        "window_min_mhz=-10\nwindow_max_mhz=10\n")


def write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_spectrum_defaults(tmp_path):
    cfg = write_cfg(tmp_path, "mode=spectrum\n" + FAST)
    prefix = str(tmp_path / "out")
    assert cli.main([cfg, "--out-prefix", prefix]) == 0
    header, rows = read_csv(prefix + "_spectrum.csv")
    assert header == ["delta_2ph_mhz", "re_chi", "im_chi", "transmission"]
    assert len(rows) == 121
    report = open(prefix + "_report.txt", encoding="utf-8").read()
    assert "contrast = " in report and "t_max = " in report


def test_spectrum_zero_od(tmp_path):
    cfg = write_cfg(tmp_path,
                    "mode=spectrum\noptical_depth=0\n" + FAST)
    prefix = str(tmp_path / "od0")
    assert cli.main([cfg, "--out-prefix", prefix]) == 0
    _, rows = read_csv(prefix + "_spectrum.csv")
    assert all(float(r[3]) == 1.0 for r in rows)


def test_pure_lambda_config(tmp_path):
    cfg = write_cfg(tmp_path, "mode=spectrum\nlevels=0:1:1\n" + FAST)
    prefix = str(tmp_path / "lam")
    assert cli.main([cfg, "--out-prefix", prefix]) == 0
    assert os.path.exists(prefix + "_spectrum.csv")


def test_depth_out_of_bounds(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "mode=spectrum\ndepth=1.5\n")
    assert cli.main([cfg]) == 2
    err = capsys.readouterr().err
    assert "depth" in err and "1" in err


def test_unknown_key(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "mode=spectrum\nbogus_key=1\n")
    assert cli.main([cfg]) == 2
    assert "bogus_key" in capsys.readouterr().err


def test_unknown_mode(tmp_path):
    cfg = write_cfg(tmp_path, "mode=fancy\n")
    assert cli.main([cfg]) == 2


def test_missing_config():
    assert cli.main(["/nonexistent/run.cfg"]) == 1


def test_missing_distribution_file(tmp_path):
    cfg = write_cfg(tmp_path,
                    "mode=spectrum\ndist_file=/nonexistent/dist.csv\n")
    assert cli.main([cfg]) == 1


def test_roots_stdout(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "mode=roots\n")
    assert cli.main([cfg]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "root1_mhz,root2_mhz,principal_mhz"
    r1, r2, pr = (float(v) for v in out[1].split(","))
    assert r1 < r2
    assert pr == pytest.approx(r2)
    assert 30.0 <= pr <= 55.0


def test_roots_closed_form_config(tmp_path, capsys):
    cfg = write_cfg(tmp_path,
                    "mode=roots\nroot_d=1\nroot_d_prime=1\n"
                    "root_omega_ee_mhz=100\n")
    assert cli.main([cfg]) == 0
    out = capsys.readouterr().out.splitlines()
    _, _, pr = (float(v) for v in out[1].split(","))
    assert pr == pytest.approx(61.8033989, abs=1e-5)


def test_velocity_map_structure(tmp_path):
    cfg = write_cfg(tmp_path,
                    "mode=velocity-map\nlevels=0:1:1\ngamma_sg_mhz=0\n"
                    "grid_min_mhz=-15\ngrid_max_mhz=15\ngrid_n_points=121\n"
                    "dist_n_nodes=5\ndist_half_range_mhz=40\n")
    prefix = str(tmp_path / "map")
    assert cli.main([cfg, "--out-prefix", prefix]) == 0
    header, rows = read_csv(prefix + "_map.csv")
    assert header == ["delta_doppler_mhz", "delta_2ph_mhz", "im_chi"]
    assert len(rows) == 5 * 121
    data = np.array([[float(v) for v in r] for r in rows])
    for dd in np.unique(data[:, 0]):
        block = data[data[:, 0] == dd]
        absorb = block[:, 2]
        # dark state at zero two-photon detuning, doublet on either side
        i0 = np.argmin(np.abs(block[:, 1]))
        assert abs(absorb[i0]) <= 1e-10
        assert np.max(absorb[block[:, 1] < 0]) > 1e-3
        assert np.max(absorb[block[:, 1] > 0]) > 1e-3


def test_scan_mode(tmp_path):
    cfg = write_cfg(tmp_path,
                    "mode=scan\nscan_min_mhz=20\nscan_max_mhz=60\n"
                    "scan_step_mhz=10\n" + FAST)
    prefix = str(tmp_path / "scan")
    assert cli.main([cfg, "--out-prefix", prefix]) == 0
    header, rows = read_csv(prefix + "_scan.csv")
    assert header == ["hole_center_mhz", "contrast"]
    assert len(rows) == 5
    report = open(prefix + "_report.txt", encoding="utf-8").read()
    assert "best_center_mhz" in report


def test_optimize_mode(tmp_path):
    cfg = write_cfg(tmp_path,
                    "mode=optimize\nn_holes=1\nbounds_min_mhz=20\n"
                    "bounds_max_mhz=60\n" + FAST)
    prefix = str(tmp_path / "opt")
    assert cli.main([cfg, "--out-prefix", prefix]) == 0
    header, rows = read_csv(prefix + "_holes.csv")
    assert header == ["center_mhz", "depth", "hwhm_mhz", "profile"]
    assert len(rows) == 1
    assert 20.0 <= float(rows[0][0]) <= 60.0
    report = open(prefix + "_report.txt", encoding="utf-8").read()
    assert "converged = true" in report


def test_byte_identical_reruns(tmp_path):
    cfg = write_cfg(tmp_path,
                    "mode=spectrum\nholes=40:0.8:10;85:0.8:10\n" + FAST)
    p1, p2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert cli.main([cfg, "--out-prefix", p1]) == 0
    assert cli.main([cfg, "--out-prefix", p2]) == 0
    for suffix in ("_spectrum.csv", "_report.txt"):
        a = open(p1 + suffix, "rb").read()
        b = open(p2 + suffix, "rb").read()
        assert a == b


def test_threads_do_not_change_output(tmp_path):
    cfg = write_cfg(tmp_path, "mode=spectrum\n" + FAST)
    p1, p2 = str(tmp_path / "t1"), str(tmp_path / "t2")
    assert cli.main([cfg, "--out-prefix", p1, "--threads", "1"]) == 0
    assert cli.main([cfg, "--out-prefix", p2, "--threads", "4"]) == 0
    assert open(p1 + "_spectrum.csv", "rb").read() == \
        open(p2 + "_spectrum.csv", "rb").read()


def test_threads_env_fallback(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path, "mode=spectrum\n" + FAST)
    prefix = str(tmp_path / "env")
    monkeypatch.setenv("EIT_FORGE_THREADS", "2")
    assert cli.main([cfg, "--out-prefix", prefix]) == 0
    monkeypatch.setenv("EIT_FORGE_THREADS", "zebra")
    assert cli.main([cfg, "--out-prefix", prefix]) == 2


def test_numerical_failure_exit_code(tmp_path, capsys):
    # Window outside the computed grid triggers a runtime failure (exit 3).
    cfg = write_cfg(tmp_path,
                    "mode=spectrum\ngrid_min_mhz=-5\ngrid_max_mhz=5\n"
                    "grid_n_points=50\nwindow_min_mhz=-4\n"
                    "window_max_mhz=20\ndist_n_nodes=101\n")
    assert cli.main([cfg]) == 3
    assert "spectrum failed" in capsys.readouterr().err


def test_config_comments_and_blank_lines(tmp_path):
    cfg = write_cfg(tmp_path,
                    "# a comment\n\nmode=roots  # trailing comment\n")
    assert cli.main([cfg]) == 0


def test_emitted_spectrum_round_trips(tmp_path):
    cfg = write_cfg(tmp_path, "mode=spectrum\n" + FAST)
    prefix = str(tmp_path / "rt")
    assert cli.main([cfg, "--out-prefix", prefix]) == 0
    _, rows = read_csv(prefix + "_spectrum.csv")
    xs = np.array([float(r[0]) for r in rows])
    steps = np.diff(xs)
    assert np.all(steps > 0)
    assert np.max(np.abs(steps - steps[0])) <= 1e-6 * steps[0]
