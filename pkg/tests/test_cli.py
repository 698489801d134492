import os

import pytest

from hhload.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


COMMON = ("--set", "n_subcarriers=32", "--set", "n_users=2",
          "--trials", "2", "--seed", "3")


class TestPredictComplexity:
    def test_n_one(self, capsys):
        code, out, _ = run_cli(capsys, "predict-complexity", "1")
        assert code == 0
        assert out.startswith("N=1 T=7 ")

    def test_multiple(self, capsys):
        code, out, _ = run_cli(capsys, "predict-complexity", "1", "2", "1024")
        lines = out.strip().splitlines()
        assert [ln.split()[0] for ln in lines] == ["N=1", "N=2", "N=1024"]
        assert "T=22 " in lines[1]
        # 1024^2*10 + 2*1024^2 + 5*1024 = 12588032
        assert "T=1.2588e+07" in lines[2]

    def test_reference_counts(self, capsys):
        _, out, _ = run_cli(capsys, "predict-complexity", "8")
        assert "group1: mult=8 exp=8" in out
        assert "per-iter: add=17 mult=1 exp=1" in out


class TestAllocOnce:
    def _gain_file(self, tmp_path, body):
        path = tmp_path / "gains.txt"
        path.write_text(body)
        return str(path)

    def test_single_gain(self, tmp_path, capsys):
        path = self._gain_file(tmp_path, "# gamma=1 pmax=7\n1.0\n")
        code, out, _ = run_cli(capsys, "alloc-once", path)
        assert code == 0
        assert "bits=[3]" in out
        assert "total_bits=3" in out

    def test_kappa_and_wf_start(self, tmp_path, capsys):
        path = self._gain_file(tmp_path, "# gamma=1 pmax=20\n1.0\n2.0\n4.0\n")
        code, out, _ = run_cli(capsys, "alloc-once", path, "--kappa", "2")
        assert code == 0
        code, out2, _ = run_cli(capsys, "alloc-once", path, "--wf-start")
        assert code == 0
        assert "total_bits=" in out2

    def test_max_bits(self, tmp_path, capsys):
        path = self._gain_file(tmp_path, "# gamma=1 pmax=1000\n1.0\n")
        _, out, _ = run_cli(capsys, "alloc-once", path, "--max-bits", "2")
        assert "bits=[2]" in out

    def test_missing_header_exit_3(self, tmp_path, capsys):
        path = self._gain_file(tmp_path, "1.0\n2.0\n")
        code, _, err = run_cli(capsys, "alloc-once", path)
        assert code == 3
        assert "configuration error" in err

    def test_missing_file_exit_4(self, capsys):
        code, _, err = run_cli(capsys, "alloc-once", "/nonexistent/gains.txt")
        assert code == 4
        assert "I/O error" in err


class TestRun:
    def test_basic_run(self, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        code, out, _ = run_cli(capsys, "run", *COMMON,
                               "--set", "algorithms=eq,hh",
                               "--out", out_dir)
        assert code == 0
        assert "Algorithm" in out and "HH" in out
        assert os.path.exists(os.path.join(out_dir, "results.csv"))
        assert os.path.exists(os.path.join(out_dir, "capacity.png"))

    def test_full_format_writes_json(self, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        code, _, _ = run_cli(capsys, "run", *COMMON,
                             "--set", "algorithms=hh",
                             "--format", "full", "--out", out_dir)
        assert code == 0
        assert os.path.exists(os.path.join(out_dir, "results.json"))

    def test_unknown_set_key_exit_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--set", "not_a_key=1", "--out", str(tmp_path)])
        assert exc.value.code == 2

    def test_malformed_set_exit_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--set", "nokeyvalue", "--out", str(tmp_path)])
        assert exc.value.code == 2

    def test_invalid_scenario_exit_3(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "run", "--set", "trials=0",
                               "--out", str(tmp_path))
        assert code == 3
        assert "trials" in err

    def test_scenario_file_equals_overrides(self, tmp_path, capsys):
        from hhload.harness import Scenario, apply_overrides, scenario_to_text
        sc = apply_overrides(Scenario(), dict(n_subcarriers="32", n_users="2",
                                              trials="2", seed="3",
                                              algorithms="hh"))
        path = tmp_path / "case.txt"
        path.write_text(scenario_to_text(sc))
        d1, d2 = str(tmp_path / "a"), str(tmp_path / "b")
        assert run_cli(capsys, "run", "--scenario", str(path), "--out", d1)[0] == 0
        assert run_cli(capsys, "run", *COMMON, "--set", "algorithms=hh",
                       "--out", d2)[0] == 0
        with open(os.path.join(d1, "results.csv")) as fh:
            a = fh.read()
        with open(os.path.join(d2, "results.csv")) as fh:
            b = fh.read()
        # identical numbers; only the scenario_id column differs
        strip = lambda text: [ln.split(",", 1)[1] for ln in text.splitlines()]
        assert strip(a) == strip(b)

    def test_unwritable_out_exit_4(self, tmp_path, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        code, _, err = run_cli(capsys, "run", *COMMON,
                               "--set", "algorithms=eq",
                               "--out", str(blocker / "sub"))
        assert code == 4
        assert "I/O error" in err


class TestSweepAndGrid:
    def test_sweep_n(self, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        code, out, _ = run_cli(capsys, "sweep-n", *COMMON,
                               "--set", "algorithms=hh",
                               "--set", "sweep_n=16,32",
                               "--out", out_dir)
        assert code == 0
        dat = os.path.join(out_dir, "iterations_hh_na.dat")
        assert os.path.exists(dat)
        with open(dat) as fh:
            xs = [float(line.split()[0]) for line in fh]
        assert xs == [16.0, 32.0]

    def test_tradeoff_grid(self, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        code, out, _ = run_cli(capsys, "tradeoff-grid", *COMMON,
                               "--set", "algorithms=hh,hh-grp",
                               "--set", "gt_db_list=0.5,5",
                               "--set", "sweep_tau_max_s=1e-6,10e-6",
                               "--out", out_dir)
        assert code == 0
        assert "best G_T at tau_max=1 us" in out
        assert os.path.exists(os.path.join(out_dir, "zeta.png"))

    def test_groups(self, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        code, out, _ = run_cli(capsys, "groups", *COMMON,
                               "--set", "gt_db_list=0.5,5",
                               "--out", out_dir)
        assert code == 0
        assert os.path.exists(os.path.join(out_dir, "results.csv"))

    def test_quick_caps_n(self, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        code, out, _ = run_cli(capsys, "run", "--quick",
                               "--set", "n_subcarriers=2048",
                               "--set", "n_users=2",
                               "--set", "algorithms=eq",
                               "--trials", "2",
                               "--out", out_dir)
        assert code == 0
        with open(os.path.join(out_dir, "results.csv")) as fh:
            fh.readline()
            row = fh.readline().split(",")
        assert int(row[3]) == 1024
