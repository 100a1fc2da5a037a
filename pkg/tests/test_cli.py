import json

from freewick import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr().out
    return code, out


class TestPartitions:
    def test_gn_three(self, capsys):
        code, out = run(["partitions", "--n", "3", "--set", "gn"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["count"] == 7
        assert len(payload["records"]) == 7
        assert payload["records"][0] == {"blocks": [[1], [2], [3]], "marks": [1, 1, 1]}

    def test_nc_four(self, capsys):
        code, out = run(["partitions", "--n", "4", "--set", "nc"], capsys)
        assert code == 0
        assert json.loads(out)["count"] == 14

    def test_gn_one(self, capsys):
        code, out = run(["partitions", "--n", "1", "--set", "gn"], capsys)
        assert code == 0
        assert json.loads(out)["count"] == 1

    def test_interval(self, capsys):
        code, out = run(["partitions", "--n", "3", "--set", "interval"], capsys)
        assert code == 0
        assert json.loads(out)["count"] == 7

    def test_bound_exceeded_exit_code(self, capsys):
        code, _ = run(["partitions", "--n", "20", "--set", "nc"], capsys)
        assert code == 2

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "dump.json"
        code, out = run(["partitions", "--n", "2", "--set", "gn", "--out", str(path)], capsys)
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["count"] == 3

    def test_csv_format(self, capsys):
        code, out = run(["partitions", "--n", "2", "--set", "gn", "--format", "csv"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "blocks,marks"
        assert len(lines) == 4


class TestMoments:
    def test_default_meixner_fourth_power(self, capsys):
        code, out = run(["moments", "--power", "4"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["max_gap"] < 1e-10
        for value in payload["paths"].values():
            assert abs(value - 4.0) < 1e-10

    def test_gauss_poisson_paths(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"mode": "gauss_poisson", "lambda": 0.0, "m": 6}))
        code, out = run(
            ["moments", "--config", str(cfg), "--word", "0:1", "--power", "6"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert set(payload["paths"]) == {"fock", "nc_sum"}
        for value in payload["paths"].values():
            assert abs(value - 5.0) < 1e-10  # sixth moment of the unit window

    def test_general_mode_fibers(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "mode": "general",
                    "m": 2,
                    "fiber_nodes": 2,
                    "fibers": [
                        {"atoms": [-1.0, 1.0], "weights": [0.5, 0.5]},
                        {"atoms": [-0.5, 0.5], "weights": [0.5, 0.5]},
                    ],
                }
            )
        )
        code, out = run(["moments", "--config", str(cfg), "--power", "2"], capsys)
        assert code == 0
        assert json.loads(out)["max_gap"] < 1e-10

    def test_word_factors(self, capsys):
        code, out = run(["moments", "--word", "0:0.5,0.5:1", "--power", "1"], capsys)
        assert code == 0
        payload = json.loads(out)
        # disjoint windows: the covariance vanishes
        for value in payload["paths"].values():
            assert abs(value) < 1e-12

    def test_bad_word(self, capsys):
        code, _ = run(["moments", "--word", "nonsense"], capsys)
        assert code == 2

    def test_bad_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"modus": "meixner"}))
        code, _ = run(["moments", "--config", str(cfg)], capsys)
        assert code == 2

    def test_missing_config_file(self, capsys):
        code, _ = run(["moments", "--config", "/nonexistent.json"], capsys)
        assert code == 2


class TestVerify:
    def test_wick_suite_passes(self, capsys):
        code, out = run(["verify", "--suite", "wick", "--n-max", "3"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["passed"] is True
        assert all(c["passed"] for c in payload["checks"])

    def test_failure_exit_code(self, tmp_path, capsys):
        # an unreachable tolerance forces residual > tol somewhere
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"tolerance": 1e-30}))
        code, out = run(
            ["verify", "--suite", "cumulant", "--config", str(cfg)], capsys
        )
        assert code == 1
        assert json.loads(out)["passed"] is False

    def test_text_format(self, capsys):
        code, out = run(
            ["verify", "--suite", "meixner", "--format", "text"], capsys
        )
        assert code == 0
        assert "passed: True" in out

    def test_meixner_json_serializable(self, capsys):
        # residuals coming out as numpy scalars must not break the encoder
        code, out = run(["verify", "--suite", "meixner", "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["passed"] is True

    def test_n_max_bounded(self, capsys):
        code, _ = run(["verify", "--suite", "wick", "--n-max", "99"], capsys)
        assert code == 2

    def test_seed_override_deterministic(self, capsys):
        code1, out1 = run(["verify", "--suite", "cumulant", "--seed", "7"], capsys)
        code2, out2 = run(["verify", "--suite", "cumulant", "--seed", "7"], capsys)
        assert code1 == code2 == 0
        r1 = [c["residual"] for c in json.loads(out1)["checks"]]
        r2 = [c["residual"] for c in json.loads(out2)["checks"]]
        assert r1 == r2
