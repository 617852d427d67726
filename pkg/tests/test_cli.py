import json
import subprocess
import sys

from eigenbouquet.cli import (
    EXIT_CONFIG,
    EXIT_INVARIANT,
    EXIT_PASS,
    EXIT_UNRESOLVED,
    FIXTURES,
    JobConfig,
    cmd_dispatch,
)
from eigenbouquet.report import canonical_json


def run_cli(args):
    return cmd_dispatch(list(args))


class TestDispatch:
    def test_demo_kupa_passes(self, tmp_path):
        path = tmp_path / "kupa.json"
        code = run_cli(["demo", "kupa", "--report", str(path), "--grid", "9"])
        assert code == EXIT_PASS
        report = json.loads(path.read_text())
        assert report["verdict"] == "pass"
        assert report["spectral"]["eigenvalue_count"] == 2
        assert report["spectral"]["bundles"]["main"]["quadratic_rank"] == 1
        assert sorted(report["spectral"]["bundles"]["main"]["fitting_gens"]) == [
            "x*y",
            "x^2 - y^2",
        ]
        charts = report["resolution"]["charts"]["children"]
        assert {c["local_generator"] for c in charts} == {"u^2", "v^2"}
        assert all(c["status"] == "ResolvedCertified" for c in charts)

    def test_analyze_scalar_family(self, tmp_path):
        cfg = tmp_path / "scalar.json"
        cfg.write_text(
            json.dumps(
                {
                    "structure": "symmetric",
                    "params": ["x"],
                    "matrix": [["x", "0"], ["0", "x"]],
                }
            )
        )
        path = tmp_path / "out.json"
        code = run_cli(["analyze", "--config", str(cfg), "--report", str(path)])
        assert code == EXIT_PASS
        report = json.loads(path.read_text())
        assert report["verdict"] == "ScalarOperator"
        assert report["spectral"]["status"] == "ScalarOperator"

    def test_resolve_empty_sequence_unresolved(self, tmp_path):
        cfg = tmp_path / "kupa.json"
        data = dict(FIXTURES["kupa"])
        data["resolution"] = []
        cfg.write_text(json.dumps(data))
        path = tmp_path / "out.json"
        code = run_cli(["resolve", "--config", str(cfg), "--report", str(path)])
        assert code == EXIT_INVARIANT
        report = json.loads(path.read_text())
        assert report["verdict"] == "Unresolved"
        assert report["resolution"]["charts"]["witness"] == {"x": "0", "y": "0"}

    def test_frames_on_unresolved_exits_3(self, tmp_path):
        cfg = tmp_path / "kupa.json"
        data = dict(FIXTURES["kupa"])
        data["resolution"] = []
        cfg.write_text(json.dumps(data))
        code = run_cli(["frames", "--config", str(cfg)])
        assert code == EXIT_UNRESOLVED

    def test_config_error_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run_cli(["analyze", "--config", str(bad)]) == EXIT_CONFIG
        missing = tmp_path / "missing.json"
        assert run_cli(["analyze", "--config", str(missing)]) == EXIT_CONFIG
        nonsquare = tmp_path / "nonsquare.json"
        nonsquare.write_text(
            json.dumps({"structure": "symmetric", "params": ["x"], "matrix": [["x"], ["x"]]})
        )
        assert run_cli(["analyze", "--config", str(nonsquare)]) == EXIT_CONFIG

    def test_structure_violation_exit_2(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text(
            json.dumps(
                {
                    "structure": "symmetric",
                    "params": ["x"],
                    "matrix": [["x", "1"], ["0", "x"]],
                }
            )
        )
        assert run_cli(["analyze", "--config", str(cfg)]) == EXIT_CONFIG

    def test_unknown_demo(self):
        assert run_cli(["demo", "nope"]) == EXIT_CONFIG


class TestDeterminism:
    def test_reports_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_cli(["demo", "rellich", "--report", str(a), "--grid", "7"])
        run_cli(["demo", "rellich", "--report", str(b), "--grid", "7"])
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_report_only_deterministically(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_cli(["demo", "kupa", "--report", str(a), "--grid", "5", "--seed", "7"])
        run_cli(["demo", "kupa", "--report", str(b), "--grid", "5", "--seed", "7"])
        assert a.read_bytes() == b.read_bytes()


class TestConfigRoundTrip:
    def test_echoed_config_reproduces_job(self, tmp_path):
        path = tmp_path / "out.json"
        run_cli(["demo", "kupa", "--report", str(path), "--grid", "5"])
        report = json.loads(path.read_text())
        echoed = JobConfig.from_dict(report["config"])
        original = JobConfig.from_dict(dict(FIXTURES["kupa"]))
        assert echoed.matrix == original.matrix
        assert echoed.params == original.params
        assert echoed.resolution == original.resolution
        assert echoed.grid_points == 5


class TestCanonicalJson:
    def test_sorted_keys_and_float_format(self):
        text = canonical_json({"b": 1.5, "a": [1, 2.0, None, True]})
        assert text == '{"a": [1, 2.0, null, true], "b": 1.5}\n'

    def test_seventeen_digits(self):
        import math

        text = canonical_json({"pi": math.pi})
        assert "3.1415926535897931" in text


class TestCheckSubcommand:
    def test_check_runs_invariant_suites(self, tmp_path):
        cfg = tmp_path / "kupa.json"
        cfg.write_text(json.dumps({**FIXTURES["kupa"], "grid": {"points_per_axis": 5}}))
        path = tmp_path / "out.json"
        code = run_cli(["check", "--config", str(cfg), "--report", str(path)])
        assert code == EXIT_PASS
        report = json.loads(path.read_text())
        names = {item["name"] for item in report["invariants"]}
        assert "weak_transform_exactness" in names
        assert "oracle_cluster_count_off_discriminant" in names
        assert all(item["pass"] for item in report["invariants"])


class TestProductResolution:
    def test_derived_charts_factor_the_local_generator(self):
        # resolve the product of two generator sets, then recover each
        # factor's weak transform on the same charts
        from eigenbouquet.algebra import VarUniverse, parse_polynomial
        from eigenbouquet.cli import derive_chart_for
        from eigenbouquet.resolve import CenterSpec, run_sequence

        u = VarUniverse(("x", "y"))
        gens_a = [parse_polynomial("x*y", u), parse_polynomial("x^2 - y^2", u)]
        gens_b = [parse_polynomial("x^2 + y^2", u)]
        product = [a * b for a in gens_a for b in gens_b]
        outcome = run_sequence(product, u, [CenterSpec((), ("x", "y"))])
        assert outcome.verdict == "Resolved"
        for leaf in outcome.leaves():
            twin_a = derive_chart_for(leaf, gens_a, seed=1)
            twin_b = derive_chart_for(leaf, gens_b, seed=1)
            combined = twin_a.local_generator * twin_b.local_generator
            # gcd of pairwise products is the product of the gcds
            assert leaf.local_generator == combined
            assert twin_a.status == "ResolvedCertified"
            assert twin_b.status == "ResolvedCertified"


class TestConsoleEntry:
    def test_module_invocation(self, tmp_path):
        out = subprocess.run(
            [sys.executable, "-m", "eigenbouquet.cli", "demo", "kupa", "--grid", "3",
             "--report", str(tmp_path / "r.json")],
            capture_output=True,
            text=True,
        )
        assert out.returncode == 0
        assert "verdict: pass" in out.stdout
