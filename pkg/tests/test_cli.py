import json

import numpy as np
import pytest

from rctm.cli import main
from rctm.core import make_key
from rctm.prbg import generate_bits, pack_bytes, unpack_bits


def run(argv):
    return main([str(a) for a in argv])


class TestGenerate:
    def test_ascii_bits_file(self, tmp_path):
        out = tmp_path / "s.txt"
        assert run(["generate", "--mu", 61.81, "--x0", 0.23, "--bits", 1000,
                    "--format", "ascii-bits", "-o", out]) == 0
        text = out.read_text()
        assert len(text) == 1001 and text.endswith("\n")
        assert set(text[:-1]) <= {"0", "1"}

    def test_invalid_mu_exits_1(self, tmp_path, capsys):
        out = tmp_path / "s.txt"
        code = run(["generate", "--mu", 4.0, "--x0", 0.5, "--bits", 100, "-o", out])
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error:") and err.count("\n") == 1
        assert not out.exists()

    def test_raw_round_trip_matches_library(self, tmp_path):
        out = tmp_path / "s.bin"
        assert run(["generate", "--mu", 61.81, "--x0", 0.23, "--bits", 8000,
                    "--format", "raw", "-o", out]) == 0
        expected, _ = pack_bytes(generate_bits(make_key(61.81, 0.23), 8000))
        assert out.read_bytes() == expected

    def test_raw_and_ascii_encode_identical_bits(self, tmp_path):
        raw = tmp_path / "s.bin"
        txt = tmp_path / "s.txt"
        args = ["--mu", 61.81, "--x0", 0.23, "--bits", 4096]
        run(["generate", *args, "--format", "raw", "-o", raw])
        run(["generate", *args, "--format", "ascii-bits", "-o", txt])
        from_raw = unpack_bits(raw.read_bytes(), 4096)
        from_txt = np.frombuffer(txt.read_bytes()[:-1], dtype=np.uint8) - ord("0")
        assert np.array_equal(from_raw, from_txt)

    def test_byte_deterministic(self, tmp_path):
        a = tmp_path / "a.bin"
        b = tmp_path / "b.bin"
        args = ["--mu", 61.81, "--x0", 0.23, "--bits", 9000, "--format", "raw"]
        run(["generate", *args, "-o", a])
        run(["generate", *args, "-o", b])
        assert a.read_bytes() == b.read_bytes()

    def test_meta_sidecar(self, tmp_path):
        out = tmp_path / "s.bin"
        run(["generate", "--mu", 61.81, "--x0", 0.23, "--bits", 100,
             "--format", "raw", "--meta", "-o", out])
        meta = json.loads((tmp_path / "s.bin.meta.json").read_text())
        assert meta["mu"] == 61.81
        assert meta["mu_hex"] == (61.81).hex()
        assert meta["bits"] == 100
        assert meta["pad_bits"] == 4

    def test_degenerate_orbit_warns_but_writes(self, tmp_path, capsys):
        # x0 = 0.5 collapses to the fixed point 0 after two steps
        out = tmp_path / "s.txt"
        code = run(["generate", "--mu", 61.81, "--x0", 0.5, "--bits", 500,
                    "--format", "ascii-bits", "-o", out])
        assert code == 0
        assert "degenerate" in capsys.readouterr().err
        assert len(out.read_text()) == 501

    def test_hex_float_parameter(self, tmp_path):
        out = tmp_path / "s.txt"
        assert run(["generate", "--mu", "0x1.ee7ae147ae148p+5", "--x0", 0.23,
                    "--bits", 64, "--format", "ascii-bits", "-o", out]) == 0
        ref = tmp_path / "ref.txt"
        run(["generate", "--mu", 61.81, "--x0", 0.23, "--bits", 64,
             "--format", "ascii-bits", "-o", ref])
        assert out.read_text() == ref.read_text()

    def test_unwritable_output_exits_1(self, tmp_path, capsys):
        code = run(["generate", "--mu", 61.81, "--x0", 0.23, "--bits", 100,
                    "-o", tmp_path / "missing_dir" / "s.bin"])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestExport:
    def test_segments_and_manifest(self, tmp_path):
        prefix = tmp_path / "seg"
        assert run(["export", "--mu", 61.81, "--x0", 0.23, "--bits", 800,
                    "--segments", 3, "--format", "raw", "-o", prefix]) == 0
        manifest = json.loads((tmp_path / "seg_manifest.json").read_text())
        assert manifest["segments"] == 3
        assert len(manifest["files"]) == 3
        joined = b"".join((tmp_path / f"seg_{i:03d}.bin").read_bytes() for i in range(3))
        whole, _ = pack_bytes(generate_bits(make_key(61.81, 0.23), 2400))
        assert joined == whole


class TestDynamicsCommand:
    def test_bifurcation_csv(self, tmp_path):
        out = tmp_path / "bif.csv"
        assert run(["analyze-dynamics", "--what", "bifurcation",
                    "--mu-min", 2.1, "--mu-max", 10.1, "--grid-points", 5,
                    "--x0", 0.23, "--settle", 50, "--keep", 10,
                    "--format", "csv", "-o", out]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "mu,x"
        assert len(lines) == 1 + 5 * 10
        mu, x = lines[1].split(",")
        assert 0.0 <= float(x) <= 1.0

    def test_lyapunov_csv(self, tmp_path):
        out = tmp_path / "lyap.csv"
        assert run(["analyze-dynamics", "--what", "lyapunov",
                    "--mu-min", 2.5, "--mu-max", 90.5, "--grid-points", 4,
                    "--iterations", 2000, "--format", "csv", "-o", out]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "mu,lambda"
        assert len(lines) == 5
        for line in lines[1:]:
            assert float(line.split(",")[1]) > 0

    def test_coverage_json_single_mu(self, tmp_path):
        out = tmp_path / "cov.json"
        assert run(["analyze-dynamics", "--what", "coverage", "--mu", 20.33,
                    "--x0", 0.23, "--iterations", 20000, "--bins", 100,
                    "--format", "json", "-o", out]) == 0
        data = json.loads(out.read_text())
        assert data["points"][0]["coverage"] == 1.0


class TestBatteries:
    def test_nist_report(self, tmp_path):
        out = tmp_path / "nist.json"
        code = run(["test-nist", "--mu", 61.81, "--x0", 0.23,
                    "--streams", 20, "--bits", 20000, "--burn-in", 1000, "-o", out])
        data = json.loads(out.read_text())
        assert data["battery"] == "nist-subset"
        assert {e["test"] for e in data["entries"]} >= {"monobit", "dft", "serial_2"}
        assert code == (0 if data["passed"] else 2)

    def test_ent_report_passes_at_scale(self, tmp_path):
        out = tmp_path / "ent.json"
        code = run(["test-ent", "--mu", 61.81, "--x0", 0.23,
                    "--bytes", 1_000_000, "--burn-in", 1000, "-o", out])
        assert code == 0
        data = json.loads(out.read_text())
        assert data["passed"] is True
        assert data["report"]["entropy_bits_per_byte"] >= 7.999

    def test_ent_degenerate_stream_exits_2(self, tmp_path, capsys):
        out = tmp_path / "ent.json"
        code = run(["test-ent", "--mu", 61.81, "--x0", 0.5,
                    "--bytes", 2048, "--burn-in", 0, "-o", out])
        assert code == 2
        assert "degenerate" in capsys.readouterr().err
        data = json.loads(out.read_text())
        assert data["passed"] is False
        assert data["checks"]["entropy"] is False

    def test_nan_statistics_serialize_as_null(self, tmp_path):
        # an all-zero-bias stream makes the runs statistic undefined
        from rctm.cli import _jsonable
        assert _jsonable({"stat": float("nan")}) == {"stat": None}


class TestSweepCommand:
    def test_correlation_sweep_json_and_csv(self, tmp_path):
        out = tmp_path / "sweep.json"
        pairs_csv = tmp_path / "pairs.csv"
        assert run(["sweep", "--kind", "correlation", "--mu", 61.81, "--x0", 0.23,
                    "--delta", "0x1p-48", "--vary", "x0", "--pairs", 20,
                    "--length", 500, "-o", out, "--pairs-csv", pairs_csv]) == 0
        data = json.loads(out.read_text())
        assert data["pairs"] == 20
        assert abs(data["aggregates"]["correlation"]["mean_abs"]) <= 0.2
        lines = pairs_csv.read_text().splitlines()
        assert lines[0] == "pair,correlation,uaci_pct,npcr_pct"
        assert len(lines) == 21

    def test_sensitivity_json(self, tmp_path):
        out = tmp_path / "sens.json"
        assert run(["sweep", "--kind", "sensitivity", "--case", "vary_mu",
                    "--mu", 49.13, "--x0", 0.28, "--delta", "0x1p-48",
                    "--sequences", 5, "--length", 1000, "-o", out]) == 0
        data = json.loads(out.read_text())
        assert data["max_abs_off_diagonal"] <= 0.2
        assert len(data["preview"]) == 5
        assert len(data["preview"][0]) == 30

    def test_entropy_sweep_json(self, tmp_path):
        out = tmp_path / "entropy.json"
        assert run(["sweep", "--kind", "entropy", "--mu", 61.81, "--x0", 0.23,
                    "--sequences", 10, "--length", 20000, "-o", out]) == 0
        data = json.loads(out.read_text())
        assert data["mean_entropy"] >= 7.9
        assert len(data["entropies"]) == 10


class TestKeyspaceCommand:
    def test_report(self, tmp_path):
        out = tmp_path / "ks.json"
        assert run(["keyspace", "--precision-exponent", -16, "-o", out]) == 0
        data = json.loads(out.read_text())
        assert round(data["total_bits"]) == 199
        assert round(data["weak_key_adjusted_bits"]) == 198
