import json

import pytest

from schattenlab.cli import build_parser, main, parse_floats, parse_symbol
from schattenlab.core.config import get_config
from schattenlab.core.errors import ParameterError
from schattenlab.numerics.spaces import Symbol, SymbolKind


def _run_dirs(root, command):
    return sorted(p for p in root.iterdir() if p.is_dir() and p.name.startswith(f"{command}_"))


class TestParsing:
    def test_compact_symbol(self):
        assert parse_symbol("monomial:3") == Symbol.monomial(3)

    def test_symbol_document(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text(json.dumps(Symbol.kernel_power(0.5, 2.0).to_dict()))
        g = parse_symbol(str(path))
        assert g.kind is SymbolKind.KERNEL_POWER
        assert g.gamma == 2.0

    def test_unreadable_document(self, tmp_path):
        with pytest.raises(ParameterError):
            parse_symbol(str(tmp_path / "missing.json"))

    def test_floats(self):
        assert parse_floats("0,0.5", "alpha") == [0.0, 0.5]
        assert parse_floats("2", "p") == [2.0]
        assert parse_floats(None, "p") is None
        with pytest.raises(ParameterError):
            parse_floats("a,b", "p")

    def test_parser_commands(self):
        args = build_parser().parse_args(["sweep", "monomial", "--p", "3", "--k-max", "6"])
        assert args.command == "sweep"
        assert args.family == "monomial"
        assert args.k_max == 6


class TestMain:
    def test_no_command(self):
        assert main([]) == 2

    def test_validate_list_writes_nothing(self, tmp_path):
        assert main(["validate", "--list", "--out", str(tmp_path), "--quiet"]) == 0
        assert list(tmp_path.iterdir()) == []

    def test_spectrum_run(self, tmp_path):
        code = main(["spectrum", "--symbol", "monomial:2", "--n", "32", "--p", "2",
                     "--clip", "0.99", "--out", str(tmp_path), "--quiet"])
        assert code == 0
        (run_dir,) = _run_dirs(tmp_path, "spectrum")
        manifest = json.loads((run_dir / "manifest.json").read_text())
        assert manifest["status"] == "ok"
        assert manifest["exit_code"] == 0
        assert "spectrum.csv" in manifest["outputs"]
        assert (run_dir / "schatten.csv").exists()
        summary = json.loads((run_dir / "summary.json").read_text())
        assert summary["N"] == 32

    def test_run_config_replays(self, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        assert main(["spectrum", "--symbol", "monomial:1", "--n", "16", "--clip", "0.99",
                     "--out", str(first), "--quiet"]) == 0
        assert get_config().get("grid.r_max") == 0.99
        (run_dir,) = _run_dirs(first, "spectrum")
        manifest = json.loads((run_dir / "manifest.json").read_text())
        assert "config.json" in manifest["outputs"]
        exported = json.loads((run_dir / "config.json").read_text())
        assert exported["grid"]["r_max"] == 0.99

        assert main(["spectrum", "--symbol", "monomial:1", "--n", "16",
                     "--config", str(run_dir / "config.json"), "--out", str(second), "--quiet"]) == 0
        (replay_dir,) = _run_dirs(second, "spectrum")
        replay = json.loads((replay_dir / "manifest.json").read_text())
        assert replay["config_hash"] == manifest["config_hash"]

    def test_matrix_export(self, tmp_path):
        code = main(["spectrum", "--symbol", "monomial:1", "--n", "8", "--matrix", "csv",
                     "--out", str(tmp_path), "--quiet"])
        assert code == 0
        (run_dir,) = _run_dirs(tmp_path, "spectrum")
        assert (run_dir / "matrix.csv").read_text().startswith("row,col,re,im")

    def test_bad_symbol(self, tmp_path):
        code = main(["spectrum", "--symbol", "bogus:1", "--out", str(tmp_path), "--quiet"])
        assert code == 2
        (run_dir,) = _run_dirs(tmp_path, "spectrum")
        manifest = json.loads((run_dir / "manifest.json").read_text())
        assert manifest["status"] == "failed"
        assert manifest["summary"]["error"]["exit_code"] == 2

    def test_zero_threads(self, tmp_path):
        assert main(["spectrum", "--symbol", "monomial:1", "--threads", "0", "--out", str(tmp_path)]) == 2

    def test_unknown_suite(self, tmp_path):
        assert main(["validate", "nope", "--out", str(tmp_path), "--quiet"]) == 2

    def test_monomial_sweep(self, tmp_path):
        code = main(["sweep", "monomial", "--p", "3", "--k-min", "2", "--k-max", "10", "--no-functional",
                     "--out", str(tmp_path), "--quiet"])
        assert code == 0
        (run_dir,) = _run_dirs(tmp_path, "sweep")
        fits = json.loads((run_dir / "sweep_monomial_fits.json").read_text())
        assert fits["regime"]["regime"] == "X^p_alpha"
        assert fits["regime"]["characterized"] is False
        assert "iff" not in fits["regime"]["characterization"]
        assert fits["fits"]["schatten"]["exponent"] == pytest.approx(0.5, abs=0.05)
