import csv
import json

import numpy as np
import pytest

from schattenlab.core.errors import ParameterError
from schattenlab.core.export import (
    NORM_COLUMNS,
    format_cell,
    matrix_triplets,
    spectrum_summary,
    write_json,
    write_lattice,
    write_matrix,
    write_norm_table,
    write_spectrum,
)
from schattenlab.core.manifest import MANIFEST_NAME, ManifestStore, RunManifest
from schattenlab.numerics.hyperbolic import build_lattice
from schattenlab.numerics.norms import Functional, NormResult
from schattenlab.numerics.operators import assemble_monomial_multiplication, assemble_tg
from schattenlab.numerics.spaces import Symbol
from schattenlab.numerics.spectra import singular_values


def _read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


class TestRunManifest:
    def _manifest(self, command="spectrum"):
        return RunManifest(command=command, argv=["spectrum", "--n", "8"], config_hash="abc", config={})

    def test_outputs_store_file_names(self, tmp_path):
        manifest = self._manifest()
        manifest.add_output(tmp_path / "spectrum.csv")
        manifest.add_output(tmp_path / "spectrum.csv")
        assert manifest.outputs == ["spectrum.csv"]

    def test_finish(self):
        manifest = self._manifest()
        assert manifest.status == "running"
        manifest.finish(0)
        assert manifest.status == "ok"
        assert manifest.finished_at is not None
        failed = self._manifest()
        failed.finish(1)
        assert failed.status == "failed"

    def test_versions_recorded(self):
        versions = self._manifest().versions
        assert {"schattenlab", "numpy", "scipy", "python"} <= set(versions)

    def test_store_round_trip(self, tmp_path):
        store = ManifestStore(tmp_path / "run")
        assert store.load() is None
        manifest = self._manifest()
        manifest.finish(0)
        path = store.save(manifest)
        assert path.name == MANIFEST_NAME
        loaded = store.load()
        assert loaded.to_dict() == manifest.to_dict()

    def test_malformed_manifest(self):
        with pytest.raises(ParameterError):
            RunManifest.from_dict({"command": "spectrum", "bogus": 1})

    def test_list_runs(self, tmp_path):
        ManifestStore(tmp_path / "a").save(self._manifest("spectrum"))
        ManifestStore(tmp_path / "b").save(self._manifest("sweep"))
        (tmp_path / "c").mkdir()
        (tmp_path / "c" / MANIFEST_NAME).write_text("{broken")
        runs = ManifestStore.list_runs(tmp_path)
        assert sorted(r["command"] for r in runs) == ["spectrum", "sweep"]
        assert len(ManifestStore.list_runs(tmp_path, limit=1)) == 1


class TestFormatting:
    @pytest.mark.parametrize(
        "value,text",
        [(None, ""), (True, "true"), (np.bool_(False), "false"), (0.1, "0.10000000000000001"),
         (3, "3"), (np.int64(7), "7"), ("z^2", "z^2")],
    )
    def test_format_cell(self, value, text):
        assert format_cell(value) == text

    def test_json_handles_numpy_and_complex(self, tmp_path):
        path = write_json(tmp_path / "out" / "data.json", {"a": np.arange(3), "z": 1 + 2j, "x": np.float64(0.5)})
        assert json.loads(path.read_text()) == {"a": [0, 1, 2], "x": 0.5, "z": [1.0, 2.0]}


class TestMatrices:
    def test_npy_is_complex128(self, tmp_path):
        m = assemble_tg(Symbol.monomial(1), 0.0, 4)
        path = write_matrix(tmp_path / "m.npy", m)
        data = np.load(path)
        assert data.dtype == np.dtype("<c16")
        np.testing.assert_allclose(data, m.dense())

    def test_triplets_row_major(self):
        m = assemble_monomial_multiplication(2, 6)
        rows = matrix_triplets(m)
        keys = [(r["row"], r["col"]) for r in rows]
        assert keys == sorted(keys)
        assert len(rows) == m.nnz

    def test_csv_triplets(self, tmp_path):
        m = assemble_tg(Symbol.monomial(1), 0.0, 3)
        table = _read_csv(write_matrix(tmp_path / "m.csv", m, fmt="csv"))
        assert table[0] == ["row", "col", "re", "im"]
        assert len(table) == 1 + 3

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ParameterError):
            write_matrix(tmp_path / "m.mtx", assemble_tg(Symbol.monomial(1), 0.0, 3), fmt="mtx")


class TestTables:
    def test_spectrum(self, tmp_path):
        spectrum = singular_values(np.diag([3.0, 4.0]))
        table = _read_csv(write_spectrum(tmp_path / "spectrum.csv", spectrum))
        assert table == [["index", "sigma"], ["0", "4"], ["1", "3"]]
        summary = spectrum_summary(spectrum, [2.0])
        assert summary["orders"]["2"]["schatten_sum"] == pytest.approx(25.0)
        assert summary["count"] == 2

    def test_lattice_rings(self, tmp_path):
        lattice = build_lattice(1.0, 0.5)
        table = _read_csv(write_lattice(tmp_path / "lattice.csv", lattice))
        assert table[0] == ["ring", "index", "re", "im"]
        assert table[1][:2] == ["0", "0"]
        assert table[2][0] == "1"
        assert len(table) == 1 + lattice.size

    def test_norm_table(self, tmp_path):
        row = NormResult(2.0, Functional.BP, 1.0, oracle=2.0, params={"p": 2.0}).to_row("monomial:2")
        table = _read_csv(write_norm_table(tmp_path / "norms.csv", [row]))
        assert tuple(table[0]) == NORM_COLUMNS
        assert table[1][0] == "monomial:2"
        assert table[1][-1] == "2"
