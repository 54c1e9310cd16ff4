import logging

from rich.console import Console

from schattenlab.logging import ModernLogger


def _logger(tmp_path=None, **kwargs):
    console = Console(record=True, width=120)
    log_file = str(tmp_path / "logs" / "run.log") if tmp_path is not None else None
    return ModernLogger(name="schattenlab.test", console=console, log_file=log_file, **kwargs)


def test_library_records_reach_the_file(tmp_path):
    log = _logger(tmp_path, level="debug")
    logging.getLogger("schattenlab.test.numerics").debug("assembled %d rows", 4)
    log.close()
    text = (tmp_path / "logs" / "run.log").read_text()
    assert "assembled 4 rows" in text


def test_quiet_hides_progress_output():
    log = _logger(quiet=True)
    log.stage("hidden stage")
    log.success("hidden success")
    log.check("failing check", False, "1 > 0")
    log.info("hidden info")
    text = log.console.export_text()
    assert "hidden" not in text
    assert "failing check" in text


def test_result_table_formats_cells():
    log = _logger()
    log.result_table("norms", ("p", "value", "oracle"), [{"p": 2.0, "value": 1.0 / 3.0, "oracle": None}])
    text = log.console.export_text()
    assert "0.333333" in text
    assert "-" in text


def test_banner():
    log = _logger()
    log.banner("schattenlab", "schattenlab 0.1.0", "validate: defaults")
    assert "validate: defaults" in log.console.export_text()
