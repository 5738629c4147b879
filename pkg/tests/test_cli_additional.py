import json
import logging

import pandas as pd
import pytest

from real_pinwheel.cli import main


def test_cli_density(capfd):
    rc = main(["density", "--instance", "2,3,6"])
    assert rc == 0
    out, _ = capfd.readouterr()
    assert out.splitlines() == ["density 1", "target 5/6: exceeds"]


def test_cli_density_custom_target(capfd):
    rc = main(["density", "--instance", "2,3,6", "--target", "1", "--json"])
    assert rc == 0
    data = json.loads(capfd.readouterr()[0])
    assert data == {"instance": "2,3,6", "density": "1", "target": "1", "within_target": True}


def test_cli_classify(capfd):
    rc = main(["classify", "--a1", "2", "--a2", "4"])
    assert rc == 0
    out, _ = capfd.readouterr()
    assert out.splitlines() == ["case I", "a3 12", "schedule |2131|"]


def test_cli_classify_outside_j(caplog):
    caplog.set_level(logging.ERROR)
    rc = main(["classify", "--a1", "3", "--a2", "3"])
    assert rc == 2
    assert any("NotInJ" in r.getMessage() for r in caplog.records)


def test_cli_regions_dump_writes_csv(tmp_path, capfd):
    out = tmp_path / "vertices.csv"
    rc = main(["regions-dump", "--output", str(out)])
    assert rc == 0
    text, _ = capfd.readouterr()
    lines = text.splitlines()
    assert lines[0] == "J:"
    assert "1 -1 > 0" in lines
    assert any(line.startswith("vertices ") for line in lines)
    df = pd.read_csv(out, dtype=str)
    assert set(df["region"]) == {"J", "M1", "M2", "M3", "M4", "M5", "M6", "M7"}


def test_cli_parse_error_exit_code(caplog):
    caplog.set_level(logging.ERROR)
    rc = main(["schedule", "--instance", "2,x"])
    assert rc == 3
    assert any("position 2" in r.getMessage() for r in caplog.records)


def test_cli_task_out_of_range(capfd):
    assert main(["verify", "--schedule", "123", "--instance", "2,2"]) == 3


def test_cli_unknown_region(capfd):
    assert main(["cover-check", "--drop", "M9"]) == 3


@pytest.mark.parametrize("argv", [[], ["bogus"], ["verify", "--schedule", "12"], ["search", "--instance", "2", "--max-period", "x"]])
def test_cli_usage_errors(capfd, argv):
    assert main(argv) == 3


def test_cli_help_exits_cleanly(capfd):
    assert main(["--help"]) == 0


def test_cli_rejects_zero_threads(capfd):
    assert main(["verify", "--schedule", "1", "--instance", "2", "--threads", "0"]) == 3


def test_cli_threads_do_not_change_output(capfd):
    main(["cover-check", "--drop", "M5", "--json"])
    single = capfd.readouterr()[0]
    main(["cover-check", "--drop", "M5", "--json", "--threads", "4"])
    threaded = capfd.readouterr()[0]
    assert single == threaded


def test_cli_output_is_deterministic(capfd):
    main(["schedule", "--instance", "9,3/2,9,9"])
    first = capfd.readouterr()[0]
    main(["schedule", "--instance", "9,3/2,9,9"])
    assert capfd.readouterr()[0] == first


def test_cli_verbose_emits_debug(caplog):
    caplog.set_level(logging.DEBUG)
    rc = main(["schedule", "--instance", "2,4,4", "--verbose"])
    assert rc == 0
    texts = "\n".join(r.getMessage() for r in caplog.records)
    assert "Verbose mode enabled" in texts
