import pytest

from hahnlab.config import (
    delete_config,
    get_config,
    list_config,
    run_config,
    set_config,
    validate_config,
    validate_file,
)
from hahnlab.runner import RunConfig


def test_missing_file_gives_defaults(config_path):
    assert not config_path.exists()
    assert get_config("prime", "3") == "3"
    assert list_config() == {}
    assert validate_file() == []
    assert run_config() == RunConfig()


def test_set_get_delete(config_path):
    set_config("levels", "4")
    set_config("format", "json")
    assert get_config("levels") == "4"
    assert config_path.read_text() == "format=json\nlevels=4\n"
    delete_config("levels")
    assert get_config("levels") is None
    delete_config("levels")
    assert list_config() == {"format": "json"}


@pytest.mark.parametrize("key, value, message", [
    ("colour", "red", "Unknown key 'colour'"),
    ("levels", "0", "positive integer"),
    ("levels", "many", "positive integer"),
    ("prime", "4", "prime number"),
    ("format", "yaml", "must be one of: json, text"),
])
def test_invalid_values(config_path, key, value, message):
    assert message in validate_config(key, value)
    with pytest.raises(ValueError, match=message):
        set_config(key, value)


def test_valid_values():
    assert validate_config("prime", "5") is None
    assert validate_config("log_level", "DEBUG") is None


def test_run_config_layers(config_path):
    set_config("prime", "5")
    set_config("levels", "3")
    assert run_config() == RunConfig(prime=5, levels=3)
    assert run_config(levels=6, budget=None) == RunConfig(prime=5, levels=6)
    with pytest.raises(ValueError, match="must be positive"):
        run_config(workers=0)


def test_validate_file_reports_lines(config_path):
    config_path.parent.mkdir(parents=True)
    config_path.write_text("# comment\nprime=3\nlevels\nwidth=2\nbudget=-1\n")
    assert validate_file() == [
        (3, "Bad format (missing '='): levels"),
        (4, "Unknown key 'width'. Valid keys: budget, format, levels, log_level, prime, term_budget, "
            "window_extra, workers"),
        (5, "'budget' must be a positive integer, got '-1'"),
    ]
    assert list_config() == {"prime": "3"}
