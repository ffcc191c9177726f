import pytest

from opcalc.config import THREADS_ENV, Config
from opcalc.exceptions import InputError


def test_defaults_are_written(tmp_path):
    path = tmp_path / "config.ini"
    config = Config(str(path))
    assert path.exists()
    assert config.getint("engine", "n_max") == 5
    assert config.get("engine", "field") == "Q"
    assert config.getboolean("report", "include_tables") is True


def test_no_file_is_created_on_request(tmp_path):
    path = tmp_path / "config.ini"
    config = Config(str(path), create=False)
    assert not path.exists()
    assert config.getint("parallel", "threads") == 4


def test_missing_options_are_filled(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text("[engine]\nn_max = 3\n", encoding="utf-8")
    config = Config(str(path))
    assert config.getint("engine", "n_max") == 3
    assert config.getint("engine", "window_margin") == 2
    assert config.get("report", "output_dir") == "reports"
    assert "logging" in config.snapshot()


def test_bad_values_fall_back(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text("[engine]\nn_max = many\n", encoding="utf-8")
    config = Config(str(path))
    assert config.getint("engine", "n_max") == 5
    assert config.get("engine", "unknown", fallback="x") == "x"


def test_unreadable_file(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text("n_max = 3\n", encoding="utf-8")
    with pytest.raises(InputError):
        Config(str(path))


def test_set_and_save(tmp_path):
    path = tmp_path / "config.ini"
    config = Config(str(path))
    config.set("parallel", "threads", 8)
    config.save()
    assert Config(str(path)).getint("parallel", "threads") == 8


def test_thread_cap(tmp_path, monkeypatch):
    config = Config(str(tmp_path / "config.ini"), create=False)
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert config.threads() == 4
    monkeypatch.setenv(THREADS_ENV, "2")
    assert config.threads() == 2
    monkeypatch.setenv(THREADS_ENV, "16")
    assert config.threads() == 4
    monkeypatch.setenv(THREADS_ENV, "two")
    with pytest.raises(InputError):
        config.threads()
