from groupcodes.core import config, logger


def test_log_buffer_is_capped(monkeypatch):
    monkeypatch.setattr(config, "MAX_LOG_LINES", 100)
    logger.clear_logs()
    for i in range(150):
        logger.log(f"line {i}")
    logs = logger.get_logs()
    assert len(logs) == 100
    assert logs[-1].endswith("line 149")
    assert logs[0].endswith("line 50")


def test_log_lines_are_timestamped():
    logger.clear_logs()
    logger.log("ENUMERATE M=10")
    logger.log("[pre-stamped] kept")
    logger.log(None)
    logs = logger.get_logs()
    assert len(logs) == 2
    assert logs[0].startswith("[") and logs[0].endswith("] ENUMERATE M=10")
    assert logs[1] == "[pre-stamped] kept"


def test_log_file_appends(tmp_path, monkeypatch):
    path = tmp_path / "logs" / "groupcodes.log"
    monkeypatch.setattr(config, "LOG_PATH", str(path))
    logger.log("first")
    logger.log("second")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    assert lines[1].endswith("second")


def test_echo_goes_to_stderr(capsys):
    logger.set_echo(True)
    try:
        logger.log("visible")
    finally:
        logger.set_echo(False)
    logger.log("hidden")
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "visible" in captured.err
    assert "hidden" not in captured.err


def test_progress_tracking():
    logger.reset_progress()
    assert logger.get_progress()["status"] == "IDLE"
    logger.set_progress(status="running", current_step="evaluate", done=3, total=12)
    logger.add_progress_detail("tested", 2)
    logger.add_progress_detail("tested")
    logger.add_progress_detail("", 5)
    p = logger.get_progress()
    assert p["status"] == "RUNNING"
    assert p["current_step"] == "evaluate"
    assert p["percent"] == 25
    assert p["details"] == {"tested": 3}
    logger.set_progress(percent=250)
    assert logger.get_progress()["percent"] == 100
    logger.set_progress(percent="bad")
    assert logger.get_progress()["percent"] == 0


def test_env_helpers(monkeypatch):
    monkeypatch.setenv("GROUPCODES_TEST_INT", "5")
    assert config._env_int("GROUPCODES_TEST_INT", 2000, minimum=100) == 100
    monkeypatch.setenv("GROUPCODES_TEST_INT", "oops")
    assert config._env_int("GROUPCODES_TEST_INT", 7) == 7
    monkeypatch.setenv("GROUPCODES_TEST_BOOL", "Yes")
    assert config._env_bool("GROUPCODES_TEST_BOOL") is True
    monkeypatch.delenv("GROUPCODES_TEST_BOOL")
    assert config._env_bool("GROUPCODES_TEST_BOOL", True) is True
    monkeypatch.setenv("GROUPCODES_TEST_STR", "  /tmp/x.log ")
    assert config._env_str("GROUPCODES_TEST_STR") == "/tmp/x.log"


def test_resolve_threads(monkeypatch):
    monkeypatch.setattr(config, "DEFAULT_THREADS", 3)
    assert config.resolve_threads(None) == 3
    assert config.resolve_threads(0) == 1
    assert config.resolve_threads(500) == 64
    assert config.resolve_threads(8) == 8
