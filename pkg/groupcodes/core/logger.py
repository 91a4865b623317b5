import os
import sys
import threading
from datetime import datetime

from groupcodes.core import config

_LOCK = threading.Lock()
_LOGS = []
_PROGRESS = {
    "status": "IDLE",
    "percent": 0,
    "current_step": "",
    "details": {},
}
_ECHO = {"stderr": config.LOG_ECHO}

def _ts() -> str:
    return datetime.now().strftime("%H:%M:%S")

def set_echo(enabled: bool) -> None:
    with _LOCK:
        _ECHO["stderr"] = bool(enabled)

def log(message: str) -> None:
    if message is None:
        return
    line = str(message)
    if not line.startswith("["):
        line = f"[{_ts()}] {line}"
    with _LOCK:
        _LOGS.append(line)
        if len(_LOGS) > config.MAX_LOG_LINES:
            del _LOGS[: len(_LOGS) - config.MAX_LOG_LINES]
        echo = _ECHO["stderr"]
    # stdout carries the result document, diagnostics go to stderr only
    if echo:
        print(line, file=sys.stderr, flush=True)
    try:
        if config.LOG_PATH:
            folder = os.path.dirname(config.LOG_PATH)
            if folder:
                os.makedirs(folder, exist_ok=True)
            with open(config.LOG_PATH, "a", encoding="utf-8") as f:
                f.write(line + "\n")
    except Exception:
        pass

def clear_logs() -> None:
    with _LOCK:
        _LOGS.clear()

def get_logs() -> list[str]:
    with _LOCK:
        return list(_LOGS)

def reset_progress() -> None:
    with _LOCK:
        _PROGRESS["status"] = "IDLE"
        _PROGRESS["percent"] = 0
        _PROGRESS["current_step"] = ""
        _PROGRESS["details"] = {}

def set_progress(**kwargs) -> None:
    with _LOCK:
        if kwargs.get("status") is not None:
            _PROGRESS["status"] = str(kwargs["status"]).upper()
        if kwargs.get("current_step") is not None:
            _PROGRESS["current_step"] = str(kwargs["current_step"])
        if isinstance(kwargs.get("details"), dict):
            _PROGRESS["details"].update(kwargs["details"])
        pct = kwargs.get("percent")
        if pct is None:
            total = kwargs.get("total")
            done = kwargs.get("done")
            if total and done is not None and int(total) > 0:
                pct = int((int(done) / int(total)) * 100)
        if pct is not None:
            try:
                pct_i = int(pct)
            except (TypeError, ValueError):
                pct_i = 0
            _PROGRESS["percent"] = max(0, min(100, pct_i))

def add_progress_detail(key: str, amount: int = 1) -> None:
    if not key:
        return
    try:
        delta = int(amount)
    except (TypeError, ValueError):
        delta = 0
    with _LOCK:
        cur = _PROGRESS["details"].get(key, 0)
        _PROGRESS["details"][key] = int(cur) + delta

def get_progress() -> dict:
    with _LOCK:
        return {
            "status": _PROGRESS.get("status", "IDLE"),
            "percent": int(_PROGRESS.get("percent", 0) or 0),
            "current_step": _PROGRESS.get("current_step", ""),
            "details": dict(_PROGRESS.get("details", {}) or {}),
            "log": list(_LOGS),
        }
