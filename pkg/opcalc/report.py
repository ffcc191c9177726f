#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Report assembly and persistence.

A report is a JSON document with run metadata (tool version, md5 of the
algebra file, command options, configuration snapshot, timestamp), one
section per job and a verdict summary. Timestamp and timings are the only
fields that differ between two runs on the same input; both live
under "timing".
"""

import os
import json
import logging
import hashlib
from datetime import datetime

import pytz

from opcalc import __version__

logger = logging.getLogger("opcalc.report")

VOLATILE_KEYS = ("timing",)


def file_md5(file_path):
    """MD5 of a file, or None when it does not exist."""
    if not os.path.exists(file_path):
        return None
    hasher = hashlib.md5()
    with open(file_path, 'rb') as f:
        buf = f.read(65536)
        while buf:
            hasher.update(buf)
            buf = f.read(65536)
    return hasher.hexdigest()


def now_iso(timezone="Asia/Shanghai"):
    try:
        tz = pytz.timezone(timezone)
    except pytz.UnknownTimeZoneError:
        logger.warning(f"Unknown time zone {timezone!r}, using UTC")
        tz = pytz.utc
    return datetime.now(tz).isoformat()


def table_payload(table, include_entries=True, max_degree=None):
    """BracketTable dict, with entries limited to degrees |a|, |b| <= max_degree."""
    data = table.to_dict(include_entries)
    if include_entries and max_degree is not None:
        kept = {}
        for key, value in data["entries"].items():
            a, b = (int(x) for x in key.split(","))
            if abs(a) <= max_degree and abs(b) <= max_degree:
                kept[key] = value
        if len(kept) < len(data["entries"]):
            data["entries_truncated_at"] = max_degree
        data["entries"] = kept
    return data


class Report:
    """Run record written as JSON, in the manner of a progress checkpoint."""

    def __init__(self, command, inputs, options=None, config=None):
        timezone = config.get("report", "timezone") if config else "Asia/Shanghai"
        self.indent = config.getint("report", "indent", fallback=2) if config else 2
        self.state = {
            "tool": {"name": "opcalc", "version": __version__},
            "command": command,
            "inputs": [{"path": os.path.basename(p), "md5": file_md5(p)} for p in inputs],
            "options": dict(options or {}),
            "config": config.snapshot() if config else {},
            "sections": {},
            "summary": {},
            "timing": {"created_at": now_iso(timezone), "seconds": {}},
        }

    @property
    def sections(self):
        return self.state["sections"]

    def add_section(self, name, payload, seconds=None):
        self.sections[name] = payload
        if seconds is not None:
            self.state["timing"]["seconds"][name] = round(seconds, 3)

    def summarize(self, exit_code):
        """Verdict counters over every section carrying a ``passed`` flag."""
        passed = failed = refused = 0
        failing = []
        for name, payload in self.sections.items():
            if payload.get("refused"):
                refused += 1
            elif payload.get("passed", True):
                passed += 1
            else:
                failed += 1
                failing.append(name)
        self.state["summary"] = {
            "sections": len(self.sections),
            "passed": passed,
            "failed": failed,
            "refused": refused,
            "failing": failing,
            "exit_code": exit_code,
        }
        return self.state["summary"]

    def deterministic_view(self):
        """The report without its timing block."""
        return {k: v for k, v in self.state.items() if k not in VOLATILE_KEYS}

    def to_json(self):
        return json.dumps(self.state, indent=self.indent, ensure_ascii=False, default=str)

    def save(self, path):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(self.to_json())
            f.write("\n")
        logger.info(f"Report saved to {path}")
        return path


def default_report_path(config, command, inputs):
    base = "_".join(os.path.splitext(os.path.basename(p))[0] for p in inputs) or "run"
    output_dir = config.get("report", "output_dir") if config else "reports"
    return os.path.join(output_dir, f"{command}_{base}.json")
