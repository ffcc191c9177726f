#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Configuration handler for opcalc.
Reads the INI file of engine windows, worker threads, report and logging options.
"""

import os
import configparser
import logging

from opcalc.exceptions import InputError

logger = logging.getLogger("opcalc.config")

THREADS_ENV = "OPCALC_THREADS"

_TRUE = ("1", "yes", "true", "on")
_FALSE = ("0", "no", "false", "off")


def _as_bool(text):
    value = text.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError(f"not a boolean: {text!r}")


class Config:
    """INI configuration of engine windows, parallelism, reports and logging."""

    DEFAULT_CONFIG = {
        'engine': {
            'n_max': '5',
            'field': 'Q',
            'stability_offset': '2',
            'window_margin': '2',  # guard band of the u-complexes
            'bracket_max_degree': '6'
        },
        'parallel': {
            'threads': '4'
        },
        'report': {
            'output_dir': 'reports',
            'indent': '2',
            'timezone': 'Asia/Shanghai',
            'include_tables': 'True'
        },
        'logging': {
            'log_file': 'opcalc.log',
            'level': 'INFO'
        }
    }

    def __init__(self, config_file="config.ini", create=True):
        self.config_file = config_file
        self.config = configparser.ConfigParser()

        if not os.path.exists(config_file):
            self._fill_defaults(report=False)
            if create:
                logger.info(f"Writing default configuration to {config_file}")
                self.save()
            return

        logger.info(f"Reading configuration from {config_file}")
        try:
            self.config.read(config_file, encoding="utf-8")
        except configparser.Error as e:
            raise InputError(f"{config_file}: {e}")
        self._fill_defaults(report=True)

    def _fill_defaults(self, report):
        """Add every section and option the file leaves out."""
        for section, options in self.DEFAULT_CONFIG.items():
            if not self.config.has_section(section):
                if report:
                    logger.warning(f"Section [{section}] missing, using defaults")
                self.config.add_section(section)
            for option, value in options.items():
                if self.config.has_option(section, option):
                    continue
                if report:
                    logger.warning(f"Option {section}.{option} missing, using {value!r}")
                self.config.set(section, option, value)

    def _lookup(self, section, option, convert, fallback):
        """Typed read; a missing or unparsable value yields fallback, then the default."""
        try:
            return convert(self.config.get(section, option))
        except (configparser.NoSectionError, configparser.NoOptionError, ValueError) as e:
            if fallback is not None:
                return fallback
            default = self.DEFAULT_CONFIG.get(section, {}).get(option)
            if default is None:
                logger.error(f"No value for {section}.{option}: {e}")
                return None
            if isinstance(e, ValueError):
                logger.warning(f"Bad value for {section}.{option}, using {default!r}")
            return convert(default)

    def get(self, section, option, fallback=None):
        return self._lookup(section, option, str, fallback)

    def getint(self, section, option, fallback=None):
        return self._lookup(section, option, int, fallback)

    def getboolean(self, section, option, fallback=None):
        return self._lookup(section, option, _as_bool, fallback)

    def set(self, section, option, value):
        if not self.config.has_section(section):
            self.config.add_section(section)
        self.config.set(section, option, str(value))

    def save(self):
        with open(self.config_file, 'w', encoding="utf-8") as f:
            self.config.write(f)
        logger.info(f"Configuration saved to {self.config_file}")

    def threads(self):
        """Worker count, capped by the OPCALC_THREADS environment variable."""
        threads = max(1, self.getint("parallel", "threads", fallback=1))
        cap = os.environ.get(THREADS_ENV)
        if cap:
            try:
                threads = min(threads, max(1, int(cap)))
            except ValueError:
                raise InputError(f"{THREADS_ENV} must be an integer, got {cap!r}")
        return threads

    def snapshot(self):
        """Plain dict of every section, for report metadata."""
        return {section: dict(self.config.items(section)) for section in self.config.sections()}
