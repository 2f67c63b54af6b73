"""
Application settings backed by GLQ_* environment variables.

Values set explicitly (from CLI flags) win over the environment, which wins
over the built-in defaults.
"""

import os

from laplace_panels import ConfigError, Tolerances

ENV_PREFIX = "GLQ_"

_PARSERS = {
    "tol_touch": float,
    "tol_parallel": float,
    "zero_tol": float,
    "threads": int,
    "format": str,
    "log_level": str,
}

DEFAULTS = {
    "threads": 1,
    "format": "csv",
    "log_level": "WARNING",
}

TOLERANCE_KEYS = ("tol_touch", "tol_parallel", "zero_tol")


class AppSettings:
    def __init__(self, environ=None):
        self.environ = os.environ if environ is None else environ
        self._values = {}

    def set(self, key, value):
        if value is not None:
            self._values[key] = value

    def get(self, key, default=None):
        if key in self._values:
            return self._values[key]
        name = ENV_PREFIX + key.upper()
        raw = self.environ.get(name)
        if raw is not None and raw.strip() != "":
            parser = _PARSERS.get(key, str)
            try:
                return parser(raw.strip())
            except ValueError:
                raise ConfigError(f"Invalid value for {name}: {raw!r}") from None
        return DEFAULTS.get(key, default)

    def tolerances(self):
        overrides = {k: self.get(k) for k in TOLERANCE_KEYS if self.get(k) is not None}
        return Tolerances().replace(**overrides)
