"""Numerical settings: zero-eigenvalue threshold and logarithm base.

Values live in a context variable so overrides stay local to a ``with``
block (and to the thread or task that entered it).
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Settings:
    # tau = zero_rel_tol * max(1, largest |eigenvalue|)
    zero_rel_tol: float = 1e-12
    log_base: float = 2.0

    def zero_threshold(self, scale: float) -> float:
        return self.zero_rel_tol * max(1.0, float(scale))

    @property
    def log_scale(self) -> float:
        """Multiply a natural-log quantity by this to convert to ``log_base`` units."""
        return 1.0 / math.log(self.log_base)


_current: contextvars.ContextVar[Settings] = contextvars.ContextVar(
    "asymfreeze_settings", default=Settings()
)


def get_settings() -> Settings:
    return _current.get()


@contextlib.contextmanager
def use_settings(**overrides):
    """Temporarily override settings, e.g. ``use_settings(log_base=math.e)``."""
    token = _current.set(replace(_current.get(), **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
