"""Runtime settings read from the environment."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

GP_PATH_ENV = "GGCHECK_GP_PATH"
GP_TIMEOUT_ENV = "GGCHECK_GP_TIMEOUT"


@dataclass(frozen=True)
class CasSettings:
    """How to run the external computer-algebra engine.

    Args:
        gp_path: the PARI/GP executable.
        timeout: seconds allowed per task.
    """

    gp_path: str = "gp"
    timeout: float = 120.0

    def __post_init__(self):
        """Validate the timeout."""
        if self.timeout <= 0:
            raise ValueError(f"The engine timeout must be positive, found {self.timeout}.")

    @classmethod
    def from_env(cls) -> CasSettings:
        """Settings from ``GGCHECK_GP_PATH`` and ``GGCHECK_GP_TIMEOUT``."""
        timeout = os.environ.get(GP_TIMEOUT_ENV, "120")
        try:
            seconds = float(timeout)
        except ValueError as e:
            raise ValueError(f"{GP_TIMEOUT_ENV} must be a number of seconds, found '{timeout}'.") from e
        return cls(os.environ.get(GP_PATH_ENV, "gp"), seconds)

    def override(self, gp_path: str | None = None, timeout: float | None = None) -> CasSettings:
        """Replace the values given explicitly, e.g. from command-line flags."""
        changes = {}
        if gp_path:
            changes["gp_path"] = gp_path
        if timeout is not None:
            changes["timeout"] = timeout
        return replace(self, **changes)
