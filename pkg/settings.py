"""
Runtime configuration
Defaults can be overridden through environment variables or a local .env file
"""

import os
from dataclasses import dataclass, replace

from dotenv import load_dotenv

from errors import ConfigurationError

# Load environment variables from .env file
load_dotenv()


@dataclass(frozen=True)
class Settings:
    """Numerical defaults shared by the library, the cli and the suite"""

    tol: float = 1e-10
    node_budget: int = 400
    jobs: int = 1
    color: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ConfigurationError(f"tolerance must be positive, got {self.tol}")
        if self.node_budget < 10:
            raise ConfigurationError(f"node budget too small: {self.node_budget}")
        if self.jobs < 1:
            raise ConfigurationError(f"jobs must be >= 1, got {self.jobs}")

    def with_overrides(self, **overrides):
        """Copy with the non-None overrides applied"""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def _env_number(name, cast, default):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return cast(raw)
    except ValueError as e:
        raise ConfigurationError(f"{name}={raw!r} is not a valid {cast.__name__}") from e


def load_settings():
    """Build Settings from the environment"""
    return Settings(
        tol=_env_number('LAPLACE_TYPE_TOL', float, Settings.tol),
        node_budget=_env_number('LAPLACE_TYPE_NODE_BUDGET', int, Settings.node_budget),
        jobs=_env_number('LAPLACE_TYPE_JOBS', int, Settings.jobs),
        color='NO_COLOR' not in os.environ,
    )


_settings = None


def get_settings():
    """Process-wide settings, read lazily on first use"""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings
