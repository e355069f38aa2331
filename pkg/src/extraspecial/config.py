from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

SUPPORTED_PRIMES = (2, 3, 5, 7)
DEFAULT_DEGREE_CAP = 64


class ConfigError(ValueError):
    pass


class DegreeCapError(ValueError):
    pass


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


@dataclass(frozen=True)
class GlobalConfig:
    """Prime, rank and degree cap shared by every graded computation.

    ``inflation_power`` is the exponent that carries the characteristic
    classes into the inflation image: 1 for p = 2 and p for odd p.
    """

    p: int = 2
    n: int = 1
    degree_cap: int = DEFAULT_DEGREE_CAP
    threads: int = 1
    cache_dir: Path | None = field(default=None, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ConfigError("p must be prime")
        if self.p not in SUPPORTED_PRIMES:
            raise ConfigError(f"p must be one of {SUPPORTED_PRIMES}")
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.degree_cap < 1:
            raise ConfigError("degree_cap must be at least 1")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")

    @property
    def inflation_power(self) -> int:
        return 1 if self.p == 2 else self.p

    def check_degree(self, d: int) -> int:
        if d > self.degree_cap:
            raise DegreeCapError(f"degree {d} exceeds cap {self.degree_cap}")
        return d


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "extraspecial"


def config_load(flags: dict | None = None, env: dict | None = None) -> GlobalConfig:
    """Resolve a configuration: explicit flags, then environment, then defaults."""
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    env = os.environ if env is None else env
    threads = flags.get("threads", env.get("EXTRASPECIAL_THREADS", 1))
    cache = flags.get("cache_dir", env.get("EXTRASPECIAL_CACHE_DIR"))
    try:
        threads = int(threads)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid thread count {threads!r}") from None
    return GlobalConfig(
        p=int(flags.get("p", 2)),
        n=int(flags.get("n", 1)),
        degree_cap=int(flags.get("degree_cap", DEFAULT_DEGREE_CAP)),
        threads=threads,
        cache_dir=Path(cache) if cache else default_cache_dir(),
    )
