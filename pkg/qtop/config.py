import logging
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Comparison tolerances (QTOP_TOL overrides the default one)
    tol: float = 1e-9
    residue_tol: float = 1e-4
    scalar_tol: float = 1e-8

    # F(T) = s·Id proportionality check; above the dimension cap only column 0 is evaluated
    check_scalar: bool = True
    scalar_check_max_dim: int = 4096
    batch_entries: int = 1 << 20

    # ε-limits use Richardson extrapolation over (epsilon, epsilon / 10)
    epsilon: float = 1e-3

    # Generic color for the cabled N⁰ path
    default_alpha_re: float = 0.3141
    default_alpha_im: float = 0.1

    threads: int = 1
    log_level: str = "INFO"
    debug: bool = False

    model_config = SettingsConfigDict(env_prefix="QTOP_", env_file=".env", case_sensitive=False, extra="ignore")

    @property
    def default_alpha(self) -> complex:
        return complex(self.default_alpha_re, self.default_alpha_im)


@lru_cache()
def get_settings() -> Settings:
    return Settings()


def configure_logging(verbose: bool = False) -> None:
    settings = get_settings()
    level = logging.DEBUG if (verbose or settings.debug) else getattr(logging, settings.log_level.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
