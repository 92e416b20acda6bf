from qtop.config import Settings, get_settings


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("QTOP_TOL", "1e-6")
    monkeypatch.setenv("qtop_scalar_check_max_dim", "81")
    monkeypatch.setenv("QTOP_UNRELATED", "ignored")
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.tol == 1e-6
    assert settings.scalar_check_max_dim == 81
    assert settings.threads == 1


def test_settings_config():
    config = Settings.model_config
    assert config["env_prefix"] == "QTOP_"
    assert config["env_file"] == ".env"
    assert config["extra"] == "ignore"


def test_default_alpha():
    assert Settings(default_alpha_re=0.25, default_alpha_im=-0.5).default_alpha == 0.25 - 0.5j
