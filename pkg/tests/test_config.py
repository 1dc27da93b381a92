import pytest

from src.config import ENV_OVERRIDES, Settings, get_settings, load_settings, set_settings
from src.errors import MalformedInputError


@pytest.fixture(autouse=True)
def no_env(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for name in list(ENV_OVERRIDES) + ["JUSTINF_CONFIG"]:
        monkeypatch.delenv(name, raising=False)


def test_defaults_without_file():
    settings = load_settings()
    assert settings == Settings()
    assert settings.depth_cap == 12
    assert settings.output_format == "json"


def test_yaml_sections(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        "caps:\n  depth_cap: 16\n  enumerate_vertex_cap: 24\n"
        "cli:\n  seed: 7\n  format: plain\n"
        "logging:\n  level: DEBUG\n"
    )
    settings = load_settings(str(path))
    assert settings.depth_cap == 16
    assert settings.enumerate_vertex_cap == 24
    assert settings.seed == 7
    assert settings.output_format == "plain"
    assert settings.log_level == "DEBUG"


def test_config_path_from_environment(monkeypatch, tmp_path):
    path = tmp_path / "other.yaml"
    path.write_text("caps:\n  group_level_cap: 6\n")
    monkeypatch.setenv("JUSTINF_CONFIG", str(path))
    assert load_settings().group_level_cap == 6


def test_environment_beats_yaml(monkeypatch, tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("caps:\n  depth_cap: 16\n")
    monkeypatch.setenv("JUSTINF_DEPTH_CAP", "20")
    monkeypatch.setenv("JUSTINF_FORMAT", "dot")
    settings = load_settings(str(path))
    assert settings.depth_cap == 20
    assert settings.output_format == "dot"


def test_overrides_beat_environment(monkeypatch):
    monkeypatch.setenv("JUSTINF_SEED", "5")
    assert load_settings(seed=9).seed == 9
    assert load_settings(seed=None).seed == 5


@pytest.mark.parametrize("text", ["caps:\n  depth_cap: 0\n", "cli:\n  format: xml\n", "- just\n- a list\n"])
def test_invalid_config(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text)
    with pytest.raises(MalformedInputError):
        load_settings(str(path))


def test_missing_explicit_path(tmp_path):
    with pytest.raises(MalformedInputError):
        load_settings(str(tmp_path / "absent.yaml"))


def test_get_settings_is_lazy(tmp_path):
    (tmp_path / "config.yaml").write_text("caps:\n  matrix_level_cap: 4\n")
    set_settings(None)
    assert get_settings().matrix_level_cap == 4
    assert get_settings() is get_settings()
