import pytest

from transverse.config import TransverseConfig


def test_defaults_validate(config: TransverseConfig) -> None:
    assert config.validate()
    assert config.to_dict()['engine_version'] == TransverseConfig.ENGINE_VERSION
    assert config.to_dict()['random_seed'] == 42


@pytest.mark.parametrize("name,value", [
    ('MAX_DIM', 0),
    ('HANDLE_STEP_LIMIT', -1),
    ('FLOOR_SEARCH_SLACK', -1),
    ('HOMFLY_NODE_LIMIT', 0),
    ('HOMFLY_VERIFY_FRACTION', 1.5),
    ('MARKED_STRAND', 0),
    ('PEEL_STATE_LIMIT', 0),
    ('WORKERS', 0),
    ('STABILITY_MARGIN', -1),
    ('LOG_LEVEL', 'CHATTY'),
])
def test_invalid_settings_are_rejected(config: TransverseConfig, name: str, value) -> None:
    setattr(config, name, value)
    with pytest.raises(ValueError):
        config.validate()


def test_instance_overrides_do_not_leak() -> None:
    first = TransverseConfig()
    first.MAX_DIM = 1
    assert first.MAX_DIM == 1
    assert TransverseConfig().MAX_DIM == TransverseConfig.MAX_DIM
