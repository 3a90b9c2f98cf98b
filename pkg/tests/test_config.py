import pytest

from thzcap.config import dump_config, parse_config, parse_config_text, scenario_from_dict, scenario_to_dict
from thzcap.errors import ParseError, ValidationError

MINIMAL = """
frequency_ghz = 275.0
distance_m = 30.0
gain_tx_dbi = 55.0
gain_rx_dbi = 55.0
sigma_s_m = 0.04
p_over_n0_db = 25.0
"""


def test_fig1_preset_encodes_link_parameters():
    sc = parse_config("fig1")
    assert sc.geometry.frequency == 275e9
    assert sc.geometry.distance == 30.0
    assert sc.geometry.gain_tx == sc.geometry.gain_rx == 55.0
    assert sc.budget.p_over_n0_db == 25.0
    assert sc.fading.alpha == 2.0
    env = sc.environment
    assert (env.temperature, env.pressure, env.relative_humidity) == (296.0, 101325.0, 0.5)
    assert (sc.misalignment.aperture_radius, sc.misalignment.beam_waist) == (0.1, 0.2)


def test_fig2_preset_encodes_link_parameters():
    sc = parse_config("fig2")
    assert sc.geometry.frequency == 300e9
    assert sc.geometry.distance == 20.0
    assert sc.budget.p_over_n0_db == 20.0
    assert sc.geometry.gain_tx == sc.geometry.gain_rx == 55.0


@pytest.mark.parametrize("name", ["fig1", "fig2"])
def test_presets_round_trip(name):
    sc = parse_config(name)
    text = dump_config(sc)
    assert parse_config_text(text) == sc
    assert dump_config(parse_config_text(text)) == text


def test_defaults():
    sc = parse_config_text(MINIMAL)
    assert sc.fading.h_hat == 1.0
    assert sc.impairments.k_t == sc.impairments.k_r == 0.0
    assert sc.absorption.mode == "none"
    assert sc.no_fading is False


def test_humidity_out_of_range():
    with pytest.raises(ValidationError) as exc:
        parse_config_text(MINIMAL + "relative_humidity = 1.5\n")
    assert exc.value.field == "relative_humidity"


def test_unknown_key_rejected():
    with pytest.raises(ValidationError, match="frequency_hz: unknown key"):
        parse_config_text(MINIMAL + "frequency_hz = 3.0\n")


def test_missing_required_key():
    with pytest.raises(ValidationError, match="sigma_s_m"):
        parse_config_text(MINIMAL.replace("sigma_s_m = 0.04\n", ""))


def test_wrong_type():
    with pytest.raises(ValidationError, match="distance_m"):
        parse_config_text(MINIMAL.replace("distance_m = 30.0", 'distance_m = "30"'))


def test_field_error_reported_with_config_key():
    with pytest.raises(ValidationError) as exc:
        parse_config_text(MINIMAL.replace("sigma_s_m = 0.04", "sigma_s_m = -0.04"))
    assert exc.value.field == "sigma_s_m"


def test_syntax_error_has_line():
    with pytest.raises(ParseError) as exc:
        parse_config_text(MINIMAL + "mu = = 4\n", source="bad.scenario")
    assert exc.value.line == 8
    assert "bad.scenario" in str(exc.value)


def test_constant_absorption():
    sc = parse_config_text(MINIMAL + 'absorption_mode = "constant"\nabsorption_kappa_per_m = 0.01\n')
    assert sc.absorption.kappa == 0.01
    with pytest.raises(ValidationError, match="absorption_kappa_per_m"):
        parse_config_text(MINIMAL + 'absorption_mode = "constant"\n')
    with pytest.raises(ValidationError, match="absorption_mode"):
        parse_config_text(MINIMAL + 'absorption_mode = "hitran"\n')


def test_table_absorption_relative_path(tmp_path):
    (tmp_path / "kappa.csv").write_text("frequency_ghz,kappa_per_m\n270,0.001\n280,0.003\n")
    cfg = tmp_path / "link.scenario"
    cfg.write_text(MINIMAL + 'absorption_mode = "table"\nabsorption_table_path = "kappa.csv"\n')
    sc = parse_config(cfg)
    assert sc.absorption.frequencies == (270e9, 280e9)
    assert scenario_to_dict(sc)["absorption_table_path"] == "kappa.csv"
    # inline knots replace the file, as used by manifest replay
    inline = scenario_from_dict(scenario_to_dict(sc), table_knots=[[270.0, 0.001], [280.0, 0.003]])
    assert inline == sc


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        parse_config(tmp_path / "nope.scenario")
