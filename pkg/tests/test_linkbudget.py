import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thzcap.errors import DomainError, OutOfRangeError, ParseError, ValidationError
from thzcap.linkbudget import (
    SPEED_OF_LIGHT,
    STANDARD_ATMOSPHERE,
    AbsorptionProvider,
    Environment,
    LinkGeometry,
    absorption_amplitude,
    absorption_coefficient,
    dump_absorption_table,
    friis_amplitude,
    load_absorption_table,
    path_amplitude,
)


def friis_db_oracle(f, d, gt, gr):
    """Independent dB-domain Friis: (Gt + Gr) - FSPL."""
    return gt + gr - 20 * math.log10(4 * math.pi * f * d / SPEED_OF_LIGHT)


# values from a 40-digit mpmath evaluation of the dB-domain formula
@pytest.mark.parametrize(
    "f, d, expected, power_db",
    [(275e9, 30.0, 0.914443527637, -0.7768621929), (300e9, 20.0, 1.2573598505, 1.98919177)],
)
def test_friis_golden(f, d, expected, power_db):
    h = friis_amplitude(LinkGeometry(f, d, 55.0, 55.0))
    assert h == pytest.approx(expected, rel=1e-10)
    assert 20 * math.log10(h) == pytest.approx(power_db, abs=1e-7)


def test_friis_unit_distance_identity():
    f = 300e9
    d = SPEED_OF_LIGHT / (4 * math.pi * f)
    assert friis_amplitude(LinkGeometry(f, d, 0.0, 0.0)) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("field, kwargs", [
    ("frequency", dict(frequency=0.0, distance=1.0)),
    ("frequency", dict(frequency=-1e9, distance=1.0)),
    ("distance", dict(frequency=1e9, distance=0.0)),
    ("distance", dict(frequency=1e9, distance=-3.0)),
])
def test_geometry_domain_errors_name_field(field, kwargs):
    with pytest.raises(DomainError) as exc:
        LinkGeometry(**kwargs)
    assert exc.value.field == field


def test_negative_gain_allowed():
    assert friis_amplitude(LinkGeometry(1e9, 1.0, -3.0, 0.0)) > 0


def test_friis_strictly_decreasing_in_distance_and_frequency():
    d = np.linspace(1, 100, 12)
    f = np.linspace(100e9, 1e12, 12)
    hd = [friis_amplitude(LinkGeometry(275e9, x, 55, 55)) for x in d]
    hf = [friis_amplitude(LinkGeometry(x, 30.0, 55, 55)) for x in f]
    assert all(np.diff(hd) < 0)
    assert all(np.diff(hf) < 0)


@given(
    f=st.floats(1e9, 1e13),
    d=st.floats(1e-2, 1e4),
    gt=st.floats(-20, 70),
    gr=st.floats(-20, 70),
)
def test_friis_db_round_trip(f, d, gt, gr):
    h = friis_amplitude(LinkGeometry(f, d, gt, gr))
    assert 20 * math.log10(h) == pytest.approx(friis_db_oracle(f, d, gt, gr), abs=1e-9)


def test_environment_validation():
    with pytest.raises(ValidationError, match="relative_humidity"):
        Environment(296.0, 101325.0, 1.5)
    with pytest.raises(ValidationError, match="temperature"):
        Environment(0.0, 101325.0, 0.5)
    with pytest.raises(ValidationError, match="pressure"):
        Environment(296.0, -1.0, 0.5)


def test_absorption_modes():
    env = STANDARD_ATMOSPHERE
    assert absorption_coefficient(env, 275e9, AbsorptionProvider.none()) == 0.0
    assert absorption_coefficient(env, 123e9, AbsorptionProvider.constant(0.01)) == 0.01
    table = AbsorptionProvider.table([(275e9, 0.002), (300e9, 0.004)])
    assert absorption_coefficient(env, 287.5e9, table) == pytest.approx(0.003, rel=1e-14)


def test_table_reproduces_knots_exactly():
    knots = [(250e9, 0.0011), (275e9, 0.0023), (300e9, 0.0047), (330e9, 0.0312)]
    table = AbsorptionProvider.table(knots)
    for f, k in knots:
        assert absorption_coefficient(STANDARD_ATMOSPHERE, f, table) == k


def test_table_no_extrapolation():
    table = AbsorptionProvider.table([(275e9, 0.002), (300e9, 0.004)])
    with pytest.raises(OutOfRangeError):
        absorption_coefficient(STANDARD_ATMOSPHERE, 301e9, table)
    with pytest.raises(OutOfRangeError):
        absorption_coefficient(STANDARD_ATMOSPHERE, 274e9, table)


def test_environment_keyed_table():
    other = Environment(280.0, 101325.0, 0.2)
    table = AbsorptionProvider.table([(275e9, 0.002), (300e9, 0.004)], environment=other)
    assert absorption_coefficient(other, 280e9, table) > 0
    with pytest.raises(ValidationError, match="environment"):
        absorption_coefficient(STANDARD_ATMOSPHERE, 280e9, table)


def test_provider_invariants():
    with pytest.raises(ValidationError, match="negative"):
        AbsorptionProvider.constant(-0.1)
    with pytest.raises(ValidationError, match="at least 2"):
        AbsorptionProvider.table([(275e9, 0.002)])
    with pytest.raises(ValidationError, match="strictly increasing"):
        AbsorptionProvider.table([(275e9, 0.002), (275e9, 0.004)])


def test_path_amplitude_without_absorption_is_friis_bitwise():
    g = LinkGeometry(275e9, 30.0, 55.0, 55.0)
    h_fl = friis_amplitude(g)
    assert path_amplitude(g, STANDARD_ATMOSPHERE, AbsorptionProvider.none()) == h_fl
    assert path_amplitude(g, STANDARD_ATMOSPHERE, AbsorptionProvider.constant(0.0)) == h_fl
    assert h_fl == pytest.approx(0.914443527637, rel=1e-10)


def test_beer_lambert_example():
    h_al = absorption_amplitude(0.01, 30.0)
    assert h_al == pytest.approx(0.8607079764, rel=1e-9)
    assert h_al**2 == pytest.approx(0.7408182207, rel=1e-9)
    g = LinkGeometry(275e9, 30.0, 55.0, 55.0)
    h_l = path_amplitude(g, STANDARD_ATMOSPHERE, AbsorptionProvider.constant(0.01))
    assert h_l == pytest.approx(friis_amplitude(g) * h_al, rel=1e-15)


@given(k1=st.floats(0, 1), k2=st.floats(0, 1), d1=st.floats(0.1, 500), d2=st.floats(0.1, 500))
def test_absorption_amplitude_bounded_and_monotone(k1, k2, d1, d2):
    for k in (k1, k2):
        for d in (d1, d2):
            assert 0 < absorption_amplitude(k, d) <= 1
    lo_k, hi_k = sorted((k1, k2))
    lo_d, hi_d = sorted((d1, d2))
    assert absorption_amplitude(hi_k, d1) <= absorption_amplitude(lo_k, d1)
    assert absorption_amplitude(k1, hi_d) <= absorption_amplitude(k1, lo_d)


TABLE = """# sample table
frequency_ghz,kappa_per_m
275, 0.002
300, 0.004   # trailing comment
"""


def test_load_table_from_bytes_stream():
    p = load_absorption_table(io.BytesIO(TABLE.encode("utf-8")))
    assert p.mode == "table"
    assert p.frequencies == (275e9, 300e9)
    assert p.kappas == (0.002, 0.004)
    assert load_absorption_table(dump_absorption_table(p)) == p


def test_load_table_rejects_decreasing_frequency():
    text = "frequency_ghz,kappa_per_m\n300,0.004\n275,0.002\n"
    with pytest.raises(ValidationError, match="knots not strictly increasing"):
        load_absorption_table(text)


def test_load_table_rejects_negative_kappa():
    text = "frequency_ghz,kappa_per_m\n275,0.002\n300,-0.1\n"
    with pytest.raises(ValidationError, match="negative absorption coefficient"):
        load_absorption_table(text)


@pytest.mark.parametrize("text, line", [
    ("kappa,frequency\n275,0.1\n", 1),
    ("frequency_ghz,kappa_per_m\n275,0.1\n300\n", 3),
    ("frequency_ghz,kappa_per_m\n275,abc\n", 2),
])
def test_load_table_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        load_absorption_table(text)
    assert exc.value.line == line


def test_load_table_missing_header():
    with pytest.raises(ParseError, match="missing header"):
        load_absorption_table("# only a comment\n")
