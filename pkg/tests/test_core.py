import math

import pytest
from hypothesis import given, strategies as st

from dressed_rabi.core import ModelParams, coupling_g, load_params, params_with_g, read_config


def test_coupling_examples():
    assert coupling_g(ModelParams(11, 0.0, 1e8)).g == 0.0
    assert coupling_g(ModelParams(11, 3.3e-4, 1e8)).g == pytest.approx(0.3, rel=1e-14)
    assert coupling_g(ModelParams(1, 1, 1)).g == 1.0


def test_params_with_g_examples():
    assert params_with_g(11, 1e8, 0.3).u == pytest.approx(3.3e-4, rel=1e-14)
    assert params_with_g(1, 4, 0.5).u == 0.25
    with pytest.raises(ValueError):
        params_with_g(11, 0, 0.1)


@given(
    st.floats(0.1, 100),
    st.floats(1, 1e10),
    # subnormal g cannot keep 14 digits through the U conversion
    st.one_of(st.just(0.0), st.floats(1e-200, 10)),
)
def test_round_trip(delta_e, n, g):
    back = coupling_g(params_with_g(delta_e, n, g)).g
    assert back == pytest.approx(g, rel=1e-14, abs=0)


@pytest.mark.parametrize("kwargs", [
    dict(delta_e=0.0),
    dict(delta_e=-1.0),
    dict(delta_e=1.0, u=-0.1),
    dict(delta_e=1.0, n=-1),
    dict(delta_e=1.0, omega0=0.0),
    dict(delta_e=math.nan),
])
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        ModelParams(**kwargs)


def test_fock_index():
    assert ModelParams(1.0, n=100.0).fock_index() == 100
    with pytest.raises(ValueError):
        ModelParams(1.0, n=2.5).fock_index()


def test_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# desk-scale run\ndelta_e = 2.9\nn = 100\ng = 0.05\n")
    params = load_params(path)
    assert params.delta_e == 2.9
    assert coupling_g(params).g == pytest.approx(0.05, rel=1e-14)

    path.write_text("delta_e = 2.9\nu = 0.02\n")
    assert load_params(path).u == 0.02


def test_config_rejects_u_and_g(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("delta_e = 1\nu = 0.1\ng = 0.2\nn = 4\n")
    with pytest.raises(ValueError, match="either u or g"):
        read_config(path)


def test_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("delta = 1\n")
    with pytest.raises(ValueError, match="unknown key"):
        read_config(path)
