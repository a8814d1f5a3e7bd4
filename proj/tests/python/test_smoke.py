import math

import mpmath
import pytest

import fracqsl as fq


def test_version():
    assert fq.__version__ == "0.1.0"


def test_ml_against_mpmath_series():
    mpmath.mp.dps = 50
    for beta, gamma, z in [(0.5, 1.0, -1.0), (0.7, 1.3, 2 - 1j), (0.3, 0.5, 0.4j)]:
        want = mpmath.nsum(lambda j: mpmath.mpc(z) ** j / mpmath.gamma(beta * j + gamma), [0, mpmath.inf])
        got = fq.ml(beta, gamma, z)
        assert abs(got - complex(want)) <= 1e-12 * abs(complex(want))


def test_ml_erfc_identity():
    for x in (-2.0, -0.5, 0.0, 1.0, 2.5):
        assert fq.ml(0.5, 1.0, x) == pytest.approx(math.exp(x * x) * math.erfc(-x), rel=1e-11)


def test_split_and_derivative():
    assert fq.ml_split(1.0, 2.0, 0.5) == pytest.approx(complex(math.cos(1.0), -math.sin(1.0)), rel=1e-15)
    assert fq.ml_time_derivative(1.0, 1.0, 2.0) == pytest.approx(math.exp(2.0), rel=1e-14)


def test_evolve_rabi():
    p = fq.JCParams(beta=1.0, lambda_=0.5, n=20)
    g = p.coupling()
    rows = fq.evolve(p, [0.0, 0.25, 1.0])
    assert rows[0] == (0.0, 0.0, 1.0, None)
    for t, gg, ee, d in rows[1:]:
        assert ee == pytest.approx(math.cos(g * t) ** 2, abs=1e-12)
        assert gg + ee == pytest.approx(1.0, abs=1e-15)
        assert d == pytest.approx(-g * math.sin(2 * g * t), abs=1e-12)


def test_qsl_point():
    q = fq.qsl(fq.JCParams(beta=0.6), 1.0).as_dict()
    assert list(q) == ["tau", "sin2_bures", "lambda_tr", "lambda_hs", "lambda_op", "ratio_op", "ratio_max"]
    assert q["lambda_op"] <= q["lambda_hs"] <= q["lambda_tr"]
    assert 0 < q["ratio_op"] <= 1 + 1e-9
    assert q["ratio_op"] == pytest.approx(fq.qsl_ratio_formula(fq.JCParams(beta=0.6), 1.0), abs=1e-9)


def test_tfse_residual():
    assert fq.tfse_residual(fq.JCParams(beta=1.0), 1.0, 10000) <= 1e-6


def test_sweep_records_failures():
    rec = fq.sweep("lambda", [0.5, 1.5], fq.JCParams(beta=0.8), tau=1.0, threads=2)
    assert rec[0]["error"] == ""
    assert "InvalidArgument" in rec[1]["error"]
    assert math.isnan(rec[1]["ratio_op"])


def test_invalid_params_raise():
    with pytest.raises(ValueError, match="InvalidArgument"):
        fq.JCParams(lambda_=2.0)


def test_revivals():
    values = [1 - 0.3 * math.sin(0.1 * i) ** 2 for i in range(200)]
    count, minima, rise = fq.detect_revivals(values)
    assert count == 6
    assert len(minima) == 6
    assert rise == pytest.approx(0.3, rel=1e-3)


def test_figure(tmp_path):
    files, failed = fq.figure("fig4", str(tmp_path), 2)
    assert failed == 0
    assert "manifest.json" in files
    assert (tmp_path / "fig4_beta0.5_lambda0.8_n20.csv").exists()
