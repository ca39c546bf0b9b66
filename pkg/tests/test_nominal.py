import math

import numpy as np
import pytest
from scipy import integrate as sint

from robustwpt.exceptions import DomainError, TableFormatError
from robustwpt.nominal import Exponential, Tabulated, Uniform, load_table, parse_nominal


def _table():
    xs = np.linspace(0.0, 3.0, 13)
    return Tabulated(xs, xs * np.exp(-xs) + 0.05)


def test_pdf_examples():
    assert Exponential(1.0).pdf(0.0) == 1.0
    assert Uniform(2.0).pdf(3.0) == 0.0
    assert Exponential(2.0).pdf(1.0) == pytest.approx(2 * math.exp(-2), rel=1e-15)
    assert Exponential(1.0).pdf(-1.0) == 0.0


def test_cdf_examples():
    assert Exponential(1.0).cdf(1.0) == pytest.approx(1 - math.exp(-1), rel=1e-15)
    assert Uniform(2.0).cdf(1.0) == 0.5
    assert Uniform(2.0).cdf(5.0) == 1.0
    assert Exponential(1.0).cdf(-3.0) == 0.0


def test_means_and_variances():
    assert Exponential(1.0).mean() == 1.0
    assert Uniform(2.0).mean() == 1.0
    assert Exponential(0.5).mean() == 2.0
    assert Exponential(0.5).variance() == 4.0
    assert Uniform(2.0).variance() == pytest.approx(1 / 3)


@pytest.mark.parametrize("model", [Exponential(1.0), Exponential(3.0), Uniform(2.0), _table()],
                         ids=["exp1", "exp3", "unif2", "table"])
def test_cdf_is_integral_of_pdf(model):
    lo = model.support[0]
    for p in np.linspace(0.01, 0.99, 100):
        x = model.quantile(p)
        ref = sint.quad(model.pdf, lo, x, points=list(model.breakpoints()) or None,
                        epsabs=1e-12, limit=200)[0]
        assert abs(model.cdf(x) - ref) < 1e-7
        assert model.cdf(x) == pytest.approx(p, abs=1e-10)


@pytest.mark.parametrize("model", [Exponential(1.0), Exponential(0.25), Uniform(2.0), _table()],
                         ids=["exp1", "exp0.25", "unif2", "table"])
def test_expect_normalisation_and_mean(model):
    assert model.expect(lambda x: np.ones_like(x), tol=1e-11).value == pytest.approx(1, abs=1e-9)
    assert model.expect(lambda x: x, tol=1e-11).value == pytest.approx(model.mean(), abs=1e-9)


def test_cdf_monotone_and_bounded():
    x = np.linspace(-1, 10, 500)
    for model in (Exponential(1.0), Uniform(2.0), _table()):
        F = model.cdf(x)
        assert np.all(np.diff(F) >= 0)
        assert F[0] == 0.0 and np.all((F >= 0) & (F <= 1))
        hi = model.support[1]
        if math.isfinite(hi):
            assert model.cdf(hi) == 1.0


def test_tabulated_renormalised_and_moments():
    t = _table()
    area = sint.quad(t.pdf, 0, 3, points=list(t.breakpoints()), epsabs=1e-13, limit=200)[0]
    assert area == pytest.approx(1.0, abs=1e-9)
    m = sint.quad(lambda x: x * t.pdf(x), 0, 3, points=list(t.breakpoints()), limit=200)[0]
    assert t.mean() == pytest.approx(m, abs=1e-9)
    assert t.pdf(3.5) == 0.0 and t.pdf(-0.1) == 0.0


def test_tabulated_validation():
    xs = np.linspace(0, 1, 8)
    with pytest.raises(DomainError):
        Tabulated(xs[:5], np.ones(5))
    with pytest.raises(DomainError):
        Tabulated(xs[::-1], np.ones(8))
    with pytest.raises(DomainError):
        Tabulated(xs, -np.ones(8))
    with pytest.raises(DomainError):
        Tabulated(xs - 1, np.ones(8))
    with pytest.raises(DomainError):
        Tabulated(xs, np.zeros(8))


@pytest.mark.parametrize("rate", [0.0, -1.0, math.inf, math.nan])
def test_exponential_validation(rate):
    with pytest.raises(DomainError):
        Exponential(rate)


def test_quantiles():
    assert Exponential(2.0).quantile(0.5) == pytest.approx(math.log(2) / 2)
    assert Uniform(4.0).quantile(0.25) == 1.0
    with pytest.raises(DomainError):
        Exponential(1.0).quantile(1.0)


def test_load_table_roundtrip(tmp_path):
    path = tmp_path / "ok.csv"
    rows = "\n".join(f"{x},{math.exp(-x)}" for x in np.linspace(0, 5, 21))
    path.write_text("x,pdf\n" + rows + "\n")
    t = load_table(path)
    assert t.support == (0.0, 5.0)
    assert t.spec == f"table:{path}"
    assert isinstance(parse_nominal(f"table:{path}"), Tabulated)


@pytest.mark.parametrize("body,line", [
    ("x,pdf\n0,1\n0.1,1\n0.2,1\n0.15,1\n0.4,1\n0.5,1\n0.6,1\n0.7,1\n", 5),
    ("x,p\n0,1\n", 1),
    ("x,pdf\n0,1\n0.1,abc\n", 3),
    ("x,pdf\n0,1\n0.1,-2\n", 3),
    ("x,pdf\n-1,1\n", 2),
    ("x,pdf\n0,1,2\n", 2),
])
def test_load_table_errors_name_the_line(tmp_path, body, line):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(TableFormatError) as info:
        load_table(path)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_load_table_too_short_and_missing(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("x,pdf\n0,1\n1,1\n")
    with pytest.raises(TableFormatError):
        load_table(path)
    with pytest.raises(TableFormatError):
        load_table(tmp_path / "missing.csv")


def test_parse_nominal():
    assert parse_nominal("exp:2.5") == Exponential(2.5)
    assert parse_nominal("uniform:2") == Uniform(2.0)
    assert parse_nominal("exp:1.0").spec == "exp:1.0"
    for bad in ("exp", "gauss:1", "exp:abc", "uniform:-1"):
        with pytest.raises(DomainError):
            parse_nominal(bad)


def test_survival_function():
    x = np.array([0.5, 30.0, 300.0])
    assert np.allclose(Exponential(1.0).sf(x), np.exp(-x), rtol=1e-15, atol=0)
    assert Exponential(1.0).sf(300.0) > 0
    assert Uniform(2.0).sf(0.5) == 0.75
    t = _table()
    assert t.sf(1.0) == pytest.approx(1 - t.cdf(1.0))
