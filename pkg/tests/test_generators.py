"""Generator catalog: structural invariants across every row plus pinned values."""

import math

import numpy as np
import pytest

from gamgen import (
    DomainError,
    LogPower,
    PowerLaw,
    UnknownGeneratorError,
    catalog_names,
    inverse_of,
    make_generator,
    parse_generator_spec,
)

from conftest import CATALOG_SWEEP, sweep_ids

X_GRID = np.geomspace(0.05, 5.0, 9)


def _fd1(fn, x, h):
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


@pytest.mark.parametrize("name,shapes", CATALOG_SWEEP, ids=sweep_ids(CATALOG_SWEEP))
def test_catalog_row_invariants(name, shapes):
    g = make_generator(name, **shapes)
    vals = np.array([g.value(x) for x in X_GRID])
    assert np.all(vals > 0.0)
    diffs = np.diff(vals)
    if g.monotonicity == "increasing":
        assert np.all(diffs > 0.0)
    else:
        assert np.all(diffs < 0.0)

    for x in X_GRID:
        v = g.value(x)
        # inverse round trip
        assert abs(g.inverse(v) - x) <= 1e-9 * x
        # derivatives against central differences
        h = 1e-6 * x
        fd1 = _fd1(g.value, x, h)
        fd2 = _fd1(g.d1, x, h)
        assert abs(g.d1(x) - fd1) <= 1e-6 * max(abs(fd1), 1e-12)
        assert abs(g.d2(x) - fd2) <= 1e-5 * max(abs(fd2), 1e-10)
        # log channel agrees with the direct value
        if g.log_value is not None:
            assert abs(g.log_value(x) - math.log(v)) <= 1e-12 * max(1.0, abs(math.log(v)))


@pytest.mark.parametrize("name,shapes", CATALOG_SWEEP, ids=sweep_ids(CATALOG_SWEEP))
def test_catalog_row_structure(name, shapes):
    g = make_generator(name, **shapes)
    fc = g.family_class
    if isinstance(fc, PowerLaw):
        for x in X_GRID:
            # T(x) = C x^{-s} exactly
            assert abs(g.value(x) * x**fc.s / fc.C - 1.0) <= 1e-12
            # U(x) = (T''/T' - T'/T) x is identically -1
            u = (g.d2(x) / g.d1(x) - g.d1(x) / g.value(x)) * x
            assert abs(u + 1.0) <= 1e-9
    elif isinstance(fc, LogPower):
        for x in X_GRID:
            assert abs(g.value(x) - math.log1p(x**fc.s)) <= 1e-12 * max(
                1.0, abs(g.value(x))
            )
    if g.minorant is not None:
        C, s = g.minorant
        assert g.monotonicity == "increasing"
        for x in X_GRID:
            assert g.value(x) >= C * x**s * (1.0 - 1e-12)


@pytest.mark.parametrize("name,shapes", CATALOG_SWEEP, ids=sweep_ids(CATALOG_SWEEP))
def test_native_parameter_round_trip(name, shapes):
    g = make_generator(name, **shapes)
    if g.native is None:
        pytest.skip("row has no native parameter map")
    seeds = [2.5, 0.8, 1.3]
    native = {k: seeds[i] for i, k in enumerate(g.native.names)}
    mu, sigma = g.native.to_family(**native)
    assert mu > 0.0 and sigma > 0.0
    back = g.native.from_family(mu, sigma)
    for k, v in native.items():
        assert abs(float(back[k]) - v) <= 1e-12 * v


def test_gamma_pins():
    g = make_generator("gamma")
    assert g.value(2.0) == 2.0
    assert g.d1(2.0) == 1.0
    assert g.d2(2.0) == 0.0
    assert g.inverse(5.0) == 5.0
    assert g.family_class == PowerLaw(C=1.0, s=-1.0)
    mu, sigma = g.native.to_family(alpha=2.0, beta=3.0)
    assert mu == 2.0 and abs(sigma - 1.0 / 6.0) < 1e-15


def test_square_generator_pins():
    g = make_generator("nakagami")
    assert g.value(3.0) == 9.0
    assert g.d1(3.0) == 6.0
    assert g.d2(3.0) == 2.0
    assert inverse_of(g, 16.0) == 4.0
    assert g.family_class == PowerLaw(C=1.0, s=-2.0)


def test_more_power_law_pins():
    w = make_generator("weibull", delta=2.0)
    assert abs(w.value(3.0) - 9.0) < 1e-12
    ig = make_generator("inverse-gamma")
    assert abs(ig.value(2.0) - 0.5) < 1e-15
    assert ig.monotonicity == "decreasing"
    assert inverse_of(make_generator("gamma"), 7.0) == 7.0


def test_new_log_generalized_gamma_pins():
    g = make_generator("new-log-generalized-gamma", delta=1.0)
    assert abs(g.value(1.0) - (math.e - 1.0)) < 1e-14
    assert abs(g.d1(1.0) - math.e) < 1e-14
    assert abs(g.inverse(math.e - 1.0) - 1.0) < 1e-12


def test_gompertz_pin():
    g = make_generator("gompertz", delta=2.0)
    assert abs(g.inverse(math.exp(2.0) - 1.0) - 1.0) < 1e-12


def test_catalog_is_complete():
    expected = {
        "burr-xii",
        "chi-squared",
        "dagum",
        "delta-gamma",
        "flexible-weibull",
        "gamma",
        "generalized-gamma",
        "generalized-inverse-gamma",
        "gompertz",
        "inverse-gamma",
        "inverse-weibull",
        "maxwell-boltzmann",
        "modified-weibull-extension",
        "nakagami",
        "new-log-generalized-gamma",
        "rayleigh",
        "scaled-inverse-chi-squared",
        "traditional-weibull",
        "weibull",
    }
    assert set(catalog_names()) == expected
    assert len(CATALOG_SWEEP) == len(expected)


def test_unknown_and_invalid_generators():
    with pytest.raises(UnknownGeneratorError):
        make_generator("no-such-generator")
    assert issubclass(UnknownGeneratorError, DomainError)
    with pytest.raises(DomainError):
        make_generator("weibull", delta=-1.0)
    with pytest.raises(DomainError):
        make_generator("weibull", delta=float("nan"))
    with pytest.raises(DomainError):
        make_generator("gamma", delta=2.0)  # gamma takes no shape parameters


def test_domain_guard():
    g = make_generator("gamma")
    for bad in (0.0, -1.0, float("nan")):
        with pytest.raises(DomainError):
            g.value(bad)
    with pytest.raises(DomainError):
        g.d1(np.array([1.0, -2.0]))


def test_parse_generator_spec():
    g = parse_generator_spec("weibull(delta=2)")
    assert g.name == "weibull"
    assert g.shape_params == {"delta": 2.0}
    assert parse_generator_spec("gamma").name == "gamma"
    assert parse_generator_spec(" burr-xii( c = 1.5 ) ").shape_params == {"c": 1.5}
    two = parse_generator_spec("flexible-weibull(b=2, c=0.5)")
    assert two.shape_params == {"b": 2.0, "c": 0.5}
    for bad in ("weibull(delta=", "weibull(delta)", "weibull(delta=x)", "nope(a=1)"):
        with pytest.raises(DomainError):
            parse_generator_spec(bad)
