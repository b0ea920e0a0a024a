import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from periodscope import registry
from periodscope.criteria import (
    build_sas,
    chicone_check,
    classify,
    count_balance_zeros,
    count_phi_balance_zeros,
    degree_bound,
    endpoint_signs,
    exactness_check,
    max_workers,
    necessary_monotone_check,
    rolle_reduce,
    scan_critical_periods,
)
from periodscope.potential import Potential, PotentialError, annulus
from periodscope.quadrature import dperiod

coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def small_potential(c2, c3, c4):
    p = Potential.polynomial([0, 1, c2, c3, c4])
    try:
        annulus(p)
    except PotentialError:
        return None
    return p


@pytest.mark.parametrize(
    "name,classification,summary",
    [
        ("linear", "isochronous", "isochronous center"),
        ("loud-quarter", "isochronous", "isochronous center"),
        ("cubic-soft", "monotone-increasing", "monotone increasing"),
        ("odd-quintic:k=1", "monotone-decreasing", "monotone decreasing"),
        ("odd-quintic:k=-1", "exact-count", "exactly 1 critical period"),
    ],
)
def test_classify_registry(name, classification, summary):
    rep = classify(registry.named(name), scan=False)
    assert rep.classification == classification
    assert rep.summary == summary


def test_report_json_is_deterministic():
    a = json.dumps(classify(registry.named("odd-quintic:k=-1"), grid=20).to_json(), sort_keys=True)
    b = json.dumps(classify(registry.named("odd-quintic:k=-1"), grid=20).to_json(), sort_keys=True)
    assert a == b


def test_degree_bounds():
    assert degree_bound(registry.odd_quintic(-1)).odd_bound == 1
    d = degree_bound(registry.cubic_soft())
    assert (d.odd_bound, d.real_zeros_bound, d.bound) == (0, 1, 0)
    assert degree_bound(registry.hyperelliptic(-1, Fraction(1, 2))).bound is None


def test_chicone_cubic_soft():
    ch = chicone_check(registry.cubic_soft())
    assert ch.verdict == "increasing" and ch.numerator_roots == 0


def test_chicone_needs_nondegenerate_center():
    assert chicone_check(registry.nilpotent_plus()).verdict == "inconclusive"


def test_endpoint_signs():
    p = registry.odd_quintic(-1)
    assert endpoint_signs(p, annulus(p)) == (1, -1)
    p = registry.nilpotent_plus()
    assert endpoint_signs(p, annulus(p)) == (-1, 1)


def test_rolle_bound_dominates_count():
    for name in ("hyperelliptic", "odd-quintic:k=-1", "nilpotent-soft", "cubic-soft"):
        r = rolle_reduce(registry.named(name))
        assert r.sas_count <= r.bound


def test_loud_certifies_non_monotone_hyperelliptic():
    res = necessary_monotone_check(registry.hyperelliptic(-1, Fraction(1, 2)))
    assert res.status == "not-monotone" and res.certified


def test_loud_consistent_for_monotone():
    assert necessary_monotone_check(registry.cubic_soft()).status == "consistent-with-monotone"


def test_exactness_alternative_count():
    # for odd g, G/g^2 is even and its balance vanishes identically: no information
    p = registry.odd_quintic(-1)
    res = exactness_check(p, annulus(p), 1)
    assert res.isochronous and not res.exact
    p = registry.hyperelliptic(-1, Fraction(1, 2))
    res = exactness_check(p, annulus(p), 2)
    assert res.count == 1 and not res.exact and res.certified


def test_sas_instance_degrees():
    sas = build_sas(registry.hyperelliptic(-1, Fraction(1, 2)))
    assert sas.U.total_degree == 4
    assert not sas.even
    assert build_sas(registry.odd_quintic(1)).even


def test_isochronous_count():
    bc = count_balance_zeros(registry.loud_quarter())
    assert bc.isochronous and bc.l == 0


def test_numeric_path_for_smooth_bundle_phi():
    assert count_phi_balance_zeros(registry.loud_quarter()).isochronous


def test_scan_finds_the_maximum():
    p = registry.odd_quintic(-1)
    sr = scan_critical_periods(p, annulus(p), n=40)
    assert [c.type for c in sr.energies] == ["max"]
    h = sr.energies[0].h
    assert dperiod(p, annulus(p), h * 0.98) > 0 > dperiod(p, annulus(p), h * 1.02)


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("PERIODSCOPE_THREADS", "3")
    assert max_workers() == 3
    monkeypatch.setenv("PERIODSCOPE_THREADS", "0")
    assert max_workers() == 1


@settings(max_examples=12)
@given(coeff, coeff, coeff)
def test_certified_monotone_matches_quadrature(c2, c3, c4):
    p = small_potential(c2, c3, c4)
    assume(p is not None)
    ann = annulus(p)
    bc = count_balance_zeros(p, ann)
    assume(bc.certified and not bc.isochronous and bc.l == 0)
    hs = ann.h_s * np.array([0.05, 0.3, 0.6, 0.9]) if ann.bounded else np.array([0.05, 0.5, 5.0])
    signs = {int(np.sign(dperiod(p, ann, float(h)))) for h in hs}
    assert signs == {bc.sign}
