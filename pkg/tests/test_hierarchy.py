import random

import numpy as np
import pytest

from mfdirac import hierarchy
from mfdirac.hierarchy import (
    HIERARCHY_CASES,
    HierarchyError,
    bilinears,
    hierarchy_is_zero,
    untwisted_params,
    untwisting_holds,
    verify_hierarchy,
)
from mfdirac.identity_lab import random_jet, run_hierarchy
from mfdirac.parameter_space import ParameterSet, re
from mfdirac.scalars import Gq


def _jet(case_id, n, seed):
    """First jet from ``seed`` on whose scalar f is nonzero."""
    _, spec = HIERARCHY_CASES[case_id]
    while True:
        jet = random_jet(n, tuple(sorted({p for _, _, p in spec if p})), seed=seed)
        if jet.f:
            return jet
        seed += 1000


def _params(case_id, n, seed):
    return ParameterSet.random(HIERARCHY_CASES[case_id][0], n, random.Random(seed))


CASES = [(c, n) for c in HIERARCHY_CASES for n in (3, 4)
         if max((p for _, _, p in HIERARCHY_CASES[c][1]), default=0) <= n]


@pytest.mark.parametrize("case_id,n", CASES)
def test_laws_hold_exactly(case_id, n):
    reps = run_hierarchy(case_id, n, trials=2, draws=1, seed=3)
    assert [r.identity_id.rsplit("-", 1)[1] for r in reps] == ["RAW", "CKY", "UNTWIST"]
    assert all(r.exact_zero for r in reps)


@pytest.mark.parametrize("case_id", list(HIERARCHY_CASES))
def test_raw_law_detects_wrong_connection(case_id, monkeypatch):
    """Substituting with other constants than the law uses must fail."""
    n = 3
    jet, P = _jet(case_id, n, 1), _params(case_id, n, 1)
    assert hierarchy_is_zero(verify_hierarchy(case_id, jet, P, "raw"))
    field = HIERARCHY_CASES[case_id][1][0][0]
    other = P.with_values(**{field: P.get(field) + Gq(1, 1)})
    real = hierarchy.parallel_substitute
    monkeypatch.setattr(hierarchy, "parallel_substitute", lambda j, c, p: real(j, c, other))
    assert not hierarchy_is_zero(verify_hierarchy(case_id, jet, P, "raw"))


@pytest.mark.parametrize("case_id", ["HIER-1", "HIER-2", "HIER-3"])
def test_plain_cky_needs_untwisting(case_id):
    n = 4
    jet, P = _jet(case_id, n, 2), _params(case_id, n, 2)
    assert not untwisting_holds(case_id, P)
    assert not hierarchy_is_zero(verify_hierarchy(case_id, jet, P, "plain-cky"))
    U = untwisted_params(case_id, P)
    assert untwisting_holds(case_id, U)
    assert hierarchy_is_zero(verify_hierarchy(case_id, jet, U, "plain-cky"))


def test_untwisting_values():
    k1 = Gq(2, 1)
    assert untwisting_holds("HIER-1", ParameterSet(n=3, case_id="1-form", k1=k1, k2=-2 * re(k1) + Gq(0, 5)))
    assert untwisting_holds("HIER-2", ParameterSet(n=3, case_id="2-form", k1=k1, k2=4 * k1))
    assert untwisting_holds("HIER-3", ParameterSet(n=3, case_id="3-form", k1=k1, k2=-6 * k1))
    assert not untwisting_holds("HIER-3", ParameterSet(n=3, case_id="3-form", k1=k1, k2=6 * k1))


def test_bilinears_basic_properties():
    jet = random_jet(3, seed=6)
    chi = bilinears(jet.epsilon, jet.algebra)
    norm = sum((v.conjugate() * v for v in jet.epsilon), Gq(0))
    assert chi[0][()] == norm
    # two-component spinors: the vector bilinear has length |eps|^2
    assert sum((chi[1][i] * chi[1][i] for i in range(3)), Gq(0)) == norm * norm
    for p, arr in enumerate(chi):
        assert arr.shape == (3,) * p


def test_float_bilinears_are_real():
    jet = random_jet(4, seed=0).to_float()
    for arr in bilinears(jet.epsilon, jet.algebra):
        assert np.isrealobj(arr) or np.allclose(np.imag(arr), 0)


def test_unknown_inputs():
    jet = _jet("HIER-0", 3, 0)
    P = _params("HIER-0", 3, 0)
    with pytest.raises(KeyError):
        verify_hierarchy("HIER-9", jet, P)
    with pytest.raises(ValueError):
        verify_hierarchy("HIER-0", jet, P, "sideways")
