import random

import numpy as np
import pytest

from mfdirac import identity_lab, taylor
from mfdirac.identity_lab import (
    AUXILIARY,
    CURVATURE,
    IDENTITIES,
    JetError,
    _star_ff,
    eval_auxiliary,
    eval_curvature_commutator,
    eval_identity,
    random_jet,
    run_identities,
    run_identity,
)
from mfdirac.parameter_space import CASE_FIELDS, ParameterSet
from mfdirac.scalars import Gq, is_zero, max_abs

CORE = ["FI-LICH", "FI-0", "FI-1", "FI-2", "FI-3", "FI-01", "FI-02", "FI-03"]


def _degrees(ident):
    return IDENTITIES[ident][2]


@pytest.mark.parametrize("ident,n", [(i, n) for n in (2, 3) for i in CORE if max(_degrees(i), default=0) <= n])
def test_identity_exact_zero(ident, n):
    rep = run_identity(ident, n, trials=6, draws=2, seed=11)
    assert rep.exact_zero and rep.failures == 0 and rep.residual_norm == 0.0


def test_four_form_identity():
    rep = run_identity("FI-4", 4, trials=4, draws=2, seed=5)
    assert rep.exact_zero


class _Recording(dict):
    def __init__(self, data, seen):
        super().__init__(data)
        self.seen = seen

    def __getitem__(self, key):
        self.seen.add(key)
        return super().__getitem__(key)


@pytest.mark.parametrize("ident", [i for i in CORE if i != "FI-LICH"])
def test_constants_are_load_bearing(ident, monkeypatch):
    """Shifting any c-constant the identity reads must break it."""
    case = IDENTITIES[ident][1]
    n = 3
    P = ParameterSet.random(case, n, random.Random(9))
    real = identity_lab.constants
    seen = set()
    monkeypatch.setattr(identity_lab, "constants", lambda c, p: _Recording(real(c, p), seen))
    assert is_zero(eval_identity(ident, random_jet(n, _degrees(ident), seed=2), P))
    assert seen
    for key in sorted(seen):
        broken = []
        for delta in (Gq(1), Gq(0, 1)):  # some constants only enter through Im
            def shifted(c, p, key=key, delta=delta):
                out = dict(real(c, p))
                out[key] = out[key] + delta
                return out
            monkeypatch.setattr(identity_lab, "constants", shifted)
            broken += [not is_zero(eval_identity(ident, random_jet(n, _degrees(ident), seed=s), P))
                       for s in range(2, 6)]
        assert any(broken), key


def test_jet_perturbation_breaks_lichnerowicz():
    jet = random_jet(3, seed=4)
    assert is_zero(eval_identity("FI-LICH", jet))
    jet.dd_epsilon[0, 1] = jet.dd_epsilon[0, 1] + Gq(1)  # no longer symmetric
    jet.dd_epsilon[1, 0] = jet.dd_epsilon[1, 0] - Gq(1)
    jet._memo.clear()
    assert not is_zero(eval_identity("FI-LICH", jet))


@pytest.mark.parametrize("ident", list(AUXILIARY))
def test_auxiliary_identities(ident):
    case, degrees = AUXILIARY[ident][1], AUXILIARY[ident][2]
    for seed in range(4):
        jet = random_jet(4, degrees, seed=seed)
        P = ParameterSet.random(case, 4, random.Random(seed))
        assert is_zero(eval_auxiliary(ident, jet, P))


@pytest.mark.parametrize("ident", list(CURVATURE))
def test_curvature_commutators(ident):
    case, spec = CURVATURE[ident]
    degrees = tuple(sorted({p for _, _, p in spec if p}))
    for seed in range(3):
        jet = random_jet(4, degrees, seed=seed)
        P = ParameterSet.random(case, 4, random.Random(seed))
        assert is_zero(eval_curvature_commutator(ident, jet, P))


def test_float_jets_agree_with_exact():
    jet = random_jet(3, (2,), seed=8)
    P = ParameterSet.random("2-form", 3, random.Random(1))
    Pf = ParameterSet(n=3, case_id="2-form", **{k: complex(P.get(k)) for k in CASE_FIELDS["2-form"]})
    assert max_abs(eval_identity("FI-2", jet.to_float(), Pf)) < 1e-9


def test_taylor_oracle_for_spinor_data():
    """Leibniz-rule fields give the same Laplacian of |eps|^2 and Dirac^2."""
    n = 3
    jet = random_jet(n, seed=21)
    psi = taylor.Field(jet.epsilon, list(jet.d_epsilon), [[jet.dd_epsilon[i, j] for j in range(n)] for i in range(n)])
    lap = taylor.laplacian(taylor.inner(psi, psi))
    assert lap == jet.lap_norm2()
    D = taylor.dirac(jet.algebra.gammas, psi)
    assert is_zero(D.c0 - jet.dirac_eps())
    DD = taylor.dirac(jet.algebra.gammas, D)
    flat_laplacian = sum((jet.dd_epsilon[i, i] for i in range(n)), np.zeros_like(jet.epsilon) + Gq(0))
    assert is_zero(DD.c0 - flat_laplacian)
    assert is_zero(DD.c0 - jet.dirac_dirac_eps())


def test_jet_constraints():
    jet = random_jet(4, (2,), {2: {"closed", "coclosed"}}, seed=1)
    assert is_zero(jet.sl_d(2)) and is_zero(jet.sl_delta(2))
    with pytest.raises(JetError):
        random_jet(4, (2,), {3: {"closed"}})
    with pytest.raises(JetError):
        random_jet(3, (4,))
    with pytest.raises(JetError):
        eval_identity("FI-2", random_jet(3, (1,), seed=0), ParameterSet.random("2-form", 3, random.Random(0)))


def test_jets_are_seeded():
    a, b = random_jet(3, (1, 2), seed=17), random_jet(3, (1, 2), seed=17)
    assert is_zero(a.epsilon - b.epsilon) and is_zero(a.grad(2) - b.grad(2))


@pytest.fixture(scope="module")
def horizon_jets():
    return [random_jet(9, (1, 2, 4), seed=s, field_kind="real") for s in range(2)]


def test_horizon_recomputed_coefficients_hold(horizon_jets):
    P = ParameterSet(n=9, case_id="horizon")
    for jet in horizon_jets:
        assert is_zero(eval_identity("FI-HOR-DERIVED+", jet, P))
        assert is_zero(eval_identity("FI-HOR-DERIVED-", jet, P))


def test_horizon_as_stated_discrepancy_formula(horizon_jets):
    """The stated form misses exactly (1/4 - s/2) <eps, *(F^F) eps> + 1/240 <eps, dF eps>."""
    P = ParameterSet(n=9, case_id="horizon")
    for jet in horizon_jets:
        star_ff = jet.expect(("starFF",), lambda: _star_ff(jet))
        dF = jet.expect(("d", 4), lambda: jet.sl_d(4))
        for ident, s in (("FI-HOR+", 1), ("FI-HOR-", -1)):
            res = eval_identity(ident, jet, P)
            predicted = (Gq(1) / 4 - Gq(s) / 2) * star_ff + dF / 240
            assert not is_zero(res)
            assert is_zero(res - predicted)


def test_horizon_needs_real_nine_dimensional_jet():
    with pytest.raises(JetError):
        eval_identity("FI-HOR+", random_jet(4, (1, 2, 4), seed=0), ParameterSet(n=4, case_id="horizon"))


def test_run_identities_shares_jets_and_records_draws():
    reps = run_identities(["FI-2", "AUX-2F"], 3, trials=3, draws=2, seed=0)
    assert [r.identity_id for r in reps] == ["FI-2", "AUX-2F"]
    assert all(r.passed for r in reps)
    assert len(reps[0].parameter_draws) == 2
    with pytest.raises(ValueError):
        run_identities(["FI-1", "FI-2"], 3, trials=1)
