import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from er_cases import random_indexes
from oracles import dempster_fuse
from svmer.er import (
    AssessmentIndex, ConflictError, ERError, GradeSet, MassDistribution, assign_masses, combine,
    combine_pairwise, final_beliefs, final_intersection_beliefs, load_assessment_spec, risk_score,
)


def masses_of(indexes):
    return [assign_masses(AssessmentIndex(f"f{i}", w, b)) for i, (w, b) in enumerate(indexes)]


def components(md):
    return np.array(md.assigned + md.fuzzy_intersections
                    + (md.unassigned, md.weight_residual, md.incompleteness_residual))


class TestAssignMasses:
    def test_half_weight(self):
        md = assign_masses(AssessmentIndex("a", 0.5, (0.6, 0.4)))
        assert md.assigned == pytest.approx((0.3, 0.2))
        assert md.unassigned == pytest.approx(0.5)
        assert md.weight_residual == pytest.approx(0.5)
        assert md.incompleteness_residual == pytest.approx(0.0)

    def test_full_weight_complete(self):
        md = assign_masses(AssessmentIndex("a", 1.0, (1.0, 0.0)))
        assert md.assigned == (1.0, 0.0) and md.unassigned == 0.0

    def test_incomplete(self):
        md = assign_masses(AssessmentIndex("a", 0.8, (0.5, 0.3)))
        assert md.assigned == pytest.approx((0.4, 0.24))
        assert md.unassigned == pytest.approx(0.36)
        assert md.weight_residual == pytest.approx(0.2)
        assert md.incompleteness_residual == pytest.approx(0.16)

    @pytest.mark.parametrize("w, b", [(1.2, (0.5, 0.5)), (-0.1, (0.5, 0.5)), (0.5, (0.7, 0.7)),
                                      (0.5, (-0.1, 0.5)), (0.5, (1.0,))])
    def test_invalid_index(self, w, b):
        with pytest.raises(ERError):
            AssessmentIndex("bad", w, b)

    def test_mass_invariant_enforced(self):
        with pytest.raises(ERError):
            MassDistribution((0.5, 0.4), 0.2, 0.2, 0.0)


class TestCombine:
    def test_two_opposed_indexes(self):
        out = combine(masses_of([(0.5, [1.0, 0.0]), (0.5, [0.0, 1.0])]))
        assert out.normalization == pytest.approx(4 / 3)
        assert out.assigned == pytest.approx((1 / 3, 1 / 3))
        assert out.unassigned == pytest.approx(1 / 3)
        assert final_beliefs(out) == pytest.approx((0.5, 0.5))

    def test_oracle_on_opposed_example(self):
        grades, bar, til = dempster_fuse([(0.5, [1.0, 0.0]), (0.5, [0.0, 1.0])])
        np.testing.assert_allclose(grades, [1 / 3, 1 / 3])
        assert bar == pytest.approx(1 / 3) and til == pytest.approx(0.0)

    def test_single_source_identity(self):
        md = masses_of([(0.3, [0.2, 0.5, 0.1])])[0]
        assert combine([md]) is md

    def test_complete_single_index(self):
        out = combine(masses_of([(1.0, [0.7, 0.3])]))
        assert final_beliefs(out) == pytest.approx((0.7, 0.3))

    def test_incompleteness_leaves_gap(self):
        out = combine(masses_of([(0.9, [0.5, 0.2]), (0.6, [0.3, 0.6])]))
        assert sum(final_beliefs(out)) < 1 - 1e-6

    def test_total_conflict(self):
        with pytest.raises(ConflictError, match="f0"):
            combine(masses_of([(1.0, [1.0, 0.0]), (1.0, [0.0, 1.0])]))

    def test_grade_count_mismatch(self):
        with pytest.raises(ERError):
            combine(masses_of([(0.5, [1.0, 0.0]), (0.5, [0.0, 0.5, 0.5])]))

    def test_all_zero_weights(self):
        out = combine(masses_of([(0.0, [1.0, 0.0]), (0.0, [0.0, 1.0])]))
        with pytest.raises(ERError):
            final_beliefs(out)

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_dempster_oracle(self, seed):
        idx = random_indexes(np.random.default_rng(seed), allow_full_weight=False)
        out = combine(masses_of(idx))
        grades, bar, til = dempster_fuse(idx)
        np.testing.assert_allclose(out.assigned, grades, atol=1e-9)
        assert out.weight_residual == pytest.approx(bar, abs=1e-9)
        assert out.incompleteness_residual == pytest.approx(til, abs=1e-9)

    @pytest.mark.parametrize("seed", range(20))
    def test_pairwise_route_agrees(self, seed):
        ms = masses_of(random_indexes(np.random.default_rng(seed), allow_full_weight=False))
        np.testing.assert_allclose(components(combine(ms)), components(combine_pairwise(ms)), atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_order_invariance_and_conservation(seed):
    rng = np.random.default_rng(seed)
    idx = random_indexes(rng, allow_full_weight=False)
    a = combine(masses_of(idx))
    b = combine(masses_of([idx[i] for i in rng.permutation(len(idx))]))
    np.testing.assert_allclose(components(a), components(b), atol=1e-9)
    assert a.total() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_vacuous_identity(seed):
    rng = np.random.default_rng(seed)
    idx = random_indexes(rng, allow_full_weight=False)
    m = len(idx[0][1])
    base = combine(masses_of(idx))
    # zero beliefs or zero weight: both leave every mass on the frame
    vacuous = [(float(rng.uniform()), [0.0] * m), (0.0, list(rng.dirichlet(np.ones(m))))]
    out = combine(masses_of(idx + vacuous))
    np.testing.assert_allclose(out.assigned, base.assigned, atol=1e-9)
    assert out.unassigned == pytest.approx(base.unassigned, abs=1e-9)


@settings(max_examples=1000, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_monotone_in_belief(seed):
    rng = np.random.default_rng(seed)
    idx = random_indexes(rng, n=int(rng.integers(2, 5)), allow_full_weight=False)
    i = int(rng.integers(len(idx)))
    w, b = idx[i]
    k = int(rng.integers(len(b)))
    slack = 1.0 - sum(b)
    if slack <= 1e-9:
        # free some room by moving belief out into incompleteness first
        b = [x * 0.7 for x in b]
        idx[i] = (w, b)
        slack = 1.0 - sum(b)
    bumped = list(b)
    bumped[k] += slack * float(rng.uniform(0.01, 1.0))
    before = final_beliefs(combine(masses_of(idx)))[k]
    after = final_beliefs(combine(masses_of(idx[:i] + [(w, bumped)] + idx[i + 1:])))[k]
    assert after >= before - 1e-12


class TestFuzzy:
    def test_intersection_slots_fuse_like_grades(self):
        a = assign_masses(AssessmentIndex("a", 0.6, (0.3, 0.2, 0.1), (0.2, 0.1)))
        b = assign_masses(AssessmentIndex("b", 0.7, (0.1, 0.4, 0.2), (0.1, 0.1)))
        out = combine([a, b])
        np.testing.assert_allclose(components(out), components(combine_pairwise([a, b])), atol=1e-12)
        assert out.total() == pytest.approx(1.0, abs=1e-12)
        assert len(final_intersection_beliefs(out)) == 2

    def test_crisp_intersections_are_zero(self):
        out = combine(masses_of([(0.5, [0.5, 0.5]), (0.4, [0.2, 0.8])]))
        assert out.fuzzy_intersections == (0.0,)


class TestRiskScore:
    def test_certain_lowest(self):
        g = GradeSet(("lo", "mid", "hi"), (0.0, 0.4, 1.0))
        assert tuple(risk_score((1.0, 0.0, 0.0), g)) == (0.0, 0.0, 0.0)

    def test_even_split(self):
        g = GradeSet(("a", "b"), (0.0, 1.0))
        assert risk_score((0.5, 0.5), g).score == 0.5

    def test_incomplete_interval(self):
        g = GradeSet(("a", "b"), (0.0, 1.0))
        r = risk_score((0.4, 0.4), g)
        assert (r.lower, r.upper, r.score) == pytest.approx((0.4, 0.6, 0.5))

    def test_intersection_bounds(self):
        g = GradeSet(("a", "b", "c"), (0.0, 0.5, 1.0), fuzzy=True)
        r = risk_score((0.2, 0.2, 0.2), g, (0.4, 0.0))
        assert (r.lower, r.upper) == pytest.approx((0.3, 0.5))

    def test_needs_utilities(self):
        with pytest.raises(ERError):
            risk_score((0.5, 0.5), GradeSet(("a", "b")))


class TestGradeSet:
    def test_duplicate_names(self):
        with pytest.raises(ERError):
            GradeSet(("a", "a"))

    def test_utilities_increasing(self):
        with pytest.raises(ERError):
            GradeSet(("a", "b"), (0.5, 0.5))

    def test_evenly_spaced(self):
        assert GradeSet.evenly_spaced(["a", "b", "c"]).utilities == (0.0, 0.5, 1.0)


class TestSpecFile:
    def test_load(self, tmp_path):
        doc = {"grades": [{"name": "low", "utility": 0.0}, {"name": "high", "utility": 1.0}],
               "indexes": [{"id": "x", "weight": 0.4, "beliefs": [0.2, 0.8]}], "fuzzy": False}
        p = tmp_path / "spec.json"
        p.write_text(json.dumps(doc))
        grades, idx = load_assessment_spec(p)
        assert grades.grades == ("low", "high") and idx[0]["id"] == "x"

    def test_bad_weight(self):
        with pytest.raises(ERError):
            load_assessment_spec({"grades": ["a", "b"], "indexes": [{"id": "x", "weight": 3}]})

    def test_partial_utilities(self):
        with pytest.raises(ERError):
            load_assessment_spec({"grades": [{"name": "a", "utility": 0}, {"name": "b"}]})
