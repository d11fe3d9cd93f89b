import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stvlab.core import Ballot, Profile, stv_winner
from stvlab.solver import (
    Decision,
    LimitExceededError,
    ManipulationInstance,
    SearchLimits,
    brute_force_manipulate,
    manipulate_single,
    verify_witness,
    winnable_set,
)
from stvlab.votegen import ic_sample, rng_from_seed

A, B, C = 0, 1, 2


def profile(*spec, m=3):
    return Profile(m, tuple(Ballot(r, w) for w, r in spec))


MAJORITY_LOCKED = ManipulationInstance(profile((3, (A, B, C))), 1, C)
# 2 ABC + 1 BCA + 1 CBA; one extra ballot can steer the elimination order
SWINGABLE = ManipulationInstance(
    profile((2, (A, B, C)), (1, (B, C, A)), (1, (C, B, A))), 1, B
)


def test_majority_locked_is_not_manipulable():
    result = manipulate_single(MAJORITY_LOCKED)
    assert result.decision is Decision.NOT_MANIPULABLE
    assert result.witness is None
    assert result.nodes >= 1


def test_lone_manipulator_dictates():
    inst = ManipulationInstance(Profile(2), 1, B)
    result = manipulate_single(inst)
    assert result.decision is Decision.MANIPULABLE
    assert result.witness.ranking[0] == B


def test_swingable_instance_found_and_verified():
    result = manipulate_single(SWINGABLE)
    oracle = brute_force_manipulate(SWINGABLE)
    assert result.decision is Decision.MANIPULABLE
    assert oracle.decision is Decision.MANIPULABLE
    assert verify_witness(SWINGABLE, result.witness)
    assert verify_witness(SWINGABLE, oracle.witness)


def test_verify_rejects_bad_ballot():
    assert not verify_witness(MAJORITY_LOCKED, Ballot((A, B, C)))
    with pytest.raises(ValueError):
        verify_witness(MAJORITY_LOCKED, (0, 0, 1))


def test_verify_with_zero_weight_matches_honest_winner():
    fixed = MAJORITY_LOCKED.fixed
    honest = stv_winner(fixed).winner
    inst = ManipulationInstance(fixed, 0, honest)
    assert verify_witness(inst, Ballot((C, B, A)))


def test_zero_weight_degenerates_to_one_evaluation():
    fixed = SWINGABLE.fixed
    honest = stv_winner(fixed).winner
    hit = manipulate_single(ManipulationInstance(fixed, 0, honest))
    assert hit.decision is Decision.MANIPULABLE
    assert hit.nodes == 1
    assert verify_witness(ManipulationInstance(fixed, 0, honest), hit.witness)
    other = (honest + 1) % fixed.m
    miss = manipulate_single(ManipulationInstance(fixed, 0, other))
    assert miss.decision is Decision.NOT_MANIPULABLE
    assert miss.nodes == 1


def test_single_candidate_needs_one_node():
    inst = ManipulationInstance(Profile(1, (Ballot((0,), 2),)), 1, 0)
    result = manipulate_single(inst)
    assert result.decision is Decision.MANIPULABLE
    assert result.nodes == 1


class TestBruteForce:
    def test_majority_locked_exhausts_all_ballots(self):
        result = brute_force_manipulate(MAJORITY_LOCKED)
        assert result.decision is Decision.NOT_MANIPULABLE
        assert result.nodes == 6

    def test_single_candidate(self):
        inst = ManipulationInstance(Profile(1, (Ballot((0,),),)), 1, 0)
        result = brute_force_manipulate(inst)
        assert result.decision is Decision.MANIPULABLE

    def test_cap_refused(self):
        inst = ManipulationInstance(Profile(8), 1, 0)
        with pytest.raises(ValueError):
            brute_force_manipulate(inst)


class TestWinnableSet:
    def test_locked_majority(self):
        assert winnable_set(profile((3, (A, B, C))), 1) == {A}

    def test_empty_profile_manipulator_dictates(self):
        assert winnable_set(Profile(3), 1) == {A, B, C}

    def test_swingable_profile(self):
        # frozen from brute force over every preferred candidate
        expected = {
            p
            for p in range(3)
            if brute_force_manipulate(
                ManipulationInstance(SWINGABLE.fixed, 1, p)
            ).decision
            is Decision.MANIPULABLE
        }
        assert expected == {A, B, C}
        got = winnable_set(SWINGABLE.fixed, 1)
        assert got == expected
        assert {A, B} <= got


def test_limit_exceeded_is_distinct():
    rng = rng_from_seed(3)
    fixed = ic_sample(6, 8, rng)
    inst = ManipulationInstance(fixed, 1, 5)
    full = manipulate_single(inst)
    if full.nodes > 1:
        capped = manipulate_single(inst, SearchLimits(max_nodes=1))
        assert capped.decision is Decision.LIMIT_EXCEEDED
        assert capped.witness is None
    with pytest.raises(LimitExceededError):
        winnable_set(fixed, 1, limits=SearchLimits(max_nodes=1))


def test_determinism():
    first = manipulate_single(SWINGABLE)
    second = manipulate_single(SWINGABLE)
    assert (first.decision, first.witness, first.nodes) == (
        second.decision,
        second.witness,
        second.nodes,
    )


# -- randomized equivalence with the oracle ----------------------------------

@st.composite
def instances(draw, max_m=4):
    m = draw(st.integers(1, max_m))
    rankings = draw(
        st.lists(st.permutations(range(m)).map(tuple), min_size=0, max_size=5)
    )
    fixed = Profile(m, tuple(Ballot(r) for r in rankings))
    weight = draw(st.integers(0, 3))
    if weight == 0 and fixed.total_weight == 0:
        weight = 1
    preferred = draw(st.integers(0, m - 1))
    return ManipulationInstance(fixed, weight, preferred)


@given(instances())
@settings(max_examples=200, deadline=None)
def test_search_agrees_with_brute_force(inst):
    fast = manipulate_single(inst)
    slow = brute_force_manipulate(inst)
    assert fast.decision == slow.decision
    if fast.decision is Decision.MANIPULABLE:
        assert verify_witness(inst, fast.witness)


@given(instances())
@settings(max_examples=100, deadline=None)
def test_memoization_is_transparent(inst):
    assert (
        manipulate_single(inst, use_memo=True).decision
        == manipulate_single(inst, use_memo=False).decision
    )


@given(instances())
@settings(max_examples=60, deadline=None)
def test_zero_weight_matches_honest_outcome(inst):
    if inst.fixed.total_weight == 0:
        return
    stripped = ManipulationInstance(inst.fixed, 0, inst.preferred)
    expected = stv_winner(inst.fixed).winner == inst.preferred
    assert (manipulate_single(stripped).decision is Decision.MANIPULABLE) == expected


@given(instances())
@settings(max_examples=60, deadline=None)
def test_p_first_ballot_winning_implies_manipulable(inst):
    if inst.weight == 0:
        return
    m = inst.fixed.m
    ranking = (inst.preferred, *(c for c in range(m) if c != inst.preferred))
    if verify_witness(inst, ranking):
        assert manipulate_single(inst).decision is Decision.MANIPULABLE
