import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stvlab.core import (
    MAX_INDEX,
    Ballot,
    Profile,
    TieRule,
    eliminate_choice,
    stv_winner,
    tally,
    top_among,
)

A, B, C = 0, 1, 2


def straight_line_count(weighted_rankings, m):
    """Independent reference: plain loop, no shared code with stv_winner."""
    alive = list(range(m))
    while True:
        counts = [0] * m
        for ranking, w in weighted_rankings:
            for c in ranking:
                if c in alive:
                    counts[c] += w
                    break
        total = sum(counts)
        best = max(alive, key=lambda c: counts[c])
        if 2 * counts[best] > total or len(alive) == 1:
            return alive[0] if len(alive) == 1 and 2 * counts[best] <= total else best
        low = min(counts[c] for c in alive)
        loser = max(c for c in alive if counts[c] == low)
        alive.remove(loser)


def profile(*spec, m=3):
    return Profile(m, tuple(Ballot(r, w) for w, r in spec))


class TestBallotValidation:
    def test_duplicate_candidate_rejected(self):
        with pytest.raises(ValueError):
            Ballot((0, 0))

    def test_missing_candidate_rejected(self):
        with pytest.raises(ValueError):
            Ballot((0, 2))

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            Ballot((0, 1), 0)

    def test_fractional_weight_rejected(self):
        with pytest.raises(ValueError):
            Ballot((0, 1), 1.5)

    def test_profile_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Profile(3, (Ballot((0, 1)),))


class TestTopAmong:
    def test_full_set_returns_first_preference(self):
        assert top_among(Ballot((A, B, C)), {A, B, C}) == A

    def test_skips_eliminated(self):
        assert top_among(Ballot((A, B, C)), {B, C}) == B

    def test_singleton(self):
        assert top_among(Ballot((A, B, C)), {C}) == C

    def test_empty_remaining_errors(self):
        with pytest.raises(ValueError):
            top_among(Ballot((A, B, C)), set())


class TestTally:
    def test_direct_count(self):
        p = profile((1, (A, B, C)), (1, (B, A, C)))
        assert tally(p, {A, B, C}) == {A: 1, B: 1, C: 0}

    def test_transfer_after_elimination(self):
        p = profile((1, (A, B, C)), (1, (B, A, C)))
        assert tally(p, {B, C}) == {B: 2, C: 0}

    def test_empty_profile(self):
        assert tally(Profile(1), {A}) == {A: 0}

    def test_empty_remaining_errors(self):
        with pytest.raises(ValueError):
            tally(Profile(2), set())


class TestEliminateChoice:
    def test_unique_minimum(self):
        assert eliminate_choice({A: 2, B: 1, C: 3}) == B

    def test_tie_broken_toward_larger_index(self):
        assert eliminate_choice({A: 1, B: 1, C: 2}) == B

    def test_two_way_tie(self):
        assert eliminate_choice({A: 1, B: 1}) == B

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            eliminate_choice({})

    def test_seeded_rule_is_deterministic(self):
        rule = TieRule.seeded(99)
        picks = {rule.choose([A, B, C]) for _ in range(10)}
        assert len(picks) == 1


class TestStvWinner:
    def test_sole_candidate(self):
        out = stv_winner(Profile(1, (Ballot((0,), 4),)))
        assert out.winner == 0
        assert len(out.rounds) == 1

    def test_immediate_majority(self):
        out = stv_winner(profile((3, (A, B, C)), (1, (B, A, C))))
        assert out.winner == A
        assert len(out.rounds) == 1

    def test_elimination_trace(self):
        # 2 ABC + 2 BCA + 1 CBA: no majority of 5, C drops, B picks it up
        p = profile((2, (A, B, C)), (2, (B, C, A)), (1, (C, B, A)))
        out = stv_winner(p, MAX_INDEX)
        assert out.winner == B
        first, second = out.rounds
        assert first.tallies == {A: 2, B: 2, C: 1}
        assert first.eliminated == C
        assert second.tallies == {A: 2, B: 3}
        assert second.winner == B
        assert straight_line_count([(b.ranking, b.weight) for b in p.ballots], 3) == B

    def test_empty_election_errors(self):
        with pytest.raises(ValueError):
            stv_winner(Profile(3))


# -- randomized invariants ---------------------------------------------------

def ballots(m, max_ballots=6, max_weight=3):
    return st.lists(
        st.tuples(
            st.permutations(range(m)).map(tuple),
            st.integers(1, max_weight),
        ),
        min_size=1,
        max_size=max_ballots,
    )


@st.composite
def profiles(draw, max_m=5):
    m = draw(st.integers(1, max_m))
    entries = draw(ballots(m))
    return Profile(m, tuple(Ballot(r, w) for r, w in entries))


@given(profiles())
@settings(max_examples=150, deadline=None)
def test_outcome_invariants(p):
    out = stv_winner(p)
    total = p.total_weight
    assert len(out.rounds) <= p.m
    seen_winner = False
    for rnd in out.rounds:
        assert sum(rnd.tallies.values()) == total
        assert set(rnd.tallies) == set(rnd.remaining)
        if rnd.eliminated is not None:
            low = rnd.tallies[rnd.eliminated]
            assert all(low <= t for t in rnd.tallies.values())
        else:
            seen_winner = True
            assert rnd.winner == out.winner
            final = rnd.tallies[rnd.winner]
            assert 2 * final > total or len(rnd.remaining) == 1
    assert seen_winner
    assert out.rounds[-1].winner == out.winner


@given(profiles())
@settings(max_examples=100, deadline=None)
def test_matches_straight_line_reference(p):
    out = stv_winner(p)
    ref = straight_line_count([(b.ranking, b.weight) for b in p.ballots], p.m)
    assert out.winner == ref


@given(profiles())
@settings(max_examples=100, deadline=None)
def test_weight_splitting_equivalence(p):
    split = Profile(
        p.m,
        tuple(Ballot(b.ranking, 1) for b in p.ballots for _ in range(b.weight)),
    )
    assert stv_winner(p) == stv_winner(split)


@given(profiles())
@settings(max_examples=50, deadline=None)
def test_top_among_full_set_is_first_choice(p):
    full = set(range(p.m))
    for b in p.ballots:
        assert top_among(b, full) == b.ranking[0]
