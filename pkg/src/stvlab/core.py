"""Weighted ranked ballots and a single-winner STV tally.

Candidates are integers ``0..m-1``. A ballot ranks all m candidates
strictly; its weight counts how many voters cast it. The tally repeatedly
eliminates the candidate with the least first-place weight until one
candidate holds a strict majority among the survivors.
"""

from __future__ import annotations

import operator
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

__all__ = [
    "TieRule",
    "MAX_INDEX",
    "Ballot",
    "Profile",
    "RoundRecord",
    "ElectionOutcome",
    "top_among",
    "tally",
    "eliminate_choice",
    "stv_winner",
]

_TIE_KINDS = ("max_index", "seeded_random")


@dataclass(frozen=True, slots=True)
class TieRule:
    """How to pick the candidate to eliminate among those tied at minimum.

    ``max_index`` drops the tied candidate with the largest index and is
    fully deterministic. ``seeded_random`` picks uniformly; the pick is a
    pure function of (seed, tied set), so repeated runs agree.
    """

    kind: str = "max_index"
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in _TIE_KINDS:
            raise ValueError(f"unknown tie rule {self.kind!r}")
        if self.kind == "seeded_random" and self.seed is None:
            raise ValueError("seeded_random tie rule needs a seed")

    @classmethod
    def seeded(cls, seed: int) -> "TieRule":
        return cls("seeded_random", seed)

    def choose(self, tied: Iterable[int]) -> int:
        pool = sorted(int(c) for c in tied)
        if not pool:
            raise ValueError("no candidates to choose from")
        if self.kind == "max_index":
            return pool[-1]
        # Seeding from bytes keeps the pick stable across platforms and runs.
        key = f"{self.seed}:{pool}".encode()
        return random.Random(key).choice(pool)


MAX_INDEX = TieRule()


@dataclass(frozen=True, slots=True)
class Ballot:
    """A strict ranking of all candidates, weighted by voter multiplicity."""

    ranking: tuple[int, ...]
    weight: int = 1

    def __post_init__(self) -> None:
        ranking = tuple(operator.index(c) for c in self.ranking)
        object.__setattr__(self, "ranking", ranking)
        m = len(ranking)
        if m == 0:
            raise ValueError("ballot ranks no candidates")
        if set(ranking) != set(range(m)):
            raise ValueError("ranking must be a permutation of 0..m-1")
        try:
            weight = operator.index(self.weight)
        except TypeError:
            raise ValueError("ballot weight must be a positive integer") from None
        if weight < 1:
            raise ValueError("ballot weight must be a positive integer")
        object.__setattr__(self, "weight", weight)

    @property
    def m(self) -> int:
        return len(self.ranking)


@dataclass(frozen=True, slots=True)
class Profile:
    """A multiset of weighted ballots over candidates ``0..m-1``.

    An empty ballot list is allowed (total weight zero); a tally over such a
    profile is all zeros.
    """

    m: int
    ballots: tuple[Ballot, ...] = ()

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("profile needs at least one candidate")
        if not isinstance(self.ballots, tuple):
            object.__setattr__(self, "ballots", tuple(self.ballots))
        for b in self.ballots:
            if b.m != self.m:
                raise ValueError(
                    f"ballot ranks {b.m} candidates, profile has {self.m}"
                )

    @property
    def total_weight(self) -> int:
        return sum(b.weight for b in self.ballots)

    def with_ballot(self, ballot: Ballot) -> "Profile":
        """A new profile with one extra ballot appended."""
        return Profile(self.m, self.ballots + (ballot,))


@dataclass(frozen=True, slots=True)
class RoundRecord:
    """One tally round: survivors, their first-place weight, and the action."""

    remaining: frozenset[int]
    tallies: dict[int, int]
    eliminated: int | None = None
    winner: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.remaining, frozenset):
            object.__setattr__(self, "remaining", frozenset(self.remaining))
        if (self.eliminated is None) == (self.winner is None):
            raise ValueError("a round either eliminates or elects, exactly one")


@dataclass(frozen=True, slots=True)
class ElectionOutcome:
    """Winner plus the full round-by-round elimination trace."""

    winner: int
    rounds: tuple[RoundRecord, ...]


def top_among(ballot: Ballot, remaining: Iterable[int]) -> int:
    """First candidate on the ballot that is still standing."""
    pool = remaining if isinstance(remaining, (set, frozenset)) else set(remaining)
    if not pool:
        raise ValueError("no remaining candidates")
    for c in ballot.ranking:
        if c in pool:
            return c
    raise ValueError("remaining is not a subset of the ballot's candidates")


def tally(profile: Profile, remaining: Iterable[int]) -> dict[int, int]:
    """First-place weight per remaining candidate.

    Eliminated candidates are skipped on each ballot, so weight flows to the
    highest-ranked survivor. The values always sum to the profile's total
    weight.
    """
    pool = set(remaining)
    if not pool:
        raise ValueError("no remaining candidates")
    counts = {c: 0 for c in sorted(pool)}
    for b in profile.ballots:
        counts[top_among(b, pool)] += b.weight
    return counts


def eliminate_choice(tallies: Mapping[int, int], tie_rule: TieRule = MAX_INDEX) -> int:
    """Candidate to eliminate: minimal tally, ties settled by the rule."""
    if not tallies:
        raise ValueError("no candidates to eliminate")
    low = min(tallies.values())
    tied = [c for c, t in tallies.items() if t == low]
    return tie_rule.choose(tied)


def stv_winner(profile: Profile, tie_rule: TieRule = MAX_INDEX) -> ElectionOutcome:
    """Run the full STV count and return the winner with its round trace.

    Each round tallies first-place weight among remaining candidates. A
    candidate with a strict majority (more than half the total weight) wins;
    a sole survivor wins; otherwise the minimal-tally candidate is
    eliminated and the next round begins.
    """
    total = profile.total_weight
    if total == 0:
        raise ValueError("empty election")
    remaining = set(range(profile.m))
    rounds: list[RoundRecord] = []
    while True:
        counts = tally(profile, remaining)
        leader = max(counts, key=counts.get)
        if 2 * counts[leader] > total or len(remaining) == 1:
            winner = leader if 2 * counts[leader] > total else next(iter(remaining))
            rounds.append(RoundRecord(frozenset(remaining), counts, winner=winner))
            return ElectionOutcome(winner, tuple(rounds))
        out = eliminate_choice(counts, tie_rule)
        rounds.append(RoundRecord(frozenset(remaining), counts, eliminated=out))
        remaining.remove(out)
