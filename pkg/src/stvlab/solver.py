"""Decide whether one weighted ballot can hand the election to a chosen candidate.

The search walks over (remaining candidates, holder) states, where the
holder is the candidate currently receiving the manipulator's weight.
Between branch points the count is fully forced, so an entire run of rounds
collapses into a single search node. Visited states are memoized: the fixed
votes determine everything except where the manipulator's weight sits, so a
revisited pair cannot produce a new outcome.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from typing import Sequence

import numpy as np

from .core import MAX_INDEX, Ballot, Profile, TieRule, stv_winner

__all__ = [
    "Decision",
    "ManipulationInstance",
    "SearchLimits",
    "SearchResult",
    "LimitExceededError",
    "manipulate_single",
    "verify_witness",
    "brute_force_manipulate",
    "winnable_set",
]


class Decision(Enum):
    MANIPULABLE = "manipulable"
    NOT_MANIPULABLE = "not_manipulable"
    LIMIT_EXCEEDED = "limit_exceeded"


class LimitExceededError(RuntimeError):
    """A search hit its node or time budget before reaching a verdict."""


@dataclass(frozen=True, slots=True)
class ManipulationInstance:
    """Fixed votes, a manipulator weight, and the candidate to be made winner.

    ``weight`` models a coalition voting in unison: k identical manipulator
    ballots behave exactly like one ballot of weight k. Weight zero means
    the manipulator abstains and the honest outcome stands.
    """

    fixed: Profile
    weight: int
    preferred: int
    tie_rule: TieRule = MAX_INDEX

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ValueError("manipulator weight must be nonnegative")
        if not 0 <= self.preferred < self.fixed.m:
            raise ValueError("preferred candidate out of range")


@dataclass(frozen=True, slots=True)
class SearchLimits:
    """Optional node and wall-time budgets for a single search."""

    max_nodes: int | None = None
    max_time: float | None = None

    def __post_init__(self) -> None:
        if self.max_nodes is not None and self.max_nodes < 1:
            raise ValueError("max_nodes must be positive")
        if self.max_time is not None and self.max_time <= 0:
            raise ValueError("max_time must be positive")


@dataclass(frozen=True, slots=True)
class SearchResult:
    """Verdict, witness ballot when manipulable, and search cost counters.

    ``LIMIT_EXCEEDED`` is a distinct third verdict: an exhausted budget is
    never reported as "not manipulable".
    """

    decision: Decision
    witness: Ballot | None
    nodes: int
    elapsed: float


class _LimitHit(Exception):
    pass


class _Search:
    """One depth-first search, with per-search tally cache and memo table."""

    def __init__(
        self,
        fixed: Profile,
        weight: int,
        preferred: int,
        tie_rule: TieRule,
        limits: SearchLimits,
        use_memo: bool,
        t0: float,
    ) -> None:
        self.m = fixed.m
        self.w = weight
        self.p = preferred
        self.tie = tie_rule
        self.max_index_tie = tie_rule.kind == "max_index"
        self.limits = limits
        self.use_memo = use_memo
        self.t0 = t0
        self.total = fixed.total_weight + weight
        nb = len(fixed.ballots)
        self._rank = np.array(
            [b.ranking for b in fixed.ballots], dtype=np.int32
        ).reshape(nb, self.m)
        self._wts = np.array([b.weight for b in fixed.ballots], dtype=np.float64)
        self._rows = np.arange(nb)
        # mask -> (fixed first-place tallies, sorted alive candidate ids)
        self._cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._visited: set[tuple[int, int]] = set()
        self.nodes = 0

    def _tallies(self, mask: int, alive: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        hit = self._cache.get(mask)
        if hit is not None:
            return hit
        cands = np.flatnonzero(alive)
        if len(self._rows):
            # argmax over booleans finds each ballot's first surviving candidate
            pos = alive[self._rank].argmax(axis=1)
            tops = self._rank[self._rows, pos]
            counts = np.bincount(tops, weights=self._wts, minlength=self.m)
        else:
            counts = np.zeros(self.m)
        entry = (counts, cands)
        self._cache[mask] = entry
        return entry

    def _check_budget(self) -> None:
        lim = self.limits
        if lim.max_nodes is not None and self.nodes > lim.max_nodes:
            raise _LimitHit
        if lim.max_time is not None and time.perf_counter() - self.t0 > lim.max_time:
            raise _LimitHit

    def _child_order(self, counts: np.ndarray, cands: np.ndarray) -> list[int]:
        # Preferred candidate first, then weakest survivors: a weak holder is
        # the cheapest way to shepherd weight toward the goal.
        rest = sorted(
            (int(c) for c in cands if c != self.p), key=lambda c: (counts[c], c)
        )
        return [self.p] + rest

    def _expand(self, mask: int, alive: np.ndarray, holder: int) -> list[int] | None:
        """Simulate forced rounds from (mask, holder); recurse at branch points.

        Returns the holder chain of a winning line, or None.
        """
        self.nodes += 1
        self._check_budget()
        w = self.w
        while True:
            counts, cands = self._tallies(mask, alive)
            vals = counts[cands]
            vals[np.searchsorted(cands, holder)] += w
            imax = int(vals.argmax())
            if 2.0 * vals[imax] > self.total:
                return [holder] if int(cands[imax]) == self.p else None
            low = vals.min()
            tied = cands[vals == low]
            out = int(tied[-1]) if self.max_index_tie else self.tie.choose(tied)
            if out == self.p:
                return None
            alive[out] = False
            mask &= ~(1 << out)
            if out != holder:
                continue
            counts, cands = self._tallies(mask, alive)
            for child in self._child_order(counts, cands):
                key = (mask, child)
                if self.use_memo:
                    if key in self._visited:
                        continue
                    self._visited.add(key)
                line = self._expand(mask, alive.copy(), child)
                if line is not None:
                    return [holder] + line
            return None

    def run(self) -> list[int] | None:
        alive = np.ones(self.m, dtype=bool)
        mask = (1 << self.m) - 1
        counts, cands = self._tallies(mask, alive)
        for first in self._child_order(counts, cands):
            key = (mask, first)
            if self.use_memo:
                if key in self._visited:
                    continue
                self._visited.add(key)
            line = self._expand(mask, alive.copy(), first)
            if line is not None:
                return line
        return None


def manipulate_single(
    instance: ManipulationInstance,
    limits: SearchLimits | None = None,
    use_memo: bool = True,
) -> SearchResult:
    """Search for a manipulator ballot that makes the preferred candidate win.

    Args:
        instance: fixed votes, manipulator weight, preferred candidate, tie rule.
        limits: optional node/time budget; exhausting it yields LIMIT_EXCEEDED.
        use_memo: disable only for testing; the verdict must not change.

    Returns:
        SearchResult whose decision is MANIPULABLE exactly when some full
        ballot of the given weight makes the preferred candidate win. The
        witness is such a ballot (holder chain first, unused candidates
        appended in ascending order); nodes counts expanded search states.
    """
    lim = limits if limits is not None else SearchLimits()
    t0 = time.perf_counter()
    fixed, w, p = instance.fixed, instance.weight, instance.preferred
    if w == 0:
        honest = stv_winner(fixed, instance.tie_rule).winner
        if honest == p:
            ranking = (p, *(c for c in range(fixed.m) if c != p))
            # weight 1 stands in for the weightless manipulator; any ballot
            # verifies since adding zero weight changes nothing
            witness = Ballot(ranking, 1)
            return SearchResult(
                Decision.MANIPULABLE, witness, 1, time.perf_counter() - t0
            )
        return SearchResult(
            Decision.NOT_MANIPULABLE, None, 1, time.perf_counter() - t0
        )
    search = _Search(fixed, w, p, instance.tie_rule, lim, use_memo, t0)
    try:
        line = search.run()
    except _LimitHit:
        return SearchResult(
            Decision.LIMIT_EXCEEDED, None, search.nodes, time.perf_counter() - t0
        )
    if line is None:
        return SearchResult(
            Decision.NOT_MANIPULABLE, None, search.nodes, time.perf_counter() - t0
        )
    unused = sorted(set(range(fixed.m)) - set(line))
    witness = Ballot(tuple(line) + tuple(unused), w)
    return SearchResult(
        Decision.MANIPULABLE, witness, search.nodes, time.perf_counter() - t0
    )


def verify_witness(
    instance: ManipulationInstance, witness: Ballot | Sequence[int]
) -> bool:
    """Replay the election with the witness ballot and check who wins."""
    ranking = witness.ranking if isinstance(witness, Ballot) else tuple(witness)
    if len(ranking) != instance.fixed.m or set(ranking) != set(range(instance.fixed.m)):
        raise ValueError("witness is not a permutation of the candidates")
    if instance.weight == 0:
        profile = instance.fixed
    else:
        profile = instance.fixed.with_ballot(Ballot(ranking, instance.weight))
    return stv_winner(profile, instance.tie_rule).winner == instance.preferred


def brute_force_manipulate(
    instance: ManipulationInstance, max_candidates: int = 7
) -> SearchResult:
    """Try every one of the m! manipulator ballots. The slow, trusted oracle.

    Refuses above ``max_candidates`` (factorial blow-up); nodes counts the
    elections actually evaluated before stopping.
    """
    m = instance.fixed.m
    if m > max_candidates:
        raise ValueError(
            f"brute force is capped at {max_candidates} candidates, got {m}"
        )
    t0 = time.perf_counter()
    w, p = instance.weight, instance.preferred
    evaluated = 0
    for perm in permutations(range(m)):
        evaluated += 1
        if w == 0:
            profile = instance.fixed
        else:
            profile = instance.fixed.with_ballot(Ballot(perm, w))
        if stv_winner(profile, instance.tie_rule).winner == p:
            witness = Ballot(perm, max(w, 1))
            return SearchResult(
                Decision.MANIPULABLE, witness, evaluated, time.perf_counter() - t0
            )
    return SearchResult(
        Decision.NOT_MANIPULABLE, None, evaluated, time.perf_counter() - t0
    )


def winnable_set(
    fixed: Profile,
    weight: int,
    tie_rule: TieRule = MAX_INDEX,
    limits: SearchLimits | None = None,
) -> set[int]:
    """All candidates the manipulator can make win."""
    winnable = set()
    for p in range(fixed.m):
        result = manipulate_single(
            ManipulationInstance(fixed, weight, p, tie_rule), limits
        )
        if result.decision is Decision.LIMIT_EXCEEDED:
            raise LimitExceededError(f"search budget exhausted for candidate {p}")
        if result.decision is Decision.MANIPULABLE:
            winnable.add(p)
    return winnable
