"""Random vote profiles: impartial culture, urn correlation, and resampling.

All generators are pure functions of their numpy Generator, so a fixed seed
reproduces a profile exactly. They emit weight-1 ballots; use
``aggregate_profile`` to merge duplicates into weighted ballots when tally
speed matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import Ballot, Profile

__all__ = [
    "IC",
    "Urn",
    "Resample",
    "BaseProfile",
    "Distribution",
    "rng_from_seed",
    "ic_sample",
    "urn_sample",
    "resample_voters",
    "resample_candidates",
    "sample",
    "aggregate_profile",
    "builtin_bases",
]

# Fixed seeds for the bundled synthetic base profiles.
_BASE_SEED_10X32 = 91_321_032
_BASE_SEED_10X3 = 91_321_003


def rng_from_seed(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """A PCG64 generator; the same seed yields the same stream everywhere."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True, slots=True)
class BaseProfile:
    """A source profile for the resampling transforms, with a provenance label."""

    profile: Profile
    label: str


def _as_profile(base: Union[Profile, BaseProfile]) -> Profile:
    return base.profile if isinstance(base, BaseProfile) else base


def _unit_rankings(profile: Profile) -> list[tuple[int, ...]]:
    """One ranking per voter: weight-w ballots expand to w entries."""
    units: list[tuple[int, ...]] = []
    for b in profile.ballots:
        units.extend([b.ranking] * b.weight)
    return units


def ic_sample(m: int, n: int, rng: np.random.Generator) -> Profile:
    """n independent uniform random ballots over m candidates."""
    if m < 1:
        raise ValueError("need at least one candidate")
    ballots = tuple(
        Ballot(tuple(rng.permutation(m).tolist())) for _ in range(n)
    )
    return Profile(m, ballots)


def urn_sample(m: int, n: int, b: float, rng: np.random.Generator) -> Profile:
    """Correlated ballots from an urn process, normalized by parameter b.

    The literal urn starts with one ballot of each of the m! types and
    returns every draw together with a extra copies of itself; b = a / m!.
    That urn is unrepresentable for large m, so draws are realized
    sequentially: draw t is a fresh uniform ballot with probability
    1 / (1 + t*b), otherwise a copy of a uniformly chosen earlier draw.
    Each earlier draw accounts for exactly a copies in an urn of size
    m! + t*a, so the two processes have identical distributions.
    """
    if b < 0:
        raise ValueError("urn parameter must be nonnegative")
    if b == 0:
        # degenerate urn: identical to impartial culture, draw for draw
        return ic_sample(m, n, rng)
    if m < 1:
        raise ValueError("need at least one candidate")
    draws: list[tuple[int, ...]] = []
    for t in range(n):
        if rng.random() < 1.0 / (1.0 + t * b):
            draws.append(tuple(rng.permutation(m).tolist()))
        else:
            draws.append(draws[int(rng.integers(t))])
    return Profile(m, tuple(Ballot(d) for d in draws))


def resample_voters(
    base: Union[Profile, BaseProfile], n: int, rng: np.random.Generator
) -> Profile:
    """n voters drawn from a base profile.

    Asking for at most the base voter count returns a uniform random subset
    of distinct base voters; asking for more returns independent uniform
    draws with replacement.
    """
    profile = _as_profile(base)
    units = _unit_rankings(profile)
    if not units:
        raise ValueError("base profile has no voters")
    if n < 1:
        raise ValueError("need at least one voter")
    size = len(units)
    if n <= size:
        picks = rng.choice(size, size=n, replace=False)
    else:
        picks = rng.integers(0, size, size=n)
    return Profile(profile.m, tuple(Ballot(units[int(i)]) for i in picks))


def resample_candidates(
    base: Union[Profile, BaseProfile], m: int, rng: np.random.Generator
) -> Profile:
    """Rescale a base profile to m candidates.

    Shrinking restricts every ballot to a uniform random m-subset of the
    candidates (relative order preserved, survivors relabeled 0..m-1 in
    ascending source order). Growing doubles every candidate, clone tied
    with its original, until at least m exist, keeps a random m-subset if
    strictly over, and then has every voter break their ties independently
    and uniformly at random.
    """
    profile = _as_profile(base)
    if m < 1:
        raise ValueError("need at least one candidate")
    base_m = profile.m
    units = _unit_rankings(profile)
    if m <= base_m:
        chosen = np.sort(rng.choice(base_m, size=m, replace=False))
        new_id = np.full(base_m, -1, dtype=np.int64)
        new_id[chosen] = np.arange(m)
        ballots = tuple(
            Ballot(tuple(int(new_id[c]) for c in r if new_id[c] >= 0))
            for r in units
        )
        return Profile(m, ballots)
    doublings = 1
    while (base_m << doublings) < m:
        doublings += 1
    copies = 1 << doublings
    n_clones = base_m * copies
    if n_clones > m:
        kept = np.sort(rng.choice(n_clones, size=m, replace=False))
    else:
        kept = np.arange(n_clones)
    new_id = np.full(n_clones, -1, dtype=np.int64)
    new_id[kept] = np.arange(m)
    # clone ids are contiguous per source candidate: source c owns
    # [c*copies, (c+1)*copies)
    groups = [
        [int(x) for x in new_id[c * copies : (c + 1) * copies] if x >= 0]
        for c in range(base_m)
    ]
    ballots = []
    for r in units:
        out: list[int] = []
        for c in r:
            members = groups[c]
            if len(members) > 1:
                order = rng.permutation(len(members))
                out.extend(members[int(i)] for i in order)
            elif members:
                out.append(members[0])
        ballots.append(Ballot(tuple(out)))
    return Profile(m, tuple(ballots))


@dataclass(frozen=True, slots=True)
class IC:
    """Impartial culture: every ballot independently uniform."""


@dataclass(frozen=True, slots=True)
class Urn:
    """Urn process with normalized correlation parameter b (b=0 is IC)."""

    b: float


@dataclass(frozen=True, slots=True)
class Resample:
    """Resampling of a base profile: candidates rescaled, then voters drawn."""

    base: BaseProfile


Distribution = Union[IC, Urn, Resample]


def sample(
    dist: Distribution, m: int, n: int, rng: np.random.Generator
) -> Profile:
    """Draw an n-voter, m-candidate profile from the given distribution."""
    if isinstance(dist, IC):
        return ic_sample(m, n, rng)
    if isinstance(dist, Urn):
        return urn_sample(m, n, dist.b, rng)
    if isinstance(dist, Resample):
        rescaled = resample_candidates(dist.base, m, rng)
        return resample_voters(rescaled, n, rng)
    raise TypeError(f"unknown distribution {dist!r}")


def dist_label(dist: Distribution) -> tuple[str, str]:
    """(name, b_param) pair used in results files."""
    if isinstance(dist, IC):
        return "ic", ""
    if isinstance(dist, Urn):
        return "urn", f"{dist.b:.6g}"
    if isinstance(dist, Resample):
        return f"resample:{dist.base.label}", ""
    raise TypeError(f"unknown distribution {dist!r}")


def aggregate_profile(profile: Profile) -> Profile:
    """Merge identical rankings into single weighted ballots.

    Order follows first occurrence, so the result is deterministic. The
    election outcome is unchanged: a weight-w ballot tallies exactly like w
    copies of it.
    """
    weights: dict[tuple[int, ...], int] = {}
    for b in profile.ballots:
        weights[b.ranking] = weights.get(b.ranking, 0) + b.weight
    return Profile(
        profile.m, tuple(Ballot(r, w) for r, w in weights.items())
    )


def builtin_bases() -> dict[str, BaseProfile]:
    """Two bundled synthetic base profiles for the resampling pipeline.

    Real-world ballot data is not distributed with the package; these are
    fixed-seed uniform profiles with the same shapes (10 voters over 32
    candidates, and 10 voters over 3), so the full pipeline stays runnable.
    Any other base can be loaded from a profile file instead.
    """
    return {
        "10x32": BaseProfile(
            ic_sample(32, 10, rng_from_seed(_BASE_SEED_10X32)), "synthetic-10x32"
        ),
        "10x3": BaseProfile(
            ic_sample(3, 10, rng_from_seed(_BASE_SEED_10X3)), "synthetic-10x3"
        ),
    }
