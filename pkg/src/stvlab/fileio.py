"""Text formats: the ballot profile file and the experiment results CSV.

Profile files look like::

    # optional comment
    m=3
    2: 0>1>2
    1: 2>1>0

The header names the candidate count; each following line is one weighted
ballot, weight before the colon, candidates best-first separated by '>'.
Blank lines and '#' comments are ignored. Parsing then writing (or the
reverse) round-trips exactly.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

from .core import Ballot, Profile

__all__ = [
    "ProfileParseError",
    "parse_profile",
    "write_profile",
    "read_profile_file",
    "write_profile_file",
    "RESULTS_COLUMNS",
    "write_results_csv",
    "read_results_csv",
]


class ProfileParseError(ValueError):
    """Malformed profile text; the message names the offending line."""

    def __init__(self, message: str, line_no: int) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_profile(text: str) -> Profile:
    """Parse profile text into a validated Profile."""
    m: int | None = None
    ballots: list[Ballot] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if m is None:
            if not line.startswith("m="):
                raise ProfileParseError("expected header 'm=<count>'", line_no)
            try:
                m = int(line[2:])
            except ValueError:
                raise ProfileParseError("candidate count is not an integer", line_no)
            if m < 1:
                raise ProfileParseError("candidate count must be positive", line_no)
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise ProfileParseError("expected '<weight>: c0>c1>...'", line_no)
        try:
            weight = int(head.strip())
        except ValueError:
            raise ProfileParseError("weight is not an integer", line_no)
        if weight < 1:
            raise ProfileParseError("weight must be a positive integer", line_no)
        try:
            ranking = tuple(int(tok.strip()) for tok in tail.split(">"))
        except ValueError:
            raise ProfileParseError("candidate index is not an integer", line_no)
        if len(ranking) != m:
            raise ProfileParseError(
                f"ballot ranks {len(ranking)} candidates, expected {m}", line_no
            )
        if len(set(ranking)) != len(ranking):
            raise ProfileParseError("duplicate candidate in ranking", line_no)
        if any(not 0 <= c < m for c in ranking):
            raise ProfileParseError("candidate index out of range", line_no)
        ballots.append(Ballot(ranking, weight))
    if m is None:
        raise ProfileParseError("missing header 'm=<count>'", 1)
    return Profile(m, tuple(ballots))


def write_profile(profile: Profile, comment: str | None = None) -> str:
    """Render a profile in the text format; inverse of parse_profile."""
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"m={profile.m}")
    for b in profile.ballots:
        lines.append(f"{b.weight}: " + ">".join(str(c) for c in b.ranking))
    return "\n".join(lines) + "\n"


def read_profile_file(path: str | Path) -> Profile:
    return parse_profile(Path(path).read_text())


def write_profile_file(
    path: str | Path, profile: Profile, comment: str | None = None
) -> None:
    Path(path).write_text(write_profile(profile, comment))


RESULTS_COLUMNS = (
    "distribution",
    "b_param",
    "m",
    "n",
    "weight",
    "trials",
    "p_manipulable",
    "stderr",
    "nodes_mean",
    "nodes_median",
    "nodes_p90",
    "nodes_max",
    "time_mean_ms",
    "unresolved",
    "master_seed",
)


def fmt6(value: float) -> str:
    """Fixed 6-significant-digit formatting used throughout the CSV."""
    if value != value:  # NaN
        return "nan"
    return f"{value:.6g}"


def results_header_line() -> str:
    return ",".join(RESULTS_COLUMNS) + "\n"


def results_row_line(row: dict[str, object]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([row[col] for col in RESULTS_COLUMNS])
    return out.getvalue()


def write_results_csv(path: str | Path, rows: Iterable[dict[str, object]]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(results_header_line())
        for row in rows:
            fh.write(results_row_line(row))


def read_results_csv(path: str | Path) -> list[dict[str, object]]:
    """Read a results CSV back with numeric columns typed.

    An empty cell (for example an unrecorded time) comes back as None.
    """
    int_cols = {"m", "n", "weight", "trials", "nodes_max", "unresolved", "master_seed"}
    float_cols = {
        "p_manipulable",
        "stderr",
        "nodes_mean",
        "nodes_median",
        "nodes_p90",
        "time_mean_ms",
        "b_param",
    }
    rows: list[dict[str, object]] = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            row: dict[str, object] = {}
            for key, val in rec.items():
                if val == "" or val is None:
                    row[key] = None
                elif key in int_cols:
                    row[key] = int(val)
                elif key in float_cols:
                    row[key] = float(val)
                else:
                    row[key] = val
            rows.append(row)
    return rows
