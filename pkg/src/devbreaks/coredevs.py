"""Core-developer selection: commit-share heuristic and truck factor.

The truck factor uses the degree-of-authorship (DOA) model
``DOA = 3.293 + 1.098*FA + 0.164*DL - 0.321*ln(1 + AC)`` where FA is 1 for
the file's first author, DL the developer's change count on the file, and
AC everyone else's change count. A developer authors a file when their
normalized DOA exceeds 0.75 and their absolute DOA is at least 3.293.
The truck factor is the number of developers that must be removed, most
prolific author first, before more than half of the files are orphaned.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .model import CommitRecord

DOA_BASE = 3.293
DOA_FIRST_AUTHOR = 1.098
DOA_OWN_CHANGES = 0.164
DOA_OTHER_CHANGES = 0.321
AUTHOR_NORM_CUTOFF = 0.75
AUTHOR_ABS_CUTOFF = DOA_BASE


@dataclass(frozen=True)
class CoreDevSet:
    project_id: str
    method: str  # "truck_factor" | "commit_based"
    members: tuple[str, ...]
    coverage: Fraction  # commit share covered (commit_based) / file share orphaned (truck_factor)


def commit_based_core(
    commits: Sequence[CommitRecord],
    threshold: Fraction | float = Fraction(4, 5),
    include_doc_only: bool = False,
    project_id: str | None = None,
) -> CoreDevSet:
    """Smallest top-committer prefix whose cumulative share reaches threshold.

    Doc-only commits are excluded from the counting unless
    ``include_doc_only`` is set. Developers tied with the last included one
    are all included, so the result does not depend on input order.
    """
    threshold = Fraction(threshold)
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    counted = [
        c for c in commits if include_doc_only or not c.is_doc_only
    ]
    if not counted:
        raise ValueError("empty project")
    project = project_id if project_id is not None else counted[0].repo_id
    counts = Counter(c.author_key for c in counted)
    total = sum(counts.values())
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))

    members: list[str] = []
    cumulative = 0
    boundary = None
    for dev, n in ranked:
        if boundary is not None and n < boundary:
            break
        members.append(dev)
        cumulative += n
        if boundary is None and Fraction(cumulative, total) >= threshold:
            boundary = n  # keep absorbing developers tied at the boundary
    return CoreDevSet(
        project_id=project,
        method="commit_based",
        members=tuple(members),
        coverage=Fraction(cumulative, total),
    )


def file_authors(commits: Sequence[CommitRecord]) -> dict[str, set[str]]:
    """DOA-based author sets per non-doc file path."""
    changes: dict[str, Counter] = defaultdict(Counter)
    first_author: dict[str, str] = {}
    for commit in sorted(commits, key=lambda c: (c.authored_at, c.sha)):
        for path, is_doc in commit.files:
            if is_doc:
                continue
            if path not in first_author:
                first_author[path] = commit.author_key
            changes[path][commit.author_key] += 1

    authors: dict[str, set[str]] = {}
    for path, per_dev in changes.items():
        total = sum(per_dev.values())
        doas = {}
        for dev, own in per_dev.items():
            fa = 1.0 if first_author[path] == dev else 0.0
            others = total - own
            doas[dev] = (
                DOA_BASE
                + DOA_FIRST_AUTHOR * fa
                + DOA_OWN_CHANGES * own
                - DOA_OTHER_CHANGES * math.log(1 + others)
            )
        top = max(doas.values())
        authors[path] = {
            dev
            for dev, doa in doas.items()
            if top > 0 and doa / top > AUTHOR_NORM_CUTOFF and doa >= AUTHOR_ABS_CUTOFF
        }
    return authors


def truck_factor(
    commits: Sequence[CommitRecord],
    extra_members: Iterable[str] = (),
    project_id: str | None = None,
) -> CoreDevSet:
    """Greedy removal set that orphans more than half of the files.

    Doc files are ignored entirely, so doc-only contributors can never be
    members. ``extra_members`` supports manual amendment when authorship
    attribution is known to miss someone; they are appended, not counted by
    the greedy loop.
    """
    authors = file_authors(commits)
    if not authors:
        raise ValueError("no non-doc files in project")
    project = project_id if project_id is not None else commits[0].repo_id
    total = len(authors)
    remaining = {path: set(devs) for path, devs in authors.items() if devs}
    # Files whose author set came out empty are orphaned from the start.
    orphaned = total - len(remaining)
    removed: list[str] = []
    while 2 * orphaned <= total:
        tally: Counter = Counter()
        for devs in remaining.values():
            for dev in devs:
                tally[dev] += 1
        if not tally:
            break
        dev = min(tally, key=lambda d: (-tally[d], d))
        removed.append(dev)
        for path in list(remaining):
            devs = remaining[path]
            devs.discard(dev)
            if not devs:
                orphaned += 1
                del remaining[path]
    for dev in extra_members:
        if dev not in removed:
            removed.append(dev)
    return CoreDevSet(
        project_id=project,
        method="truck_factor",
        members=tuple(removed),
        coverage=Fraction(orphaned, total),
    )
