"""Parse commit logs and event exports into per-developer timelines.

Two input formats are supported for commits:

* ``git_log``: records separated by a line ``@@@``; the first line of a
  record is ``<sha>|<author name>|<author email>|<ISO-8601 authored date>``
  and every following line is ``<status>\\t<path>`` (the last tab field is
  taken as the path, so rename lines work too).
* ``ndjson``: one JSON object per line with keys ``repo``, ``sha``,
  ``author``, ``authored_at``, and optionally ``files`` (list of paths) and
  ``via_pull_request``.

Events come as newline-delimited JSON with keys ``repo``, ``actor``,
``created_at``, ``type``. Raw ``type`` strings are normalized through a
mapping table (see DEFAULT_EVENT_KINDS); unknown types map to
``other_passive`` and are counted so silently dropped activity is visible.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from fnmatch import fnmatch
from pathlib import PurePosixPath
from typing import Iterable, Sequence

from .dates import parse_utc, utc_day
from .errors import IngestError
from .model import (
    ActivityEvent,
    CollaborationEvent,
    CommitRecord,
    DeveloperTimeline,
    EventKind,
    IdentityMap,
    PASSIVE_KINDS,
)

RECORD_SEPARATOR = "@@@"

# A commit file is documentation when its path matches any of these
# case-insensitive globs. Patterns without a slash are also tried against
# the basename.
DEFAULT_DOC_PATTERNS = (
    "*.md",
    "*.rst",
    "*.txt",
    "*.adoc",
    "docs/**",
    "doc/**",
    "LICENSE*",
    "CHANGELOG*",
)

# Raw forge event types -> normalized kinds. Lookup is case-insensitive.
# Received-side rows (the developer is the target, not the actor) map to
# passive kinds and never count as activity.
DEFAULT_EVENT_KINDS: dict[str, EventKind] = {
    # coding-class
    "pr_opened": EventKind.PR_OPENED,
    "pull_request_opened": EventKind.PR_OPENED,
    "pullrequestevent": EventKind.PR_OPENED,
    # collaboration without code
    "pr_comment": EventKind.PR_COMMENT,
    "pull_request_comment": EventKind.PR_COMMENT,
    "pull_request_review_comment": EventKind.PR_COMMENT,
    "pullrequestreviewcommentevent": EventKind.PR_COMMENT,
    "pr_review": EventKind.PR_COMMENT,
    "issue_opened": EventKind.ISSUE_OPENED,
    "issues_opened": EventKind.ISSUE_OPENED,
    "issuesevent": EventKind.ISSUE_OPENED,
    "issue_comment": EventKind.ISSUE_COMMENT,
    "issuecommentevent": EventKind.ISSUE_COMMENT,
    "commit_comment": EventKind.ISSUE_COMMENT,
    "commitcommentevent": EventKind.ISSUE_COMMENT,
    "issue_closed": EventKind.ISSUE_ACTION_ACTIVE,
    "issue_reopened": EventKind.ISSUE_ACTION_ACTIVE,
    "issue_labeled": EventKind.ISSUE_ACTION_ACTIVE,
    "issue_unlabeled": EventKind.ISSUE_ACTION_ACTIVE,
    "issue_assigned": EventKind.ISSUE_ACTION_ACTIVE,
    "issue_milestoned": EventKind.ISSUE_ACTION_ACTIVE,
    "issue_subscribed": EventKind.ISSUE_ACTION_ACTIVE,
    "issue_action": EventKind.ISSUE_ACTION_ACTIVE,
    "pr_closed": EventKind.ISSUE_ACTION_ACTIVE,
    "pr_merged": EventKind.ISSUE_ACTION_ACTIVE,
    "pull_request_closed": EventKind.ISSUE_ACTION_ACTIVE,
    # received side: excluded from activity
    "mention": EventKind.MENTION_RECEIVED,
    "mentioned": EventKind.MENTION_RECEIVED,
    "mention_received": EventKind.MENTION_RECEIVED,
    "assigned": EventKind.ASSIGNMENT_RECEIVED,
    "unassigned": EventKind.ASSIGNMENT_RECEIVED,
    "assignment_received": EventKind.ASSIGNMENT_RECEIVED,
    "subscribed": EventKind.OTHER_PASSIVE,
    "other_passive": EventKind.OTHER_PASSIVE,
}

# Parsing tolerates occasional garbage, but more than this fraction of
# malformed records signals a wrong-format file.
MALFORMED_HARD_LIMIT = 0.10


def is_doc_path(path: str, patterns: Sequence[str] = DEFAULT_DOC_PATTERNS) -> bool:
    lowered = path.strip().lstrip("/").lower()
    name = PurePosixPath(lowered).name
    for pattern in patterns:
        pat = pattern.lower()
        if fnmatch(lowered, pat):
            return True
        if "/" not in pat and fnmatch(name, pat):
            return True
    return False


def load_doc_patterns(path: str) -> tuple[str, ...]:
    """Read one glob per line; blank lines and '#' comments are skipped."""
    patterns = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                patterns.append(stripped)
    if not patterns:
        raise IngestError(f"no doc patterns found in {path}")
    return tuple(patterns)


@dataclass
class CommitParse:
    records: list[CommitRecord]
    malformed: int = 0


@dataclass
class EventParse:
    events: list[CollaborationEvent]
    malformed: int = 0
    unknown_kinds: Counter = field(default_factory=Counter)


def parse_commit_log(
    stream: Iterable[str],
    format: str,
    repo_id: str | None = None,
    doc_patterns: Sequence[str] = DEFAULT_DOC_PATTERNS,
) -> CommitParse:
    """Parse a commit log into records, skipping and counting malformed ones.

    Raises IngestError when the format name is unknown or when more than
    MALFORMED_HARD_LIMIT of the records fail to parse.
    """
    if format == "git_log":
        result = _parse_git_log(stream, repo_id, doc_patterns)
    elif format == "ndjson":
        result = _parse_commit_ndjson(stream, repo_id, doc_patterns)
    else:
        raise IngestError(f"unknown commit log format: {format!r}")

    total = len(result.records) + result.malformed
    if total and result.malformed / total > MALFORMED_HARD_LIMIT:
        raise IngestError(
            f"{result.malformed} of {total} records malformed; "
            "this does not look like a valid commit log"
        )
    return result


def _parse_git_log(
    stream: Iterable[str],
    repo_id: str | None,
    doc_patterns: Sequence[str],
) -> CommitParse:
    if repo_id is None:
        raise IngestError("git_log format requires a repo id")
    records: list[CommitRecord] = []
    malformed = 0
    chunk: list[str] = []

    def flush(lines: list[str]) -> None:
        nonlocal malformed
        lines = [ln for ln in lines if ln.strip()]
        if not lines:
            return
        rec = _git_log_record(lines, repo_id, doc_patterns)
        if rec is None:
            malformed += 1
        else:
            records.append(rec)

    for raw in stream:
        line = raw.rstrip("\n")
        if line.strip() == RECORD_SEPARATOR:
            flush(chunk)
            chunk = []
        else:
            chunk.append(line)
    flush(chunk)
    return CommitParse(records, malformed)


def _git_log_record(
    lines: list[str], repo_id: str, doc_patterns: Sequence[str]
) -> CommitRecord | None:
    header = lines[0].split("|")
    if len(header) != 4:
        return None
    sha, _name, email, when = (part.strip() for part in header)
    if not sha or not when:
        return None
    try:
        authored_at = parse_utc(when)
    except ValueError:
        return None
    files = []
    for line in lines[1:]:
        parts = line.split("\t")
        if len(parts) < 2:
            return None
        path = parts[-1].strip()
        if path:
            files.append((path, is_doc_path(path, doc_patterns)))
    return CommitRecord(
        repo_id=repo_id,
        sha=sha,
        author_key=email,
        authored_at=authored_at,
        files=tuple(files),
    )


def _parse_commit_ndjson(
    stream: Iterable[str],
    repo_id: str | None,
    doc_patterns: Sequence[str],
) -> CommitParse:
    records: list[CommitRecord] = []
    malformed = 0
    for raw in stream:
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            repo = obj.get("repo", repo_id)
            sha = obj["sha"]
            author = obj["author"]
            authored_at = parse_utc(obj["authored_at"])
            paths = obj.get("files", [])
            if repo is None or not sha or not author:
                raise ValueError("missing field")
            files = tuple(
                (p, is_doc_path(p, doc_patterns)) for p in paths if isinstance(p, str)
            )
        except (KeyError, TypeError, ValueError, json.JSONDecodeError):
            malformed += 1
            continue
        records.append(
            CommitRecord(
                repo_id=str(repo),
                sha=str(sha),
                author_key=str(author),
                authored_at=authored_at,
                files=files,
                via_pull_request=bool(obj.get("via_pull_request", False)),
            )
        )
    return CommitParse(records, malformed)


def parse_events(
    stream: Iterable[str],
    kind_map: dict[str, EventKind] | None = None,
) -> EventParse:
    """Parse an NDJSON event export, normalizing raw types through kind_map."""
    table = DEFAULT_EVENT_KINDS if kind_map is None else kind_map
    events: list[CollaborationEvent] = []
    malformed = 0
    unknown: Counter = Counter()
    for raw in stream:
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            repo = str(obj["repo"])
            actor = str(obj["actor"])
            occurred_at = parse_utc(obj["created_at"])
            raw_kind = str(obj["type"])
        except (KeyError, TypeError, ValueError, json.JSONDecodeError):
            malformed += 1
            continue
        kind = table.get(raw_kind.strip().lower())
        if kind is None:
            unknown[raw_kind] += 1
            kind = EventKind.OTHER_PASSIVE
        events.append(
            CollaborationEvent(
                repo_id=repo,
                actor_key=actor,
                occurred_at=occurred_at,
                kind=kind,
                raw_kind=raw_kind,
            )
        )
    total = len(events) + malformed
    if total and malformed / total > MALFORMED_HARD_LIMIT:
        raise IngestError(
            f"{malformed} of {total} event records malformed; wrong format?"
        )
    return EventParse(events, malformed, unknown)


def load_identity_map(path: str) -> IdentityMap:
    """Load an alias file: a JSON object, either alias -> canonical key, or
    canonical key -> list of aliases. Email aliases are matched
    case-insensitively."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestError(f"cannot read alias file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise IngestError("alias file must be a JSON object")
    aliases: dict[str, str] = {}
    for key, value in data.items():
        if isinstance(value, str):
            aliases[_alias_key(key)] = value
        elif isinstance(value, list):
            for alias in value:
                aliases[_alias_key(str(alias))] = key
        else:
            raise IngestError("alias values must be strings or lists of strings")
    return IdentityMap(aliases)


def _alias_key(raw: str) -> str:
    key = raw.strip()
    return key.lower() if "@" in key else key


@dataclass
class TimelineBuild:
    timelines: dict[str, DeveloperTimeline]
    unresolved: list[str]
    dropped_after_cutoff: int


def build_timeline(
    commits: Sequence[CommitRecord],
    events: Sequence[CollaborationEvent],
    ids: IdentityMap,
    org: str,
    cutoff: datetime,
) -> TimelineBuild:
    """Merge commits and events into one timeline per resolved developer.

    Commits are deduplicated by (repo, sha), events by their full identity,
    so feeding the same files twice yields identical timelines. Records
    after the cutoff are dropped (and counted); passive events never enter
    a timeline. Keys the identity map does not know resolve to themselves
    and are reported in ``unresolved``.
    """
    unresolved: set[str] = set()
    dropped = 0

    seen_commits: set[tuple[str, str]] = set()
    commit_days: dict[str, set] = {}
    for commit in commits:
        key = (commit.repo_id, commit.sha)
        if key in seen_commits:
            continue
        seen_commits.add(key)
        if commit.authored_at > cutoff:
            dropped += 1
            continue
        if not ids.knows(commit.author_key):
            unresolved.add(commit.author_key)
        dev = ids.resolve(commit.author_key)
        commit_days.setdefault(dev, set()).add(utc_day(commit.authored_at))

    seen_events: set[tuple] = set()
    dev_events: dict[str, list[ActivityEvent]] = {}
    for event in events:
        ident = (event.repo_id, event.actor_key, event.occurred_at, event.raw_kind)
        if ident in seen_events:
            continue
        seen_events.add(ident)
        if event.occurred_at > cutoff:
            dropped += 1
            continue
        if not ids.knows(event.actor_key):
            unresolved.add(event.actor_key)
        dev = ids.resolve(event.actor_key)
        if event.kind in PASSIVE_KINDS:
            # Developer is still observed, just with no countable activity.
            dev_events.setdefault(dev, [])
            continue
        dev_events.setdefault(dev, []).append(
            ActivityEvent(
                developer_key=dev,
                repo_id=event.repo_id,
                occurred_at=event.occurred_at,
                kind=event.kind,
                raw_kind=event.raw_kind,
            )
        )

    timelines = {}
    for dev in sorted(set(commit_days) | set(dev_events)):
        evs = sorted(
            dev_events.get(dev, []),
            key=lambda e: (e.occurred_at, e.repo_id, e.kind.value, e.raw_kind),
        )
        timelines[dev] = DeveloperTimeline(
            developer_key=dev,
            org_id=org,
            commit_days=tuple(sorted(commit_days.get(dev, set()))),
            activity_events=tuple(evs),
            observation_end=cutoff,
        )
    return TimelineBuild(timelines, sorted(unresolved), dropped)
