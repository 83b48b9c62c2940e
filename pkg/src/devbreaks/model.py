"""Domain types for commit and collaboration histories."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum


class EventKind(str, Enum):
    """Normalized collaboration-event kinds.

    The first five kinds are actions a developer performs; the last three
    happen *to* a developer (or are untrackable) and never count as activity.
    """

    PR_OPENED = "pr_opened"
    PR_COMMENT = "pr_comment"
    ISSUE_OPENED = "issue_opened"
    ISSUE_COMMENT = "issue_comment"
    ISSUE_ACTION_ACTIVE = "issue_action_active"
    MENTION_RECEIVED = "mention_received"
    ASSIGNMENT_RECEIVED = "assignment_received"
    OTHER_PASSIVE = "other_passive"


PASSIVE_KINDS = frozenset(
    {EventKind.MENTION_RECEIVED, EventKind.ASSIGNMENT_RECEIVED, EventKind.OTHER_PASSIVE}
)

# Opening a pull request counts as a coding-class action; the remaining
# active kinds are collaboration without code.
CODING_KINDS = frozenset({EventKind.PR_OPENED})


@dataclass(frozen=True)
class CommitRecord:
    """One commit: author, UTC author time, and the set of changed paths."""

    repo_id: str
    sha: str
    author_key: str
    authored_at: datetime
    files: tuple[tuple[str, bool], ...]  # (path, is_doc)
    via_pull_request: bool = False

    @property
    def is_doc_only(self) -> bool:
        """True when every changed path is documentation.

        Commits whose source log omitted paths are never doc-only.
        """
        return bool(self.files) and all(is_doc for _, is_doc in self.files)

    @property
    def files_missing(self) -> bool:
        return not self.files


@dataclass(frozen=True)
class CollaborationEvent:
    """A raw forge event before identity resolution."""

    repo_id: str
    actor_key: str
    occurred_at: datetime
    kind: EventKind
    raw_kind: str

    @property
    def is_passive(self) -> bool:
        return self.kind in PASSIVE_KINDS


@dataclass(frozen=True)
class ActivityEvent:
    """A non-passive action by one resolved developer in one repository."""

    developer_key: str
    repo_id: str
    occurred_at: datetime
    kind: EventKind
    raw_kind: str

    @property
    def is_coding(self) -> bool:
        return self.kind in CODING_KINDS


@dataclass(frozen=True)
class DeveloperTimeline:
    """Organization-level merged history of one developer.

    ``commit_days`` is the sorted set of distinct UTC dates on which the
    developer authored at least one commit in any repository of the
    organization. ``activity_events`` holds only non-passive events, sorted
    by time. Both are immutable after construction; downstream stages treat
    timelines as read-only shared data.
    """

    developer_key: str
    org_id: str
    commit_days: tuple[date, ...]
    activity_events: tuple[ActivityEvent, ...]
    observation_end: datetime

    def __post_init__(self) -> None:
        for a, b in zip(self.commit_days, self.commit_days[1:]):
            if a >= b:
                raise ValueError("commit_days must be strictly increasing")
        cutoff = self.observation_end
        for ev in self.activity_events:
            if ev.kind in PASSIVE_KINDS:
                raise ValueError(f"passive event in timeline: {ev.kind}")
            if ev.occurred_at > cutoff:
                raise ValueError("event after observation_end")

    @property
    def first_commit_day(self) -> date | None:
        return self.commit_days[0] if self.commit_days else None

    @property
    def last_commit_day(self) -> date | None:
        return self.commit_days[-1] if self.commit_days else None

    def event_days(self) -> list[date]:
        """Sorted distinct UTC dates of the developer's active events."""
        return sorted({ev.occurred_at.date() for ev in self.activity_events})


@dataclass(frozen=True)
class IdentityMap:
    """Maps observed author/actor keys (emails, logins) to canonical keys.

    Resolution is exact-match only: emails are compared case-insensitively,
    other keys verbatim. Keys absent from the alias table resolve to
    themselves, so the mapping is total over any input.
    """

    aliases: dict[str, str] = field(default_factory=dict)

    def resolve(self, raw_key: str) -> str:
        key = raw_key.strip()
        if key in self.aliases:
            return self.aliases[key]
        lowered = key.lower()
        if lowered in self.aliases:
            return self.aliases[lowered]
        return key

    def knows(self, raw_key: str) -> bool:
        key = raw_key.strip()
        return key in self.aliases or key.lower() in self.aliases
