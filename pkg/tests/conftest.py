from __future__ import annotations

from datetime import date, datetime, timezone

import pytest

from devbreaks.model import ActivityEvent, DeveloperTimeline, EventKind


def as_dt(day: date, hour: int = 12) -> datetime:
    return datetime(day.year, day.month, day.day, hour, tzinfo=timezone.utc)


def make_event(
    day: date,
    kind: EventKind = EventKind.ISSUE_COMMENT,
    dev: str = "dev",
    hour: int = 12,
) -> ActivityEvent:
    return ActivityEvent(dev, "org/repo", as_dt(day, hour), kind, kind.value)


def make_timeline(
    days,
    events=(),
    cutoff: date | None = None,
    dev: str = "dev",
    org: str = "org",
) -> DeveloperTimeline:
    days = tuple(sorted(days))
    end = cutoff if cutoff is not None else days[-1]
    return DeveloperTimeline(
        developer_key=dev,
        org_id=org,
        commit_days=days,
        activity_events=tuple(sorted(events, key=lambda e: e.occurred_at)),
        observation_end=as_dt(end, 23),
    )


@pytest.fixture
def timeline_factory():
    return make_timeline
