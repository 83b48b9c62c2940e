"""Calendar helpers. Everything downstream works in UTC at day granularity."""

from __future__ import annotations

import calendar
from datetime import date, datetime, timezone


def parse_utc(value: str) -> datetime:
    """Parse an ISO-8601 timestamp into a tz-aware UTC datetime.

    Accepts a trailing ``Z``, a space instead of ``T``, and bare dates
    (midnight). Naive inputs are assumed to already be UTC.
    """
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    if " " in text and "T" not in text:
        text = text.replace(" ", "T", 1)
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def utc_day(dt: datetime) -> date:
    return dt.astimezone(timezone.utc).date()


def add_months(day: date, months: int) -> date:
    """Shift a date by whole calendar months, clamping to the month end.

    Jan 31 + 1 month is Feb 28 (or 29 in leap years).
    """
    month_index = day.month - 1 + months
    year = day.year + month_index // 12
    month = month_index % 12 + 1
    last = calendar.monthrange(year, month)[1]
    return date(year, month, min(day.day, last))
