"""Persistent cache for ingested timelines and resolved commit records.

Layout: a directory with a ``manifest.json`` carrying the format version,
one JSON file per developer under ``devs/``, and a ``commits.json`` with
the resolved commit records (needed by the core-developer stage). Loading
refuses anything with a different format version.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime
from pathlib import Path
from typing import Sequence

from .dates import parse_utc
from .errors import CacheError
from .model import ActivityEvent, CommitRecord, DeveloperTimeline, EventKind

FORMAT_NAME = "devbreaks-cache"
FORMAT_VERSION = 1


def _dev_filename(dev: str) -> str:
    return hashlib.sha1(dev.encode("utf-8")).hexdigest()[:20] + ".json"


def _dump(path: Path, payload: object) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=1), encoding="utf-8")


def cache_store(
    path: str | Path,
    timelines: dict[str, DeveloperTimeline],
    commits: Sequence[CommitRecord],
    org_id: str,
    cutoff: datetime,
) -> None:
    root = Path(path)
    (root / "devs").mkdir(parents=True, exist_ok=True)
    dev_index = {}
    for dev in sorted(timelines):
        tl = timelines[dev]
        fname = _dev_filename(dev)
        dev_index[dev] = fname
        _dump(
            root / "devs" / fname,
            {
                "format_version": FORMAT_VERSION,
                "developer_key": tl.developer_key,
                "org_id": tl.org_id,
                "commit_days": [d.isoformat() for d in tl.commit_days],
                "observation_end": tl.observation_end.isoformat(),
                "activity_events": [
                    {
                        "repo": ev.repo_id,
                        "occurred_at": ev.occurred_at.isoformat(),
                        "kind": ev.kind.value,
                        "raw_kind": ev.raw_kind,
                    }
                    for ev in tl.activity_events
                ],
            },
        )
    _dump(
        root / "commits.json",
        [
            {
                "repo": c.repo_id,
                "sha": c.sha,
                "author": c.author_key,
                "authored_at": c.authored_at.isoformat(),
                "files": [[p, d] for p, d in c.files],
                "via_pull_request": c.via_pull_request,
            }
            for c in sorted(commits, key=lambda c: (c.repo_id, c.authored_at, c.sha))
        ],
    )
    _dump(
        root / "manifest.json",
        {
            "format": FORMAT_NAME,
            "format_version": FORMAT_VERSION,
            "org_id": org_id,
            "cutoff": cutoff.isoformat(),
            "developers": dev_index,
        },
    )


def _read_json(path: Path) -> dict | list:
    if not path.exists():
        raise CacheError(f"missing cache file: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheError(f"corrupted cache file {path}: {exc}") from exc


def load_manifest(path: str | Path) -> dict:
    root = Path(path)
    manifest = _read_json(root / "manifest.json")
    if not isinstance(manifest, dict) or manifest.get("format") != FORMAT_NAME:
        raise CacheError(f"{root} is not a timeline cache")
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CacheError(
            f"cache version {manifest.get('format_version')} not supported "
            f"(expected {FORMAT_VERSION})"
        )
    return manifest


def cache_load(path: str | Path) -> dict[str, DeveloperTimeline]:
    root = Path(path)
    manifest = load_manifest(root)
    timelines = {}
    for dev, fname in sorted(manifest["developers"].items()):
        payload = _read_json(root / "devs" / fname)
        try:
            if payload["format_version"] != FORMAT_VERSION:
                raise CacheError(f"developer file {fname} has a mismatched version")
            timelines[dev] = DeveloperTimeline(
                developer_key=payload["developer_key"],
                org_id=payload["org_id"],
                commit_days=tuple(
                    datetime.strptime(d, "%Y-%m-%d").date()
                    for d in payload["commit_days"]
                ),
                activity_events=tuple(
                    ActivityEvent(
                        developer_key=payload["developer_key"],
                        repo_id=ev["repo"],
                        occurred_at=parse_utc(ev["occurred_at"]),
                        kind=EventKind(ev["kind"]),
                        raw_kind=ev["raw_kind"],
                    )
                    for ev in payload["activity_events"]
                ),
                observation_end=parse_utc(payload["observation_end"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CacheError(f"corrupted developer file {fname}: {exc}") from exc
    return timelines


def load_commits(path: str | Path) -> list[CommitRecord]:
    root = Path(path)
    load_manifest(root)
    payload = _read_json(root / "commits.json")
    commits = []
    try:
        for obj in payload:
            commits.append(
                CommitRecord(
                    repo_id=obj["repo"],
                    sha=obj["sha"],
                    author_key=obj["author"],
                    authored_at=parse_utc(obj["authored_at"]),
                    files=tuple((p, bool(d)) for p, d in obj["files"]),
                    via_pull_request=bool(obj.get("via_pull_request", False)),
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise CacheError(f"corrupted commits.json: {exc}") from exc
    return commits
