"""Toolchain for mining developer activity rhythms from repository histories.

The pipeline runs in five stages, each usable on its own:

1. ingest      -- parse commit logs and collaboration-event exports into
                  per-developer, organization-level timelines (cached on disk)
2. coredevs    -- select core developers (truck factor / commit share)
3. rhythm      -- detect longer-than-usual pauses with a sliding-window
                  far-out-value threshold
4. lifecycle   -- segment detected breaks into labeled states and build each
                  developer's state timeline with named transitions
5. analytics   -- aggregate traces into frequency/duration tables, transition
                  matrices, paired nonparametric tests, and odds ratios
"""

__version__ = "0.1.0"
