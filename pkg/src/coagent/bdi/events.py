"""Reasoning events and event patterns.

A triggering event describes one change in the agent: a belief mutation, a
goal lifecycle transition, a plan lifecycle transition, or an incoming
message.  Events queued for reactive processing are pairs of a triggering
event and the intention that caused it (``TOP`` for external events), tagged
with a monotone sequence number that fixes selection order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping


class EventCategory(str, Enum):
    BELIEF_ADDED = "belief-added"
    BELIEF_UPDATED = "belief-updated"
    BELIEF_REMOVED = "belief-removed"
    GOAL_ADDED = "goal-added"
    GOAL_SUCCEEDED = "goal-succeeded"
    GOAL_FAILED = "goal-failed"
    PLAN_STARTED = "plan-started"
    PLAN_FINISHED = "plan-finished"
    MESSAGE_RECEIVED = "message-received"


#: Categories a co-efficient module may inject.  Plan lifecycle events exist
#: only on the observation stream and are never legal injection targets.
INJECTABLE_CATEGORIES = frozenset(
    {EventCategory.GOAL_ADDED, EventCategory.BELIEF_UPDATED, EventCategory.MESSAGE_RECEIVED}
)

#: Categories recorded on the observation stream instead of the event queue.
OBSERVATION_ONLY_CATEGORIES = frozenset(
    {EventCategory.PLAN_STARTED, EventCategory.PLAN_FINISHED}
)


class _Top:
    """The empty intention: marks events not tied to any running intention."""

    _instance: "_Top | None" = None

    def __new__(cls) -> "_Top":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TOP"


TOP = _Top()


@dataclass(frozen=True)
class TriggeringEvent:
    """One reasoning event: a category, the identifier it concerns, and bindings."""

    category: EventCategory
    subject: str
    payload: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "category": self.category.value,
            "subject": self.subject,
            "payload": dict(self.payload),
        }


@dataclass(frozen=True)
class Event:
    """A queued event: the triggering event paired with an intention id (or TOP)."""

    te: TriggeringEvent
    intention: int | _Top
    seq: int

    def to_json(self) -> dict[str, Any]:
        iid = None if self.intention is TOP else self.intention
        return {"te": self.te.to_json(), "intention": iid, "seq": self.seq}


@dataclass(frozen=True)
class EventPattern:
    """Matches triggering events by category, subject, and payload bindings.

    ``categories`` of ``None`` matches any category, otherwise the event's
    category must be listed.  ``subject`` is an exact identifier, a prefix
    pattern ending in ``*``, or ``None`` for any subject.  ``payload`` lists
    required key/value bindings; keys not listed are wildcards.
    """

    categories: tuple[EventCategory, ...] | None = None
    subject: str | None = None
    payload: Mapping[str, Any] = field(default_factory=dict)

    def matches(self, te: TriggeringEvent) -> bool:
        if self.categories is not None and te.category not in self.categories:
            return False
        if self.subject is not None:
            if self.subject.endswith("*"):
                if not te.subject.startswith(self.subject[:-1]):
                    return False
            elif te.subject != self.subject:
                return False
        for key, value in self.payload.items():
            if key not in te.payload or te.payload[key] != value:
                return False
        return True


def pattern(
    category: EventCategory | str | list | tuple | None,
    subject: str | None = None,
    payload: Mapping[str, Any] | None = None,
) -> EventPattern:
    """Convenience constructor accepting single categories, lists, or names."""
    cats: tuple[EventCategory, ...] | None
    if category is None:
        cats = None
    elif isinstance(category, (list, tuple)):
        cats = tuple(EventCategory(c) for c in category)
    else:
        cats = (EventCategory(category),)
    return EventPattern(categories=cats, subject=subject, payload=dict(payload or {}))
