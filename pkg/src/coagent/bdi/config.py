"""Agent configurations: the complete interpreter state rewritten by the cycle."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Mapping, Protocol

from coagent.bdi.beliefs import BeliefBase
from coagent.bdi.events import TOP, Event, TriggeringEvent, _Top
from coagent.bdi.plans import Intention, PlanLibrary


class Step(str, Enum):
    """The nine steps of the reasoning cycle, in wrap order."""

    PROC_MSG = "ProcMsg"
    SEL_EV = "SelEv"
    REL_PL = "RelPl"
    APPL_PL = "ApplPl"
    SEL_APPL = "SelAppl"
    ADD_IM = "AddIm"
    SEL_INT = "SelInt"
    EXEC_INT = "ExecInt"
    CLR_INT = "ClrInt"


class ActionFault(RuntimeError):
    """Raised by environment adapters when an action cannot be performed."""


class ConfigurationCorruption(RuntimeError):
    """Raised when an interpreter invariant is violated (signals a bug)."""


class EnvironmentAdapter(Protocol):
    """Executes actions on behalf of an agent; must respond deterministically."""

    def perform(self, cfg: "AgentConfiguration", action: str, args: dict[str, Any]) -> None:
        """Apply the action's effect; raise ActionFault for unknown actions."""


class InertEnvironment:
    """Accepts every action declared in the agent's action set; no effects."""

    def perform(self, cfg: "AgentConfiguration", action: str, args: dict[str, Any]) -> None:
        if action not in cfg.circumstance.actions:
            raise ActionFault(f"unknown action {action!r}")


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str
    payload: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"sender": self.sender, "receiver": self.receiver, "payload": dict(self.payload)}


@dataclass
class MailState:
    """Minimal agent communication state: FIFO inbox and outbox."""

    inbox: deque[Message] = field(default_factory=deque)
    outbox: deque[Message] = field(default_factory=deque)


@dataclass
class Circumstance:
    """Execution context: intentions, pending events, available actions."""

    intentions: dict[int, Intention] = field(default_factory=dict)
    events: list[Event] = field(default_factory=list)
    actions: set[str] = field(default_factory=set)


@dataclass
class TempInfo:
    """Volatile per-cycle data used between reasoning steps."""

    relevant: list[str] = field(default_factory=list)
    applicable: list[str] = field(default_factory=list)
    iota: int | None = None
    rho: str | None = None
    epsilon: Event | None = None


class AgentConfiguration:
    """The full interpreter state: program, circumstance, mail, temp data, step.

    Configurations are self-contained values mutated only by their own
    reasoning steps (and by architecture-level writers such as external
    belief updates); they are safe to hand between threads as long as a
    single thread drives them.
    """

    def __init__(
        self,
        agent_id: str,
        beliefs: BeliefBase | None = None,
        plans: PlanLibrary | None = None,
        actions: set[str] | None = None,
        environment: EnvironmentAdapter | None = None,
    ):
        self.agent_id = agent_id
        self.beliefs = beliefs or BeliefBase()
        self.plans = plans or PlanLibrary()
        self.circumstance = Circumstance(actions=set(actions or ()))
        self.mail = MailState()
        self.temp = TempInfo()
        self.step: Step = Step.PROC_MSG
        self.environment: EnvironmentAdapter = environment or InertEnvironment()
        self.observations: list[dict[str, Any]] = []
        # Co-efficient machinery, populated by module registration.
        self.modules: dict[str, Any] = {}
        self.mapping: list[tuple[str, Any]] = []
        self.select_event_override: Callable[["AgentConfiguration"], "AgentConfiguration"] | None = None
        self.observation_hooks: list[Callable[["AgentConfiguration", TriggeringEvent, int | _Top], None]] = []
        self._next_seq = 0
        self._next_intention = 1
        self.last_intention_run: int | None = None

    # -- event plumbing -----------------------------------------------------

    def next_seq(self) -> int:
        seq = self._next_seq
        self._next_seq += 1
        return seq

    def append_event(self, te: TriggeringEvent, intention: int | _Top) -> Event:
        event = Event(te=te, intention=intention, seq=self.next_seq())
        self.circumstance.events.append(event)
        return event

    def new_intention(self) -> Intention:
        intention = Intention(intention_id=self._next_intention)
        self._next_intention += 1
        self.circumstance.intentions[intention.intention_id] = intention
        return intention

    def write_belief(self, key: str, value: Any) -> Event | None:
        """Architecture-level belief write: event enters the queue paired with TOP."""
        te = self.beliefs.set(key, value)
        if te is None:
            return None
        return self.append_event(te, TOP)

    def observe(
        self,
        kind: str,
        te: TriggeringEvent | None = None,
        intention: int | _Top = TOP,
        notify: bool = False,
        **extra: Any,
    ) -> None:
        """Record an observation-stream entry; optionally notify module observers.

        Only plan lifecycle events are notified: they are observable by
        event mappings without ever entering the reactive event queue.
        """
        record: dict[str, Any] = {"kind": kind}
        if te is not None:
            record["te"] = te.to_json()
        if te is not None or intention is not TOP:
            record["intention"] = None if intention is TOP else intention
        record.update(extra)
        self.observations.append(record)
        if notify and te is not None:
            for hook in self.observation_hooks:
                hook(self, te, intention)

    # -- snapshots ----------------------------------------------------------

    def snapshot(self) -> dict[str, Any]:
        """Canonical view of the semantic state, used for trace comparison."""
        temp = self.temp
        return {
            "agent": self.agent_id,
            "step": self.step.value,
            "beliefs": dict(sorted(self.beliefs.as_dict().items())),
            "events": [event.to_json() for event in self.circumstance.events],
            "intentions": [
                self.circumstance.intentions[iid].to_json()
                for iid in sorted(self.circumstance.intentions)
            ],
            "temp": {
                "relevant": list(temp.relevant),
                "applicable": list(temp.applicable),
                "iota": temp.iota,
                "rho": temp.rho,
                "epsilon": temp.epsilon.to_json() if temp.epsilon else None,
            },
            "inbox": [message.to_json() for message in self.mail.inbox],
            "outbox": [message.to_json() for message in self.mail.outbox],
            "observations": [dict(record) for record in self.observations],
        }

    def snapshot_json(self) -> str:
        return json.dumps(self.snapshot(), sort_keys=True, separators=(",", ":"))
