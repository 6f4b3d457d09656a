"""Activated agent modules: observation-driven, guarded event injection.

A co-efficient module is a namespaced container of beliefs and plans plus an
ordered event mapping.  Each mapping entry names an observed event pattern,
an event template to inject when the pattern fires, a placement (current or
new intention), and an optional guard condition over the host state.

Registration merges the module elements into the host agent under the module
namespace and switches event selection to the extended rule: when the
selected event is observed by the mapping and the guard holds, the
instantiated template is appended to the event queue with a fresh sequence
number.  The selected event itself is processed unchanged, and the injected
event waits its turn like any other; the reasoner keeps full authority.

Plan lifecycle events never enter the event queue; modules observe them
through a hook on the observation stream, with the same mapping semantics.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

from coagent.bdi.beliefs import BeliefValue
from coagent.bdi.config import AgentConfiguration, Step
from coagent.bdi.events import (
    INJECTABLE_CATEGORIES,
    TOP,
    EventCategory,
    EventPattern,
    TriggeringEvent,
    _Top,
)
from coagent.bdi.expressions import UNDEFINED, Env, Expr
from coagent.bdi.plans import Act, Believe, Plan, Send, Subgoal, Unbelieve


class Placement(str, Enum):
    CURRENT_INTENTION = "current-intention"
    NEW_INTENTION = "new-intention"


class ModuleRegistrationError(ValueError):
    """Duplicate module id or namespace collision."""


class MappingError(ValueError):
    """Illegal event mapping entry."""


@dataclass(frozen=True)
class EventTemplate:
    """An injectable event: category, subject, payload expressions over bindings."""

    category: EventCategory
    subject: str
    payload: Mapping[str, Expr] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.category not in INJECTABLE_CATEGORIES:
            raise MappingError(
                f"category {self.category.value!r} cannot be injected; "
                f"legal categories: {sorted(c.value for c in INJECTABLE_CATEGORIES)}"
            )

    def instantiate(self, te: TriggeringEvent) -> TriggeringEvent:
        """Evaluate payload expressions against the observed event's bindings.

        Expressions without a defined value drop their key from the payload.
        """
        env = Env(names={}, payload=te.payload, subject=te.subject)
        payload: dict[str, Any] = {}
        for key, expr in self.payload.items():
            value = expr.evaluate(env)
            if value is not UNDEFINED:
                payload[key] = value
        return TriggeringEvent(self.category, self.subject, payload)


@dataclass(frozen=True)
class EventMappingEntry:
    """One mapping tuple: observed pattern, injected template, placement, guard."""

    observe: EventPattern
    inject: EventTemplate
    placement: Placement = Placement.NEW_INTENTION
    guard: Expr | None = None


@dataclass
class CoefficientModule:
    """A namespaced element container carrying an event mapping."""

    module_id: str
    beliefs: dict[str, BeliefValue] = field(default_factory=dict)
    plans: list[Plan] = field(default_factory=list)
    mapping: list[EventMappingEntry] = field(default_factory=list)
    exports: frozenset[str] = frozenset()

    @property
    def observed_patterns(self) -> list[EventPattern]:
        """The set of observed event patterns (the mapping's source side)."""
        return [entry.observe for entry in self.mapping]

    @property
    def injected_templates(self) -> list[EventTemplate]:
        """The set of injectable event templates (the mapping's target side)."""
        return [entry.inject for entry in self.mapping]


# -- namespacing -------------------------------------------------------------

_IDENT = re.compile(r"[^0-9A-Za-z_]")


def _belief_prefix(module_id: str) -> str:
    return _IDENT.sub("_", module_id) + "__"


class _Renamer(ast.NodeTransformer):
    def __init__(self, renames: dict[str, str]):
        self.renames = renames

    def visit_Name(self, node: ast.Name) -> ast.Name:
        if node.id in self.renames:
            return ast.copy_location(ast.Name(id=self.renames[node.id], ctx=node.ctx), node)
        return node


def _rename_expr(expr: Expr, renames: dict[str, str]) -> Expr:
    if not renames:
        return expr
    tree = ast.parse(expr.source, mode="eval")
    tree = _Renamer(renames).visit(tree)
    ast.fix_missing_locations(tree)
    return Expr(ast.unparse(tree))


def _rename_args(args: Mapping[str, Expr], renames: dict[str, str]) -> dict[str, Expr]:
    return {key: _rename_expr(expr, renames) for key, expr in args.items()}


def _namespace_plan(plan: Plan, plan_id: str, renames: dict[str, str]) -> Plan:
    body = []
    for step in plan.body:
        if isinstance(step, Act):
            body.append(Act(step.name, _rename_args(step.args, renames)))
        elif isinstance(step, Subgoal):
            body.append(Subgoal(step.goal, _rename_args(step.args, renames)))
        elif isinstance(step, Believe):
            key = renames.get(step.key, step.key)
            body.append(Believe(key, _rename_expr(step.value, renames)))
        elif isinstance(step, Unbelieve):
            body.append(Unbelieve(renames.get(step.key, step.key)))
        else:
            assert isinstance(step, Send)
            body.append(Send(step.to, _rename_args(step.payload, renames)))
    return Plan(
        plan_id=plan_id,
        trigger=plan.trigger,
        context=_rename_expr(plan.context, renames),
        body=tuple(body),
    )


# -- operations ---------------------------------------------------------------


def register_module(cfg: AgentConfiguration, mod: CoefficientModule) -> AgentConfiguration:
    """Merge a module into the host and activate its event mapping.

    Beliefs and plans are merged under the module namespace (export-listed
    names stay unprefixed); belief references inside the module's own plans
    are rewritten to the namespaced keys.  The module's mapping entries are
    appended to the host's active mapping in registration order.
    """
    if mod.module_id in cfg.modules:
        raise ModuleRegistrationError(f"module {mod.module_id!r} already registered")
    for entry in mod.mapping:
        if entry.inject.category not in INJECTABLE_CATEGORIES:  # pragma: no cover
            raise MappingError(f"entry injects illegal category {entry.inject.category}")

    prefix = _belief_prefix(mod.module_id)
    renames: dict[str, str] = {}
    for key in mod.beliefs:
        target = key if key in mod.exports else prefix + key
        if target in cfg.beliefs:
            raise ModuleRegistrationError(
                f"module {mod.module_id!r} belief {target!r} collides with the host"
            )
        renames[key] = target

    staged_plans = []
    for plan in mod.plans:
        plan_id = (
            plan.plan_id if plan.plan_id in mod.exports else f"{mod.module_id}.{plan.plan_id}"
        )
        if plan_id in cfg.plans:
            raise ModuleRegistrationError(
                f"module {mod.module_id!r} plan {plan_id!r} collides with the host"
            )
        staged_plans.append(_namespace_plan(plan, plan_id, renames))

    for key, value in mod.beliefs.items():
        cfg.beliefs.set(renames[key], value)  # registration-time merge, no events
    for plan in staged_plans:
        cfg.plans.add(plan)
    for entry in mod.mapping:
        cfg.mapping.append((mod.module_id, entry))
    cfg.modules[mod.module_id] = mod
    if cfg.select_event_override is None:
        cfg.select_event_override = select_event_coefficient
        cfg.observation_hooks.append(_observation_injection_hook)
    return cfg


def resolve_mapping(
    mapping: list[EventMappingEntry], te: TriggeringEvent
) -> tuple[TriggeringEvent, Placement, Expr | None] | None:
    """First-declared matching entry, with the template instantiated; None if unobserved."""
    for entry in mapping:
        if entry.observe.matches(te):
            return entry.inject.instantiate(te), entry.placement, entry.guard
    return None


def eval_guard(
    guard: Expr | None, te: TriggeringEvent, cfg: AgentConfiguration
) -> bool:
    """Evaluate an entry guard against host beliefs and the observed bindings."""
    if guard is None:
        return True
    env = Env(names=cfg.beliefs.as_dict(), payload=te.payload, subject=te.subject)
    return guard.as_condition(env)


def active_entries(cfg: AgentConfiguration) -> list[EventMappingEntry]:
    """The host's active mapping: module entries concatenated in registration order."""
    return [entry for _module_id, entry in cfg.mapping]


def select_event_coefficient(cfg: AgentConfiguration) -> AgentConfiguration:
    """Event selection extended with guarded injection.

    Behaves exactly like plain selection when the queue is empty or the
    selected event is not observed.  Otherwise the selected event still goes
    to the temporary structure for normal processing, and additionally, if
    the guard holds, the mapped event is appended to the queue: paired with
    the selected event's intention for current-intention placement, or with
    the empty intention for new-intention placement.
    """
    if cfg.step is not Step.SEL_EV:
        raise RuntimeError(f"select_event_coefficient requires SelEv, at {cfg.step.value}")
    events = cfg.circumstance.events
    if not events:
        cfg.step = Step.SEL_INT
        return cfg
    event = events.pop(0)
    cfg.temp.epsilon = event
    cfg.step = Step.REL_PL
    resolved = resolve_mapping(active_entries(cfg), event.te)
    if resolved is None:
        return cfg
    te_d, placement, guard = resolved
    if eval_guard(guard, event.te, cfg):
        cfg.append_event(te_d, _placement_target(cfg, placement, event.intention))
    return cfg


def _placement_target(
    cfg: AgentConfiguration, placement: Placement, intention: int | _Top
) -> int | _Top:
    if placement is Placement.NEW_INTENTION:
        return TOP
    if intention is TOP:
        # Degenerate current-intention case: the empty intention has no
        # stack to extend, so the injection starts a new course of action.
        return TOP
    return intention


def _observation_injection_hook(
    cfg: AgentConfiguration, te: TriggeringEvent, intention: int | _Top
) -> None:
    """Apply the mapping to plan lifecycle events from the observation stream."""
    resolved = resolve_mapping(active_entries(cfg), te)
    if resolved is None:
        return
    te_d, placement, guard = resolved
    if not eval_guard(guard, te, cfg):
        return
    target = _placement_target(cfg, placement, intention)
    if target is not TOP and target not in cfg.circumstance.intentions:
        target = TOP
    cfg.append_event(te_d, target)
