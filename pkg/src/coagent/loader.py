"""Loading and validation of declarative documents.

Two document kinds are supported, both JSON:

* agent programs -- beliefs, action set, plans, optional co-efficient
  modules, and external events to post (used by the oracle runner and
  tests);
* scenario configurations -- servers, services, brokers, demand schedule,
  media latencies, and an optional endpoint-declaration section.

Every guard, context, and value expression is parsed and checked at load
time; expression errors never surface at run time.  All validation failures
raise ``ConfigError`` carrying a path-qualified message.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from coagent.bdi.beliefs import BeliefBase
from coagent.bdi.config import AgentConfiguration, EnvironmentAdapter
from coagent.bdi.events import (
    EventCategory,
    EventPattern,
    TriggeringEvent,
)
from coagent.bdi.expressions import Expr, ExpressionSyntaxError, TRUE
from coagent.bdi.plans import Act, Believe, BodyStep, Plan, PlanLibrary, Send, Subgoal, Unbelieve
from coagent.coefficiency import (
    CoefficientModule,
    EventMappingEntry,
    EventTemplate,
    MappingError,
    Placement,
    register_module,
)
from coagent.coordination import EndpointDeclaration, PublicationRule, ReactionRule
from coagent.scenarios import DemandDelta, ScenarioConfig, ServerSpec, ServiceSpec


class ConfigError(ValueError):
    """A document failed to parse or validate; the message names the path."""


def _fail(path: str, message: str) -> "ConfigError":
    return ConfigError(f"{path}: {message}")


def _require(obj: Any, path: str, kind: type, what: str) -> Any:
    if not isinstance(obj, kind):
        raise _fail(path, f"{what} must be {kind.__name__}, got {type(obj).__name__}")
    return obj


def _check_keys(obj: Mapping[str, Any], path: str, allowed: set[str], required: set[str]) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise _fail(path, f"unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}")
    missing = required - set(obj)
    if missing:
        raise _fail(path, f"missing required keys {sorted(missing)}")


def _parse_expr(source: Any, path: str) -> Expr:
    _require(source, path, str, "expression")
    try:
        return Expr(source)
    except ExpressionSyntaxError as exc:
        raise _fail(path, str(exc)) from None


def _parse_optional_expr(obj: Mapping[str, Any], key: str, path: str) -> Expr | None:
    if key not in obj or obj[key] is None:
        return None
    return _parse_expr(obj[key], f"{path}.{key}")


def _parse_category(value: Any, path: str) -> EventCategory:
    try:
        return EventCategory(value)
    except ValueError:
        raise _fail(
            path,
            f"unknown event category {value!r}; one of {[c.value for c in EventCategory]}",
        ) from None


def parse_pattern(obj: Any, path: str) -> EventPattern:
    """Parse an event pattern: category (single or list), subject, payload."""
    _require(obj, path, dict, "event pattern")
    _check_keys(obj, path, {"category", "subject", "payload"}, set())
    categories = None
    if obj.get("category") is not None:
        raw = obj["category"]
        if isinstance(raw, list):
            categories = tuple(_parse_category(c, f"{path}.category") for c in raw)
        else:
            categories = (_parse_category(raw, f"{path}.category"),)
    subject = obj.get("subject")
    if subject is not None:
        _require(subject, f"{path}.subject", str, "subject")
    payload = obj.get("payload") or {}
    _require(payload, f"{path}.payload", dict, "payload pattern")
    return EventPattern(categories=categories, subject=subject, payload=dict(payload))


def parse_template(obj: Any, path: str) -> EventTemplate:
    """Parse an injectable event template with payload expressions."""
    _require(obj, path, dict, "event template")
    _check_keys(obj, path, {"category", "subject", "payload"}, {"category", "subject"})
    category = _parse_category(obj["category"], f"{path}.category")
    subject = _require(obj["subject"], f"{path}.subject", str, "subject")
    payload = {}
    for key, source in (obj.get("payload") or {}).items():
        payload[key] = _parse_expr(source, f"{path}.payload.{key}")
    try:
        return EventTemplate(category, subject, payload)
    except MappingError as exc:
        raise _fail(path, str(exc)) from None


def _parse_placement(value: Any, path: str) -> Placement:
    try:
        return Placement(value)
    except ValueError:
        raise _fail(
            path, f"placement must be one of {[p.value for p in Placement]}, got {value!r}"
        ) from None


def _parse_args(obj: Any, path: str) -> dict[str, Expr]:
    args = {}
    for key, source in (_require(obj, path, dict, "args") if obj else {}).items():
        args[key] = _parse_expr(source, f"{path}.{key}")
    return args


def parse_body_step(obj: Any, path: str) -> BodyStep:
    _require(obj, path, dict, "body step")
    kind = obj.get("do")
    if kind == "act":
        _check_keys(obj, path, {"do", "name", "args"}, {"name"})
        return Act(_require(obj["name"], f"{path}.name", str, "action name"), _parse_args(obj.get("args"), f"{path}.args"))
    if kind == "subgoal":
        _check_keys(obj, path, {"do", "goal", "args"}, {"goal"})
        return Subgoal(_require(obj["goal"], f"{path}.goal", str, "goal name"), _parse_args(obj.get("args"), f"{path}.args"))
    if kind == "believe":
        _check_keys(obj, path, {"do", "key", "value"}, {"key", "value"})
        return Believe(
            _require(obj["key"], f"{path}.key", str, "belief key"),
            _parse_expr(obj["value"], f"{path}.value"),
        )
    if kind == "unbelieve":
        _check_keys(obj, path, {"do", "key"}, {"key"})
        return Unbelieve(_require(obj["key"], f"{path}.key", str, "belief key"))
    if kind == "send":
        _check_keys(obj, path, {"do", "to", "payload"}, {"to"})
        return Send(
            _require(obj["to"], f"{path}.to", str, "receiver"),
            _parse_args(obj.get("payload"), f"{path}.payload"),
        )
    raise _fail(path, f"body step 'do' must be one of act/subgoal/believe/unbelieve/send, got {kind!r}")


def parse_plan(obj: Any, path: str) -> Plan:
    _require(obj, path, dict, "plan")
    _check_keys(obj, path, {"id", "trigger", "context", "body"}, {"id", "trigger", "body"})
    plan_id = _require(obj["id"], f"{path}.id", str, "plan id")
    trigger = parse_pattern(obj["trigger"], f"{path}.trigger")
    context = _parse_optional_expr(obj, "context", path) or TRUE
    body_obj = _require(obj["body"], f"{path}.body", list, "plan body")
    if not body_obj:
        raise _fail(f"{path}.body", "plan body must be non-empty")
    body = tuple(
        parse_body_step(step, f"{path}.body[{index}]") for index, step in enumerate(body_obj)
    )
    return Plan(plan_id=plan_id, trigger=trigger, context=context, body=body)


def parse_mapping_entry(obj: Any, path: str) -> EventMappingEntry:
    _require(obj, path, dict, "mapping entry")
    _check_keys(obj, path, {"observe", "inject", "placement", "guard"}, {"observe", "inject"})
    return EventMappingEntry(
        observe=parse_pattern(obj["observe"], f"{path}.observe"),
        inject=parse_template(obj["inject"], f"{path}.inject"),
        placement=_parse_placement(obj.get("placement", "new-intention"), f"{path}.placement"),
        guard=_parse_optional_expr(obj, "guard", path),
    )


def parse_module(obj: Any, path: str) -> CoefficientModule:
    _require(obj, path, dict, "module")
    _check_keys(obj, path, {"id", "beliefs", "plans", "mapping", "exports"}, {"id"})
    module_id = _require(obj["id"], f"{path}.id", str, "module id")
    beliefs = dict(_require(obj.get("beliefs") or {}, f"{path}.beliefs", dict, "beliefs"))
    plans = [
        parse_plan(plan, f"{path}.plans[{index}]")
        for index, plan in enumerate(obj.get("plans") or [])
    ]
    mapping = [
        parse_mapping_entry(entry, f"{path}.mapping[{index}]")
        for index, entry in enumerate(obj.get("mapping") or [])
    ]
    exports = frozenset(_require(obj.get("exports") or [], f"{path}.exports", list, "exports"))
    return CoefficientModule(
        module_id=module_id, beliefs=beliefs, plans=plans, mapping=mapping, exports=exports
    )


# -- agent programs -----------------------------------------------------------


@dataclass
class AgentProgram:
    """A loaded agent program plus the external events to post at start."""

    name: str
    beliefs: dict[str, Any]
    actions: set[str]
    plans: list[Plan]
    modules: list[CoefficientModule] = field(default_factory=list)
    events: list[TriggeringEvent] = field(default_factory=list)


def parse_agent_program(doc: Any, path: str = "agent-program") -> AgentProgram:
    _require(doc, path, dict, "agent program")
    _check_keys(
        doc,
        path,
        {"name", "beliefs", "actions", "plans", "modules", "events"},
        set(),
    )
    beliefs = dict(_require(doc.get("beliefs") or {}, f"{path}.beliefs", dict, "beliefs"))
    for key, value in beliefs.items():
        if not isinstance(value, (int, float, bool, str)):
            raise _fail(
                f"{path}.beliefs.{key}",
                f"belief values must be int/float/bool/str, got {type(value).__name__}",
            )
    actions = set(_require(doc.get("actions") or [], f"{path}.actions", list, "actions"))
    plans = [
        parse_plan(plan, f"{path}.plans[{index}]")
        for index, plan in enumerate(doc.get("plans") or [])
    ]
    seen = set()
    for plan in plans:
        if plan.plan_id in seen:
            raise _fail(f"{path}.plans", f"duplicate plan id {plan.plan_id!r}")
        seen.add(plan.plan_id)
    for plan in plans:
        for index, step in enumerate(plan.body):
            if isinstance(step, Act) and step.name not in actions:
                raise _fail(
                    f"{path}.plans[{plan.plan_id}].body[{index}]",
                    f"action {step.name!r} is not in the declared action set",
                )
    modules = [
        parse_module(module, f"{path}.modules[{index}]")
        for index, module in enumerate(doc.get("modules") or [])
    ]
    events = []
    for index, event in enumerate(doc.get("events") or []):
        event_path = f"{path}.events[{index}]"
        _require(event, event_path, dict, "event")
        _check_keys(event, event_path, {"category", "subject", "payload"}, {"category", "subject"})
        events.append(
            TriggeringEvent(
                _parse_category(event["category"], f"{event_path}.category"),
                _require(event["subject"], f"{event_path}.subject", str, "subject"),
                dict(event.get("payload") or {}),
            )
        )
    return AgentProgram(
        name=str(doc.get("name") or "agent"),
        beliefs=beliefs,
        actions=actions,
        plans=plans,
        modules=modules,
        events=events,
    )


def build_agent(
    program: AgentProgram,
    agent_id: str | None = None,
    environment: EnvironmentAdapter | None = None,
) -> AgentConfiguration:
    """Instantiate a loaded program, registering its modules."""
    cfg = AgentConfiguration(
        agent_id or program.name,
        beliefs=BeliefBase(dict(program.beliefs)),
        plans=PlanLibrary(list(program.plans)),
        actions=set(program.actions),
        environment=environment,
    )
    for module in program.modules:
        register_module(cfg, module)
    return cfg


def load_agent_program(path: str | Path) -> AgentProgram:
    return parse_agent_program(_read_json(path), str(path))


# -- scenario documents ---------------------------------------------------------


def parse_publication_rule(obj: Any, path: str) -> PublicationRule:
    _require(obj, path, dict, "publication rule")
    _check_keys(
        obj, path, {"observe", "topic", "guard", "extract", "extract-event"}, {"observe", "topic"}
    )
    extract = tuple(
        _require(obj.get("extract") or [], f"{path}.extract", list, "extract")
    )
    extract_event = {
        key: _parse_expr(source, f"{path}.extract-event.{key}")
        for key, source in (obj.get("extract-event") or {}).items()
    }
    return PublicationRule(
        observe=parse_pattern(obj["observe"], f"{path}.observe"),
        topic=_require(obj["topic"], f"{path}.topic", str, "topic"),
        guard=_parse_optional_expr(obj, "guard", path),
        extract=extract,
        extract_event=extract_event,
    )


def parse_reaction_rule(obj: Any, path: str) -> ReactionRule:
    _require(obj, path, dict, "reaction rule")
    _check_keys(obj, path, {"match", "guard", "inject", "placement"}, {"match", "inject"})
    match = _require(obj["match"], f"{path}.match", dict, "match")
    _check_keys(match, f"{path}.match", {"topic", "payload"}, {"topic"})
    return ReactionRule(
        topic=_require(match["topic"], f"{path}.match.topic", str, "topic"),
        match_payload=dict(match.get("payload") or {}),
        guard=_parse_optional_expr(obj, "guard", path),
        inject=parse_template(obj["inject"], f"{path}.inject"),
        placement=_parse_placement(obj.get("placement", "new-intention"), f"{path}.placement"),
    )


def parse_endpoint_declaration(obj: Any, path: str) -> EndpointDeclaration:
    _require(obj, path, dict, "endpoint declaration")
    _check_keys(
        obj,
        path,
        {"process-id", "role", "publication-rules", "reaction-rules", "topics"},
        {"process-id", "role"},
    )
    publications = tuple(
        parse_publication_rule(rule, f"{path}.publication-rules[{index}]")
        for index, rule in enumerate(obj.get("publication-rules") or [])
    )
    reactions = tuple(
        parse_reaction_rule(rule, f"{path}.reaction-rules[{index}]")
        for index, rule in enumerate(obj.get("reaction-rules") or [])
    )
    role = _require(obj["role"], f"{path}.role", str, "role")
    if role not in {"server", "service", "broker"}:
        raise _fail(f"{path}.role", f"role must be server/service/broker, got {role!r}")
    return EndpointDeclaration(
        process_id=_require(obj["process-id"], f"{path}.process-id", str, "process id"),
        role=role,
        publications=publications,
        reactions=reactions,
        topics=tuple(obj.get("topics") or ()),
    )


_SCENARIO_KEYS = {
    "name",
    "seed",
    "ticks",
    "significance-threshold",
    "uniqueness-constraint",
    "publish-when-empty",
    "move-acceptance-probability",
    "servers",
    "services",
    "brokers",
    "demand",
    "demand-schedule",
    "media",
    "endpoints",
}


def parse_scenario(doc: Any, path: str = "scenario") -> ScenarioConfig:
    _require(doc, path, dict, "scenario document")
    _check_keys(doc, path, _SCENARIO_KEYS, {"servers", "services"})

    servers = []
    for index, obj in enumerate(_require(doc["servers"], f"{path}.servers", list, "servers")):
        server_path = f"{path}.servers[{index}]"
        _require(obj, server_path, dict, "server")
        _check_keys(obj, server_path, {"id", "capacity", "preferred-min"}, {"id", "capacity", "preferred-min"})
        servers.append(
            ServerSpec(
                server_id=_require(obj["id"], f"{server_path}.id", str, "server id"),
                capacity=_require(obj["capacity"], f"{server_path}.capacity", int, "capacity"),
                preferred_min=_require(
                    obj["preferred-min"], f"{server_path}.preferred-min", int, "preferred-min"
                ),
            )
        )

    services = []
    for index, obj in enumerate(_require(doc["services"], f"{path}.services", list, "services")):
        service_path = f"{path}.services[{index}]"
        _require(obj, service_path, dict, "service")
        _check_keys(obj, service_path, {"id", "type", "initial-server"}, {"id", "type"})
        initial = obj.get("initial-server")
        if initial is not None:
            _require(initial, f"{service_path}.initial-server", str, "initial-server")
        services.append(
            ServiceSpec(
                service_id=_require(obj["id"], f"{service_path}.id", str, "service id"),
                service_type=_require(obj["type"], f"{service_path}.type", str, "type"),
                initial_server=initial,
            )
        )

    schedule = []
    for index, obj in enumerate(doc.get("demand-schedule") or []):
        entry_path = f"{path}.demand-schedule[{index}]"
        _require(obj, entry_path, dict, "demand delta")
        _check_keys(obj, entry_path, {"tick", "type", "delta"}, {"tick", "type", "delta"})
        schedule.append(
            DemandDelta(
                tick=_require(obj["tick"], f"{entry_path}.tick", int, "tick"),
                service_type=_require(obj["type"], f"{entry_path}.type", str, "type"),
                delta=_require(obj["delta"], f"{entry_path}.delta", int, "delta"),
            )
        )

    media = {}
    for topic, latency in (doc.get("media") or {}).items():
        media[topic] = _require(latency, f"{path}.media.{topic}", int, "latency")

    demand = {}
    for service_type, rate in (doc.get("demand") or {}).items():
        demand[service_type] = _require(rate, f"{path}.demand.{service_type}", int, "rate")

    endpoints = None
    if doc.get("endpoints") is not None:
        endpoints = [
            parse_endpoint_declaration(obj, f"{path}.endpoints[{index}]")
            for index, obj in enumerate(_require(doc["endpoints"], f"{path}.endpoints", list, "endpoints"))
        ]

    probability = doc.get("move-acceptance-probability")
    if probability is not None and not isinstance(probability, (int, float)):
        raise _fail(f"{path}.move-acceptance-probability", "must be a number or null")

    config = ScenarioConfig(
        name=str(doc.get("name") or "scenario"),
        seed=_require(doc.get("seed", 0), f"{path}.seed", int, "seed"),
        ticks=_require(doc.get("ticks", 100), f"{path}.ticks", int, "ticks"),
        servers=servers,
        services=services,
        brokers=_require(doc.get("brokers", 0), f"{path}.brokers", int, "brokers"),
        demand=demand,
        demand_schedule=schedule,
        media=media,
        significance_threshold=float(doc.get("significance-threshold", 0.5)),
        uniqueness_constraint=bool(doc.get("uniqueness-constraint", False)),
        publish_when_empty=bool(doc.get("publish-when-empty", False)),
        move_acceptance_probability=(
            float(probability) if probability is not None else None
        ),
        endpoints=endpoints,
    )
    try:
        config.validate()
    except Exception as exc:
        raise _fail(path, str(exc)) from None
    return config


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Load, parse, and fully validate a scenario document."""
    return parse_scenario(_read_json(path), str(path))


def _read_json(path: str | Path) -> Any:
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"{path}: file not found")
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read file: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
