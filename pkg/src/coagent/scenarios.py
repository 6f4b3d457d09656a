"""Agent-based service management scenarios on a discrete-tick simulator.

Two coordination processes run over a population of server managers,
movable service endpoints, and demand brokers:

* server utilization management -- managers of underutilized servers publish
  available capacity on the ``capacity`` topic; services react by relocating
  toward the advertising server, filling it to its preferred level;
* demand balancing -- brokers publish significant request-rate changes on
  the ``demand-change`` topic; services react by switching their offered
  service type toward the demanded one, subject to a per-server uniqueness
  constraint.

The simulation loop is single-threaded and owns all agents and media.  Each
tick applies scheduled demand deltas, runs one full reasoning cycle per agent
in stable agent-id order, routes messages, ticks all media, delivers due
publications, and emits one trace record.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Iterable

from coagent.bdi.beliefs import BeliefBase
from coagent.bdi.config import ActionFault, AgentConfiguration
from coagent.bdi.events import EventCategory, TriggeringEvent, pattern
from coagent.bdi.expressions import Expr
from coagent.bdi.interpreter import post_external_event, run_cycle
from coagent.bdi.plans import Act, Plan, PlanLibrary
from coagent.coefficiency import EventTemplate, Placement
from coagent.coordination import (
    PUBLISH_ACTION,
    CoordinationEndpoint,
    CoordinationMedium,
    EndpointDeclaration,
    PublicationRule,
    ReactionRule,
    build_publication,
    compile_endpoint,
    endpoint_deliver,
    publish,
    tick_medium,
)

TOPIC_CAPACITY = "capacity"
TOPIC_DEMAND = "demand-change"

UTILIZATION_PROCESS = "utilization"
BALANCING_PROCESS = "balancing"

MOVE_GOAL = "move-to"
SWITCH_GOAL = "switch-to"


class ScenarioError(ValueError):
    """Scenario configuration violates a build invariant."""


@dataclass(frozen=True)
class ServerSpec:
    server_id: str
    capacity: int
    preferred_min: int


@dataclass(frozen=True)
class ServiceSpec:
    service_id: str
    service_type: str
    initial_server: str | None = None


@dataclass(frozen=True)
class DemandDelta:
    tick: int
    service_type: str
    delta: int


@dataclass
class ScenarioConfig:
    """Declarative simulation input; see the bundled scenario documents."""

    name: str = "scenario"
    seed: int = 0
    ticks: int = 100
    servers: list[ServerSpec] = field(default_factory=list)
    services: list[ServiceSpec] = field(default_factory=list)
    brokers: int = 0
    demand: dict[str, int] = field(default_factory=dict)
    demand_schedule: list[DemandDelta] = field(default_factory=list)
    media: dict[str, int] = field(default_factory=dict)  # topic -> latency
    significance_threshold: float = 0.5
    uniqueness_constraint: bool = False
    publish_when_empty: bool = False
    move_acceptance_probability: float | None = None
    #: Optional custom endpoint declarations (per role).  None selects the
    #: two canonical coordination processes.
    endpoints: list[EndpointDeclaration] | None = None

    def validate(self) -> None:
        if self.ticks < 0:
            raise ScenarioError("ticks must be >= 0")
        if self.brokers < 0:
            raise ScenarioError("brokers must be >= 0")
        if not (0 <= self.significance_threshold):
            raise ScenarioError("significance-threshold must be >= 0")
        if self.move_acceptance_probability is not None and not (
            0 <= self.move_acceptance_probability <= 1
        ):
            raise ScenarioError("move-acceptance-probability must be in [0, 1]")
        seen: set[str] = set()
        for server in self.servers:
            if server.server_id in seen:
                raise ScenarioError(f"duplicate server id {server.server_id!r}")
            seen.add(server.server_id)
            if server.capacity <= 0:
                raise ScenarioError(f"server {server.server_id!r}: capacity must be > 0")
            if not (0 < server.preferred_min <= server.capacity):
                raise ScenarioError(
                    f"server {server.server_id!r}: preferred-min must be in (0, capacity]"
                )
        server_ids = {server.server_id for server in self.servers}
        counts: dict[str, int] = {server_id: 0 for server_id in server_ids}
        typed: set[tuple[str, str]] = set()
        for service in self.services:
            if service.service_id in seen:
                raise ScenarioError(f"duplicate service id {service.service_id!r}")
            seen.add(service.service_id)
            target = service.initial_server
            if target is None:
                continue
            if target not in server_ids:
                raise ScenarioError(
                    f"service {service.service_id!r}: unknown initial-server {target!r}"
                )
            counts[target] += 1
            key = (target, service.service_type)
            if self.uniqueness_constraint and key in typed:
                raise ScenarioError(
                    f"service {service.service_id!r}: type {service.service_type!r} "
                    f"already deployed on {target!r} (uniqueness constraint)"
                )
            typed.add(key)
        for server in self.servers:
            if counts[server.server_id] > server.capacity:
                raise ScenarioError(
                    f"server {server.server_id!r}: initial deployments "
                    f"({counts[server.server_id]}) exceed capacity ({server.capacity})"
                )
        for entry in self.demand_schedule:
            if entry.tick < 0:
                raise ScenarioError("demand-schedule ticks must be >= 0")
        for topic, latency in self.media.items():
            if latency < 0:
                raise ScenarioError(f"medium {topic!r}: latency must be >= 0")

    @property
    def service_types(self) -> list[str]:
        types = {service.service_type for service in self.services}
        types.update(self.demand)
        types.update(entry.service_type for entry in self.demand_schedule)
        return sorted(types)


@dataclass
class TraceRecord:
    """Per-tick metrics: deployment map, loop variables, and activity counts."""

    tick: int
    deployments: dict[str, list[str]]
    underloaded: int
    publications: dict[str, int]
    moves: int
    switches: int
    rejected_moves: int
    rejected_switches: int
    demand: dict[str, int]

    def total_deployed(self) -> int:
        return sum(len(types) for types in self.deployments.values())

    def type_counts(self, types: Iterable[str]) -> dict[str, int]:
        counts = {service_type: 0 for service_type in types}
        for deployed in self.deployments.values():
            for service_type in deployed:
                if service_type in counts:
                    counts[service_type] += 1
        return counts


class SimulationState:
    """Everything the scheduler owns: agents, endpoints, media, and tables."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.tick = 0
        self.rng = random.Random(config.seed)
        self.agents: dict[str, AgentConfiguration] = {}
        self.endpoints: dict[str, CoordinationEndpoint] = {}
        self.media: dict[str, CoordinationMedium] = {}
        self.server_specs: dict[str, ServerSpec] = {}
        self.server_services: dict[str, list[str]] = {}
        self.service_server: dict[str, str] = {}
        self.service_type: dict[str, str] = {}
        self.demand: dict[str, int] = dict(config.demand)
        self.types: list[str] = config.service_types
        # Per-tick activity counters, reset by the scheduler.
        self.moves = 0
        self.switches = 0
        self.rejected_moves = 0
        self.rejected_switches = 0
        self.publications: dict[str, int] = {}
        # Running totals for the summary.
        self.total_moves = 0
        self.total_switches = 0
        self.total_rejected_moves = 0
        self.total_rejected_switches = 0
        self.trace: list[TraceRecord] = []

    @property
    def agent_order(self) -> list[str]:
        return sorted(self.agents)

    def deployed_count(self, server_id: str) -> int:
        return len(self.server_services[server_id])

    def underloaded_count(self) -> int:
        """Servers strictly between empty and their preferred utilization."""
        count = 0
        for server_id, spec in self.server_specs.items():
            deployed = self.deployed_count(server_id)
            if 0 < deployed < spec.preferred_min:
                count += 1
        return count

    def reset_tick_counters(self) -> None:
        self.moves = 0
        self.switches = 0
        self.rejected_moves = 0
        self.rejected_switches = 0
        self.publications = {topic: 0 for topic in sorted(self.media)}

    def snapshot_record(self) -> TraceRecord:
        deployments = {
            server_id: sorted(
                (self.service_type[service_id] for service_id in services),
            )
            for server_id, services in sorted(self.server_services.items())
        }
        return TraceRecord(
            tick=self.tick,
            deployments=deployments,
            underloaded=self.underloaded_count(),
            publications=dict(self.publications),
            moves=self.moves,
            switches=self.switches,
            rejected_moves=self.rejected_moves,
            rejected_switches=self.rejected_switches,
            demand=dict(sorted(self.demand.items())),
        )


class ScenarioEnvironment:
    """Environment adapter shared by all scenario agents.

    Implements the service-infrastructure actions: relocation and
    reallocation requests (validated against the involved servers' state,
    mirroring that deployment always negotiates with the affected managers)
    and the endpoint publish action.
    """

    def __init__(self, state: SimulationState):
        self.state = state

    def perform(self, cfg: AgentConfiguration, action: str, args: dict[str, Any]) -> None:
        if action == "relocate":
            self._relocate(cfg, args)
        elif action == "reallocate":
            self._reallocate(cfg, args)
        elif action == PUBLISH_ACTION:
            self._publish(cfg, args)
        else:
            raise ActionFault(f"unknown action {action!r}")

    def _accepts(self) -> bool:
        probability = self.state.config.move_acceptance_probability
        if probability is None:
            return True
        return self.state.rng.random() < probability

    def _relocate(self, cfg: AgentConfiguration, args: dict[str, Any]) -> None:
        state = self.state
        service_id = cfg.agent_id
        target = args.get("server")
        if target not in state.server_specs:
            state.rejected_moves += 1
            state.total_rejected_moves += 1
            return
        current = state.service_server[service_id]
        if target == current:
            # Stale offer for the server we already sit on: silently ignored,
            # mirroring the same-type no-op rule for switches.
            return
        spec = state.server_specs[target]
        if state.deployed_count(target) >= spec.preferred_min:
            # The advertised shortage is gone; the destination manager
            # declines the deployment.
            state.rejected_moves += 1
            state.total_rejected_moves += 1
            return
        source_spec = state.server_specs[current]
        remaining = state.deployed_count(current) - 1
        if 0 < remaining < source_spec.preferred_min:
            # Leaving would push the source below its preferred utilization;
            # the source manager declines the undeployment.
            state.rejected_moves += 1
            state.total_rejected_moves += 1
            return
        if not self._accepts():
            state.rejected_moves += 1
            state.total_rejected_moves += 1
            return
        move_service(state, service_id, target)

    def _reallocate(self, cfg: AgentConfiguration, args: dict[str, Any]) -> None:
        state = self.state
        new_type = args.get("type")
        if not isinstance(new_type, str) or not new_type:
            state.rejected_switches += 1
            state.total_rejected_switches += 1
            return
        if new_type != state.service_type[cfg.agent_id] and not self._accepts():
            state.rejected_switches += 1
            state.total_rejected_switches += 1
            return
        switch_type(state, cfg.agent_id, new_type)

    def _publish(self, cfg: AgentConfiguration, args: dict[str, Any]) -> None:
        state = self.state
        process_id = args["__process"]
        rule_index = args["__rule"]
        endpoint = state.endpoints[f"{cfg.agent_id}/{process_id}"]
        event_fields = {
            key: value for key, value in args.items() if not key.startswith("__")
        }
        info = build_publication(endpoint, cfg, rule_index, event_fields, state.tick)
        publish(state.media[info.topic], info, state.tick)
        state.publications[info.topic] = state.publications.get(info.topic, 0) + 1


# -- scenario operations ------------------------------------------------------


def move_service(state: SimulationState, service_id: str, to_server: str) -> bool:
    """Redeploy a service: bookkeeping plus paired belief updates.

    Returns True when the move was applied.  A full destination or a
    uniqueness violation rejects the move with no state change; the
    rejection is counted.
    """
    current = state.service_server[service_id]
    if to_server == current:
        raise ScenarioError(f"service {service_id!r} is already on {to_server!r}")
    if to_server not in state.server_specs:
        raise ScenarioError(f"unknown destination server {to_server!r}")
    spec = state.server_specs[to_server]
    if state.deployed_count(to_server) >= spec.capacity:
        state.rejected_moves += 1
        state.total_rejected_moves += 1
        return False
    service_type = state.service_type[service_id]
    if state.config.uniqueness_constraint:
        deployed_types = {
            state.service_type[other] for other in state.server_services[to_server]
        }
        if service_type in deployed_types:
            state.rejected_moves += 1
            state.total_rejected_moves += 1
            return False
    state.server_services[current].remove(service_id)
    state.server_services[to_server].append(service_id)
    state.service_server[service_id] = to_server
    state.moves += 1
    state.total_moves += 1
    # Un- and re-deployment surface as belief updates on every agent involved.
    state.agents[service_id].write_belief("current_server", to_server)
    state.agents[current].write_belief("deployed", state.deployed_count(current))
    state.agents[to_server].write_belief("deployed", state.deployed_count(to_server))
    return True


def switch_type(state: SimulationState, service_id: str, new_type: str) -> bool:
    """Change a service's offered type; same-type switches are silent no-ops."""
    current_type = state.service_type[service_id]
    if new_type == current_type:
        return True
    server_id = state.service_server[service_id]
    if state.config.uniqueness_constraint:
        deployed_types = {
            state.service_type[other]
            for other in state.server_services[server_id]
            if other != service_id
        }
        if new_type in deployed_types:
            state.rejected_switches += 1
            state.total_rejected_switches += 1
            return False
    state.service_type[service_id] = new_type
    if new_type not in state.types:
        state.types = sorted(set(state.types) | {new_type})
    state.switches += 1
    state.total_switches += 1
    state.agents[service_id].write_belief("type", new_type)
    return True


def apply_demand(state: SimulationState, tick: int) -> SimulationState:
    """Apply scheduled request-rate deltas; brokers mirror them as beliefs."""
    for entry in state.config.demand_schedule:
        if entry.tick != tick:
            continue
        old = state.demand.get(entry.service_type, 0)
        new = old + entry.delta
        state.demand[entry.service_type] = new
        for agent_id in state.agent_order:
            if agent_id.startswith("broker-"):
                state.agents[agent_id].write_belief(entry.service_type, new)
    return state


# -- scenario construction ----------------------------------------------------


def _server_agent(
    spec: ServerSpec, deployed: int, env: ScenarioEnvironment, publish_when_empty: bool
) -> tuple[AgentConfiguration, EndpointDeclaration]:
    beliefs = BeliefBase(
        {
            "server": spec.server_id,
            "capacity": spec.capacity,
            "preferred_min": spec.preferred_min,
            "deployed": deployed,
        }
    )
    cfg = AgentConfiguration(
        spec.server_id, beliefs=beliefs, plans=PlanLibrary(), environment=env
    )
    if publish_when_empty:
        guard = Expr("deployed < preferred_min")
    else:
        guard = Expr("deployed > 0 and deployed < preferred_min")
    decl = EndpointDeclaration(
        process_id=UTILIZATION_PROCESS,
        role="server",
        publications=(
            PublicationRule(
                observe=pattern(EventCategory.BELIEF_UPDATED, "deployed"),
                topic=TOPIC_CAPACITY,
                guard=guard,
                extract=("server", "deployed", "capacity"),
            ),
        ),
    )
    return cfg, decl


def _service_agent(
    spec: ServiceSpec, server_id: str, env: ScenarioEnvironment
) -> tuple[AgentConfiguration, list[EndpointDeclaration]]:
    beliefs = BeliefBase({"type": spec.service_type, "current_server": server_id})
    plans = PlanLibrary(
        [
            Plan(
                plan_id=MOVE_GOAL,
                trigger=pattern(EventCategory.GOAL_ADDED, MOVE_GOAL),
                body=(Act("relocate", {"server": Expr("payload.server")}),),
            ),
            Plan(
                plan_id=SWITCH_GOAL,
                trigger=pattern(EventCategory.GOAL_ADDED, SWITCH_GOAL),
                context=Expr("type != payload.type"),
                body=(Act("reallocate", {"type": Expr("payload.type")}),),
            ),
        ]
    )
    cfg = AgentConfiguration(
        spec.service_id,
        beliefs=beliefs,
        plans=plans,
        actions={"relocate", "reallocate"},
        environment=env,
    )
    move_decl = EndpointDeclaration(
        process_id=UTILIZATION_PROCESS,
        role="service",
        reactions=(
            ReactionRule(
                topic=TOPIC_CAPACITY,
                guard=Expr("payload.server != current_server"),
                inject=EventTemplate(
                    EventCategory.GOAL_ADDED,
                    MOVE_GOAL,
                    {"server": Expr("payload.server"), "deployed": Expr("payload.deployed")},
                ),
                placement=Placement.NEW_INTENTION,
            ),
        ),
    )
    switch_decl = EndpointDeclaration(
        process_id=BALANCING_PROCESS,
        role="service",
        reactions=(
            ReactionRule(
                topic=TOPIC_DEMAND,
                guard=Expr("payload.new > payload.old and payload.subject != type"),
                inject=EventTemplate(
                    EventCategory.GOAL_ADDED, SWITCH_GOAL, {"type": Expr("payload.subject")}
                ),
                placement=Placement.NEW_INTENTION,
            ),
        ),
    )
    return cfg, [move_decl, switch_decl]


def _broker_agent(
    broker_id: str, demand: dict[str, int], threshold: float, env: ScenarioEnvironment
) -> tuple[AgentConfiguration, EndpointDeclaration]:
    cfg = AgentConfiguration(
        broker_id, beliefs=BeliefBase(dict(demand)), plans=PlanLibrary(), environment=env
    )
    decl = EndpointDeclaration(
        process_id=BALANCING_PROCESS,
        role="broker",
        publications=(
            PublicationRule(
                observe=pattern(EventCategory.BELIEF_UPDATED),
                topic=TOPIC_DEMAND,
                guard=Expr(f"abs(payload.new - payload.old) / payload.old >= {threshold!r}"),
                extract_event={
                    "subject": Expr("subject"),
                    "old": Expr("payload.old"),
                    "new": Expr("payload.new"),
                },
            ),
        ),
    )
    return cfg, decl


def build_scenario(config: ScenarioConfig) -> SimulationState:
    """Construct agents, endpoints, and media for a validated configuration.

    Services without an explicit initial server are placed pseudo-randomly
    (seeded by the configuration seed) on servers with free, constraint-legal
    slots.  Each server manager receives one bootstrap utilization reading so
    publication guards are evaluated against the initial state.
    """
    config.validate()
    state = SimulationState(config)
    env = ScenarioEnvironment(state)

    for spec in config.servers:
        state.server_specs[spec.server_id] = spec
        state.server_services[spec.server_id] = []

    placement_rng = random.Random(config.seed)
    for service in config.services:
        target = service.initial_server
        if target is None:
            eligible = []
            for spec in config.servers:
                if len(state.server_services[spec.server_id]) >= spec.capacity:
                    continue
                if config.uniqueness_constraint:
                    deployed_types = {
                        state.service_type[other]
                        for other in state.server_services[spec.server_id]
                    }
                    if service.service_type in deployed_types:
                        continue
                eligible.append(spec.server_id)
            if not eligible:
                raise ScenarioError(
                    f"no legal placement for service {service.service_id!r}"
                )
            target = placement_rng.choice(eligible)
        state.server_services[target].append(service.service_id)
        state.service_server[service.service_id] = target
        state.service_type[service.service_id] = service.service_type

    for topic in sorted({TOPIC_CAPACITY, TOPIC_DEMAND} | set(config.media)):
        state.media[topic] = CoordinationMedium(
            topic=topic, latency=config.media.get(topic, 1)
        )

    declarations: dict[str, list[EndpointDeclaration]] = {}
    roles: dict[str, str] = {}
    for spec in config.servers:
        cfg, decl = _server_agent(
            spec, state.deployed_count(spec.server_id), env, config.publish_when_empty
        )
        state.agents[spec.server_id] = cfg
        declarations[spec.server_id] = [decl]
        roles[spec.server_id] = "server"
    for service in config.services:
        cfg, decls = _service_agent(
            service, state.service_server[service.service_id], env
        )
        state.agents[service.service_id] = cfg
        declarations[service.service_id] = decls
        roles[service.service_id] = "service"
    for index in range(config.brokers):
        broker_id = f"broker-{index + 1:02d}"
        if broker_id in state.agents:
            raise ScenarioError(f"broker id {broker_id!r} collides with a configured agent")
        cfg, decl = _broker_agent(
            broker_id, state.demand, config.significance_threshold, env
        )
        state.agents[broker_id] = cfg
        declarations[broker_id] = [decl]
        roles[broker_id] = "broker"

    if config.endpoints is not None:
        # The document declares the coordination layer itself: each
        # declaration is instantiated on every agent of its role.
        declarations = {
            agent_id: [decl for decl in config.endpoints if decl.role == roles[agent_id]]
            for agent_id in declarations
        }

    for agent_id in state.agent_order:
        for decl in declarations[agent_id]:
            endpoint = compile_endpoint(decl, state.agents[agent_id])
            state.endpoints[endpoint.endpoint_id] = endpoint
            for topic in sorted(endpoint.subscriptions):
                state.media[topic].subscribe(endpoint.endpoint_id, agent_id)

    # Bootstrap utilization readings: the architecture reports each server's
    # current deployment level once, as an external belief-update event.
    for spec in config.servers:
        deployed = state.deployed_count(spec.server_id)
        post_external_event(
            state.agents[spec.server_id],
            TriggeringEvent(
                EventCategory.BELIEF_UPDATED,
                "deployed",
                {"old": deployed, "new": deployed},
            ),
        )

    state.reset_tick_counters()
    return state


# -- simulation loop ----------------------------------------------------------


def _route_messages(state: SimulationState) -> None:
    for agent_id in state.agent_order:
        outbox = state.agents[agent_id].mail.outbox
        while outbox:
            message = outbox.popleft()
            receiver = state.agents.get(message.receiver)
            if receiver is not None:
                receiver.mail.inbox.append(message)


def _deliver_media(state: SimulationState) -> None:
    for topic in sorted(state.media):
        _, deliveries = tick_medium(state.media[topic], state.tick)
        if not deliveries:
            continue
        if topic == TOPIC_CAPACITY:
            # Per endpoint, offer the most attractive capacity first: the
            # publisher with the highest deployed count still below capacity,
            # ties broken by lowest server id.
            batches: dict[str, list] = {}
            for endpoint_id, info in deliveries:
                batches.setdefault(endpoint_id, []).append(info)
            for endpoint_id in sorted(batches):
                batch = sorted(
                    batches[endpoint_id],
                    key=lambda info: (
                        -info.payload.get("deployed", 0),
                        str(info.payload.get("server", "")),
                    ),
                )
                for info in batch:
                    _deliver_one(state, endpoint_id, info)
        else:
            for endpoint_id, info in deliveries:
                _deliver_one(state, endpoint_id, info)


def _deliver_one(state: SimulationState, endpoint_id: str, info) -> None:
    endpoint = state.endpoints[endpoint_id]
    endpoint_deliver(endpoint, info, state.agents[endpoint.host])


def run_simulation(
    state: SimulationState, ticks: int, seed: int | None = None
) -> list[TraceRecord]:
    """Run the scheduler for a number of ticks, returning the trace.

    Agent-level action faults are recorded on the failing agent's
    observation stream and never abort the run.
    """
    if ticks < 0:
        raise ScenarioError("ticks must be >= 0")
    if seed is not None:
        state.rng = random.Random(seed)
    for _ in range(ticks):
        state.reset_tick_counters()
        apply_demand(state, state.tick)
        for agent_id in state.agent_order:
            run_cycle(state.agents[agent_id])
        _route_messages(state)
        _deliver_media(state)
        state.trace.append(state.snapshot_record())
        state.tick += 1
    return state.trace


def quiescence_tick(trace: list[TraceRecord]) -> int | None:
    """First tick after which no moves or switches occur, if the trace shows one."""
    if not trace:
        return None
    last_active = None
    for record in trace:
        if record.moves or record.switches:
            last_active = record.tick
    if last_active is None:
        return 0
    if last_active == trace[-1].tick:
        return None
    return last_active + 1


# -- trace serialization --------------------------------------------------------


def trace_columns(state: SimulationState) -> list[str]:
    """Stable CSV column order; see the README for the column contract."""
    columns = ["tick"]
    columns += [f"server:{server_id}" for server_id in sorted(state.server_specs)]
    columns += [f"type:{service_type}" for service_type in state.types]
    columns += ["underloaded", "moves"]
    columns += [f"pub:{topic}" for topic in sorted(state.media)]
    columns += ["switches", "rejected-moves", "rejected-switches"]
    columns += [f"demand:{service_type}" for service_type in sorted(state.demand)]
    return columns


def trace_rows(state: SimulationState) -> list[list[Any]]:
    rows = []
    for record in state.trace:
        type_counts = record.type_counts(state.types)
        row: list[Any] = [record.tick]
        row += [len(record.deployments[server_id]) for server_id in sorted(state.server_specs)]
        row += [type_counts[service_type] for service_type in state.types]
        row += [record.underloaded, record.moves]
        row += [record.publications.get(topic, 0) for topic in sorted(state.media)]
        row += [record.switches, record.rejected_moves, record.rejected_switches]
        row += [record.demand.get(service_type, 0) for service_type in sorted(state.demand)]
        rows.append(row)
    return rows


def summary(state: SimulationState) -> dict[str, Any]:
    """Run summary: quiescence tick, activity totals, final deployment map."""
    final_deployments = {
        server_id: sorted(
            state.service_type[service_id] for service_id in services
        )
        for server_id, services in sorted(state.server_services.items())
    }
    return {
        "scenario": state.config.name,
        "seed": state.config.seed,
        "ticks": len(state.trace),
        "quiescence-tick": quiescence_tick(state.trace),
        "total-moves": state.total_moves,
        "total-switches": state.total_switches,
        "total-rejected-moves": state.total_rejected_moves,
        "total-rejected-switches": state.total_rejected_switches,
        "final-deployments": final_deployments,
        "final-demand": dict(sorted(state.demand.items())),
        "underloaded": state.underloaded_count(),
    }
