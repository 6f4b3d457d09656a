"""Invariant checkers shared by the unit tests and the acceptance suite."""

from __future__ import annotations

import random

from coagent.bdi.config import AgentConfiguration, Step
from coagent.bdi.events import TOP
from coagent.bdi.interpreter import reasoning_step
from coagent.bdi.reference import reference_step
from coagent.scenarios import ScenarioConfig, SimulationState, TraceRecord

from tests.conftest import instantiate, random_program


def run_traced(cfg: AgentConfiguration, steps: int, stepper=reasoning_step) -> list[str]:
    """Step an agent, collecting a canonical snapshot after every transition."""
    trace = [cfg.snapshot_json()]
    for _ in range(steps):
        stepper(cfg)
        trace.append(cfg.snapshot_json())
    return trace


def check_structural_invariants(cfg: AgentConfiguration) -> None:
    """Configuration-level invariants that must hold after every step."""
    seqs = [event.seq for event in cfg.circumstance.events]
    assert seqs == sorted(seqs), "event sequence numbers out of order"
    assert len(seqs) == len(set(seqs)), "duplicate sequence numbers"
    for event in cfg.circumstance.events:
        if event.intention is not TOP:
            assert event.intention in cfg.circumstance.intentions, (
                "event references a missing intention"
            )
    for intention in cfg.circumstance.intentions.values():
        assert intention.stack, "empty intention left in the circumstance"
        for record in intention.stack:
            body = cfg.plans.get(record.plan_id).body
            assert 0 <= record.pc <= len(body), "program counter out of range"
    if cfg.step is Step.SEL_APPL:
        assert set(cfg.temp.applicable) <= set(cfg.temp.relevant), "Ap not within R"


def equivalence_run(seed: int, cycles: int = 20) -> None:
    """One randomized main-vs-reference comparison; raises on divergence."""
    rng = random.Random(seed)
    program = random_program(rng)
    main = instantiate(*program)
    ref = instantiate(*program)
    for step_index in range(cycles * 9):
        reasoning_step(main)
        reference_step(ref)
        check_structural_invariants(main)
        if main.snapshot_json() != ref.snapshot_json():
            raise AssertionError(
                f"seed {seed}: divergence after step {step_index}\n"
                f"main: {main.snapshot_json()}\nref : {ref.snapshot_json()}"
            )


def check_trace_safety(trace: list[TraceRecord], config: ScenarioConfig) -> None:
    """Conservation, capacity safety, and uniqueness safety at every tick."""
    capacities = {server.server_id: server.capacity for server in config.servers}
    total_services = len(config.services)
    for record in trace:
        deployed = sum(len(types) for types in record.deployments.values())
        assert deployed == total_services, f"tick {record.tick}: conservation violated"
        for server_id, types in record.deployments.items():
            assert len(types) <= capacities[server_id], (
                f"tick {record.tick}: capacity exceeded on {server_id}"
            )
            if config.uniqueness_constraint:
                assert len(set(types)) == len(types), (
                    f"tick {record.tick}: duplicate type on {server_id}"
                )


def first_capacity_delivery_tick(state: SimulationState) -> int | None:
    """The first tick at which a capacity publication can have been delivered."""
    latency = state.media["capacity"].latency
    for record in state.trace:
        if record.publications.get("capacity", 0) > 0:
            return record.tick + latency
    return None
