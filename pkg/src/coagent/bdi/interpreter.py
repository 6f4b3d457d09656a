"""The nine-step reasoning cycle as small-step transition functions.

Each function consumes and returns an ``AgentConfiguration``, rewriting it in
place.  ``reasoning_step`` dispatches on the current step; ``run_cycle``
drives one full wrap back to message processing.

Selection functions are fixed deterministically: events are selected in FIFO
posting order, the applicable plan with the lowest declaration index wins,
and intentions are scheduled round-robin over intention ids with a persisted
cursor.  Events whose relevant or applicable plan set is empty are discarded,
never re-queued; a discarded achievement-goal event fails the plan record
waiting on it.  An unknown action, a failed expression, or a failed subgoal
fails the enclosing plan and emits a goal-failed event; there is no retry.
"""

from __future__ import annotations

from dataclasses import replace

from coagent.bdi.config import (
    ActionFault,
    AgentConfiguration,
    ConfigurationCorruption,
    Message,
    Step,
)
from coagent.bdi.events import TOP, Event, EventCategory, TriggeringEvent
from coagent.bdi.expressions import Env, ExpressionEvalError
from coagent.bdi.plans import Act, Believe, Intention, PlanRecord, Send, Subgoal, Unbelieve


def post_external_event(cfg: AgentConfiguration, te: TriggeringEvent) -> AgentConfiguration:
    """Append an externally produced event, paired with the empty intention."""
    cfg.append_event(te, TOP)
    return cfg


def process_messages(cfg: AgentConfiguration) -> AgentConfiguration:
    """ProcMsg: convert the inbox to message-received events in FIFO order."""
    _expect(cfg, Step.PROC_MSG)
    while cfg.mail.inbox:
        message = cfg.mail.inbox.popleft()
        te = TriggeringEvent(
            EventCategory.MESSAGE_RECEIVED, message.sender, dict(message.payload)
        )
        cfg.append_event(te, TOP)
    cfg.step = Step.SEL_EV
    return cfg


def select_event(cfg: AgentConfiguration) -> AgentConfiguration:
    """SelEv: pick the oldest pending event, or skip to intention selection."""
    _expect(cfg, Step.SEL_EV)
    events = cfg.circumstance.events
    if not events:
        cfg.step = Step.SEL_INT
        return cfg
    cfg.temp.epsilon = events.pop(0)
    cfg.step = Step.REL_PL
    return cfg


def compute_relevant_plans(cfg: AgentConfiguration) -> AgentConfiguration:
    """RelPl: collect plans whose trigger matches the selected event."""
    _expect(cfg, Step.REL_PL)
    epsilon = cfg.temp.epsilon
    if epsilon is None:
        raise ConfigurationCorruption("RelPl reached without a selected event")
    relevant = [
        plan.plan_id for plan in cfg.plans.in_order() if plan.trigger.matches(epsilon.te)
    ]
    cfg.temp.relevant = relevant
    if relevant:
        cfg.step = Step.APPL_PL
        return cfg
    _discard_selected_event(cfg, reason="no-relevant-plan")
    cfg.step = Step.SEL_INT
    return cfg


def compute_applicable_plans(cfg: AgentConfiguration) -> AgentConfiguration:
    """ApplPl: filter relevant plans by their context condition."""
    _expect(cfg, Step.APPL_PL)
    epsilon = cfg.temp.epsilon
    if epsilon is None:
        raise ConfigurationCorruption("ApplPl reached without a selected event")
    env = _event_env(cfg, epsilon.te)
    applicable = [
        plan_id
        for plan_id in cfg.temp.relevant
        if cfg.plans.get(plan_id).context.as_condition(env)
    ]
    cfg.temp.applicable = applicable
    if applicable:
        cfg.step = Step.SEL_APPL
        return cfg
    _discard_selected_event(cfg, reason="no-applicable-plan")
    cfg.step = Step.SEL_INT
    return cfg


def select_applicable(cfg: AgentConfiguration) -> AgentConfiguration:
    """SelAppl: commit to the applicable plan declared earliest in the library."""
    _expect(cfg, Step.SEL_APPL)
    if not cfg.temp.applicable:
        raise ConfigurationCorruption("SelAppl reached with no applicable plans")
    # temp.applicable preserves declaration order, so the head has the
    # lowest declaration index.
    cfg.temp.rho = cfg.temp.applicable[0]
    cfg.step = Step.ADD_IM
    return cfg


def add_intended_means(cfg: AgentConfiguration) -> AgentConfiguration:
    """AddIm: push the chosen plan onto its intention, creating one if external."""
    _expect(cfg, Step.ADD_IM)
    epsilon, rho = cfg.temp.epsilon, cfg.temp.rho
    if epsilon is None or rho is None:
        raise ConfigurationCorruption("AddIm reached without event and plan")
    if epsilon.intention is TOP:
        intention = cfg.new_intention()
    else:
        intention = cfg.circumstance.intentions.get(epsilon.intention)  # type: ignore[arg-type]
        if intention is None:
            raise ConfigurationCorruption(
                f"event references missing intention {epsilon.intention!r}"
            )
    record = PlanRecord(
        plan_id=rho, trigger_te=epsilon.te, bindings=dict(epsilon.te.payload)
    )
    intention.stack.append(record)
    started = TriggeringEvent(EventCategory.PLAN_STARTED, rho, {})
    cfg.observe("plan-started", te=started, intention=intention.intention_id, notify=True)
    _clear_temp(cfg)
    cfg.step = Step.SEL_INT
    return cfg


def select_intention(cfg: AgentConfiguration) -> AgentConfiguration:
    """SelInt: round-robin over runnable intentions; wrap the cycle if none."""
    _expect(cfg, Step.SEL_INT)
    runnable = [
        iid
        for iid in sorted(cfg.circumstance.intentions)
        if cfg.circumstance.intentions[iid].is_runnable(cfg.plans)
    ]
    if not runnable:
        cfg.temp.iota = None
        cfg.step = Step.PROC_MSG
        return cfg
    cursor = cfg.last_intention_run
    chosen = next((iid for iid in runnable if cursor is None or iid > cursor), runnable[0])
    cfg.temp.iota = chosen
    cfg.last_intention_run = chosen
    cfg.step = Step.EXEC_INT
    return cfg


def execute_intention(cfg: AgentConfiguration) -> AgentConfiguration:
    """ExecInt: run exactly one body step of the selected intention's top plan."""
    _expect(cfg, Step.EXEC_INT)
    iota = cfg.temp.iota
    if iota is None:
        raise ConfigurationCorruption("ExecInt reached without a selected intention")
    intention = cfg.circumstance.intentions.get(iota)
    if intention is None:
        raise ConfigurationCorruption(f"selected intention {iota!r} is missing")
    if not intention.is_runnable(cfg.plans):
        raise ConfigurationCorruption(f"selected intention {iota!r} is not runnable")
    record = intention.top
    plan = cfg.plans.get(record.plan_id)
    step = plan.body[record.pc]
    env = Env(
        names=cfg.beliefs.as_dict(),
        payload=record.bindings,
        subject=record.trigger_te.subject,
    )
    try:
        if isinstance(step, Act):
            if step.name not in cfg.circumstance.actions:
                raise ActionFault(f"unknown action {step.name!r}")
            args = {key: expr.as_value(env) for key, expr in step.args.items()}
            cfg.environment.perform(cfg, step.name, args)
            record.pc += 1
        elif isinstance(step, Subgoal):
            args = {key: expr.as_value(env) for key, expr in step.args.items()}
            te = TriggeringEvent(EventCategory.GOAL_ADDED, step.goal, args)
            cfg.append_event(te, intention.intention_id)
            record.waiting_on = step.goal
            record.pc += 1
        elif isinstance(step, Believe):
            value = step.value.as_value(env)
            te = cfg.beliefs.set(step.key, value)
            if te is not None:
                cfg.append_event(te, intention.intention_id)
            record.pc += 1
        elif isinstance(step, Unbelieve):
            te = cfg.beliefs.remove(step.key)
            if te is not None:
                cfg.append_event(te, intention.intention_id)
            record.pc += 1
        elif isinstance(step, Send):
            payload = {key: expr.as_value(env) for key, expr in step.payload.items()}
            cfg.mail.outbox.append(Message(cfg.agent_id, step.to, payload))
            record.pc += 1
        else:  # pragma: no cover - exhaustive over BodyStep
            raise ConfigurationCorruption(f"unknown body step {step!r}")
    except (ActionFault, ExpressionEvalError) as fault:
        cfg.observe(
            "plan-failed",
            intention=intention.intention_id,
            plan=record.plan_id,
            fault=str(fault),
        )
        _fail_top_record(cfg, intention)
    cfg.step = Step.CLR_INT
    return cfg


def clear_intention(cfg: AgentConfiguration) -> AgentConfiguration:
    """ClrInt: pop finished records, emit goal outcomes, drop empty intentions."""
    _expect(cfg, Step.CLR_INT)
    for iid in sorted(cfg.circumstance.intentions):
        intention = cfg.circumstance.intentions.get(iid)
        if intention is None:
            continue
        _pop_finished(cfg, intention)
    cfg.temp.iota = None
    cfg.step = Step.PROC_MSG
    return cfg


_DISPATCH = {
    Step.PROC_MSG: process_messages,
    Step.SEL_EV: select_event,
    Step.REL_PL: compute_relevant_plans,
    Step.APPL_PL: compute_applicable_plans,
    Step.SEL_APPL: select_applicable,
    Step.ADD_IM: add_intended_means,
    Step.SEL_INT: select_intention,
    Step.EXEC_INT: execute_intention,
    Step.CLR_INT: clear_intention,
}


def reasoning_step(cfg: AgentConfiguration) -> AgentConfiguration:
    """Apply exactly one transition, honoring a registered event-selection override."""
    if cfg.step is Step.SEL_EV and cfg.select_event_override is not None:
        return cfg.select_event_override(cfg)
    return _DISPATCH[cfg.step](cfg)


def run_cycle(cfg: AgentConfiguration) -> AgentConfiguration:
    """Run one full reasoning cycle: step until the cycle wraps to ProcMsg."""
    if cfg.step is not Step.PROC_MSG:
        raise ValueError("run_cycle must start at ProcMsg")
    for _ in range(len(Step)):
        reasoning_step(cfg)
        if cfg.step is Step.PROC_MSG:
            return cfg
    raise ConfigurationCorruption("reasoning cycle failed to wrap within nine steps")


# -- shared internals --------------------------------------------------------


def _expect(cfg: AgentConfiguration, step: Step) -> None:
    if cfg.step is not step:
        raise ConfigurationCorruption(f"expected step {step.value}, at {cfg.step.value}")


def _event_env(cfg: AgentConfiguration, te: TriggeringEvent) -> Env:
    return Env(names=cfg.beliefs.as_dict(), payload=te.payload, subject=te.subject)


def _clear_temp(cfg: AgentConfiguration) -> None:
    cfg.temp.epsilon = None
    cfg.temp.rho = None
    cfg.temp.relevant = []
    cfg.temp.applicable = []


def _discard_selected_event(cfg: AgentConfiguration, reason: str) -> None:
    """Drop the selected event; a dropped pending subgoal fails its waiter."""
    epsilon = cfg.temp.epsilon
    assert epsilon is not None
    cfg.observe("event-discarded", te=epsilon.te, intention=epsilon.intention, reason=reason)
    if epsilon.te.category is EventCategory.GOAL_ADDED and epsilon.intention is not TOP:
        intention = cfg.circumstance.intentions.get(epsilon.intention)  # type: ignore[arg-type]
        if (
            intention is not None
            and intention.stack
            and intention.top.waiting_on == epsilon.te.subject
        ):
            cfg.append_event(
                TriggeringEvent(
                    EventCategory.GOAL_FAILED, epsilon.te.subject, dict(epsilon.te.payload)
                ),
                intention.intention_id,
            )
            intention.top.waiting_on = None
            _fail_top_record(cfg, intention)
    _clear_temp(cfg)


def _fail_top_record(cfg: AgentConfiguration, intention: Intention) -> None:
    """Pop the failing top record; cascade through parents waiting on it."""
    while intention.stack:
        record = intention.stack.pop()
        failed_goal = (
            record.trigger_te
            if record.trigger_te.category is EventCategory.GOAL_ADDED
            else None
        )
        if intention.stack:
            if failed_goal is None:
                break
            cfg.append_event(
                TriggeringEvent(
                    EventCategory.GOAL_FAILED, failed_goal.subject, dict(failed_goal.payload)
                ),
                intention.intention_id,
            )
            below = intention.top
            if below.waiting_on == failed_goal.subject:
                below.waiting_on = None
                continue
            break
        if failed_goal is not None:
            cfg.append_event(
                TriggeringEvent(
                    EventCategory.GOAL_FAILED, failed_goal.subject, dict(failed_goal.payload)
                ),
                TOP,
            )
        _remove_intention(cfg, intention.intention_id)
        break


def _pop_finished(cfg: AgentConfiguration, intention: Intention) -> None:
    while intention.stack:
        top = intention.top
        if top.waiting_on is not None:
            break
        if top.pc < len(cfg.plans.get(top.plan_id).body):
            break
        intention.stack.pop()
        finished = TriggeringEvent(EventCategory.PLAN_FINISHED, top.plan_id, {})
        cfg.observe(
            "plan-finished", te=finished, intention=intention.intention_id, notify=True
        )
        if top.trigger_te.category is EventCategory.GOAL_ADDED:
            succeeded = TriggeringEvent(
                EventCategory.GOAL_SUCCEEDED,
                top.trigger_te.subject,
                dict(top.trigger_te.payload),
            )
            if intention.stack:
                cfg.append_event(succeeded, intention.intention_id)
                below = intention.top
                if below.waiting_on == top.trigger_te.subject:
                    below.waiting_on = None
            else:
                cfg.append_event(succeeded, TOP)
    if not intention.stack:
        _remove_intention(cfg, intention.intention_id)


def _remove_intention(cfg: AgentConfiguration, intention_id: int) -> None:
    """Drop an intention; its still-queued events re-pair with TOP."""
    cfg.circumstance.intentions.pop(intention_id, None)
    events = cfg.circumstance.events
    for index, event in enumerate(events):
        if event.intention == intention_id:
            events[index] = replace(event, intention=TOP)
