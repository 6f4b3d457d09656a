"""Walk one agent through its reasoning cycle, step by step.

The agent believes `stock = 2`, owns a restock plan for the `restock` goal,
and a reaction plan for stock changes.  We post one external goal and then
watch the interpreter work: which event gets selected, which plans are
relevant and applicable, how the intention stack grows and shrinks.

Run: python3 demos/01_reasoning_cycle.py
"""

from coagent.bdi.beliefs import BeliefBase
from coagent.bdi.config import AgentConfiguration
from coagent.bdi.events import EventCategory, TriggeringEvent, pattern
from coagent.bdi.expressions import Expr
from coagent.bdi.interpreter import post_external_event, reasoning_step
from coagent.bdi.plans import Act, Believe, Plan, PlanLibrary, Subgoal

plans = PlanLibrary(
    [
        Plan(
            plan_id="restock",
            trigger=pattern("goal-added", "restock"),
            context=Expr("stock < 5"),
            body=(
                Believe("stock", Expr("stock + payload.amount")),
                Subgoal("log", {"level": Expr("stock")}),
                Act("notify", {}),
            ),
        ),
        Plan(
            plan_id="log",
            trigger=pattern("goal-added", "log"),
            body=(Believe("last_logged", Expr("payload.level")),),
        ),
    ]
)

agent = AgentConfiguration(
    "warehouse",
    beliefs=BeliefBase({"stock": 2}),
    plans=plans,
    actions={"notify"},
)

post_external_event(
    agent, TriggeringEvent(EventCategory.GOAL_ADDED, "restock", {"amount": 3})
)

print(f"initial beliefs: {agent.beliefs.as_dict()}")
print(f"pending events:  {[e.te.subject for e in agent.circumstance.events]}")
print()

for step_number in range(1, 28):
    before = agent.step.value
    reasoning_step(agent)
    temp = agent.temp
    facts = []
    if temp.epsilon is not None:
        facts.append(f"selected={temp.epsilon.te.category.value}({temp.epsilon.te.subject})")
    if temp.relevant:
        facts.append(f"relevant={temp.relevant}")
    if temp.applicable:
        facts.append(f"applicable={temp.applicable}")
    if temp.rho:
        facts.append(f"chosen={temp.rho}")
    if temp.iota is not None:
        facts.append(f"running=i{temp.iota}")
    stacks = {
        iid: [record.plan_id for record in intention.stack]
        for iid, intention in agent.circumstance.intentions.items()
    }
    print(f"{step_number:>3}. {before:>8} -> {agent.step.value:<8} {' '.join(facts)}")
    if stacks:
        print(f"     intentions: {stacks}")

print()
print(f"final beliefs: {agent.beliefs.as_dict()}")
print("observation stream:")
for record in agent.observations:
    print(f"  {record}")
