"""Replay scripts: one JSON action per line, plus the deterministic runner.

Line schema: {"op": "combine"|"split"|"apply_tool"|"detach"|"attach"|"submit",
"base": id?, "attachment": id?, "tool": [ids]?, "part": id?, "torque": int?}.
Blank lines are skipped. A replay is complete when it ends with submit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .catalog import Catalog, PartSpec, StepAction
from .engine import Action, fixing_requires_torque, suggest_torque
from .session import (
    LogicalClock,
    Mode,
    MonotonicClock,
    Outcome,
    ScoreCard,
    TaskSession,
    start_task,
)

REPLAY_OPS = ("combine", "split", "apply_tool", "detach", "attach", "submit")


class ReplayFormatError(ValueError):
    def __init__(self, line: int | None, message: str):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


def action_from_dict(obj: object, *, line: int | None = None) -> Action:
    if not isinstance(obj, dict):
        raise ReplayFormatError(line, "action must be a JSON object")
    op = obj.get("op")
    if op not in REPLAY_OPS:
        raise ReplayFormatError(line, f"op must be one of {'/'.join(REPLAY_OPS)}, got {op!r}")
    known = {"op", "base", "attachment", "tool", "part", "torque"}
    unknown = set(obj) - known
    if unknown:
        raise ReplayFormatError(line, f"unknown fields: {', '.join(sorted(unknown))}")

    def str_field(name: str) -> str | None:
        value = obj.get(name)
        if value is None:
            return None
        if not isinstance(value, str):
            raise ReplayFormatError(line, f"{name} must be a string")
        return value

    tool = obj.get("tool")
    if tool is not None:
        if (not isinstance(tool, list) or not tool
                or not all(isinstance(t, str) for t in tool)):
            raise ReplayFormatError(line, "tool must be a non-empty list of ids")
        tool = tuple(tool)
    torque = obj.get("torque")
    if torque is not None:
        if isinstance(torque, bool) or not isinstance(torque, int):
            raise ReplayFormatError(line, "torque must be an integer")
    return Action(
        op=op,
        base=str_field("base"),
        attachment=str_field("attachment"),
        tool=tool,
        part=str_field("part"),
        torque=torque,
    )


def parse_replay(text: str) -> list[Action]:
    actions: list[Action] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ReplayFormatError(line_no, f"invalid JSON: {exc.msg}") from exc
        actions.append(action_from_dict(obj, line=line_no))
    return actions


def serialize_replay(actions: list[Action]) -> str:
    return "".join(json.dumps(a.as_dict(), separators=(", ", ": ")) + "\n" for a in actions)


@dataclass
class ReplayResult:
    outcomes: list[Outcome]
    scorecard: ScoreCard | None
    session: TaskSession

    @property
    def submitted(self) -> bool:
        return self.scorecard is not None


def run_replay(catalog: Catalog, task_id: str, mode: Mode, actions: list[Action], *,
               clock: LogicalClock | MonotonicClock | None = None,
               deduction_per_error: int | None = None) -> ReplayResult:
    kwargs = {}
    if deduction_per_error is not None:
        kwargs["deduction_per_error"] = deduction_per_error
    session = start_task(catalog, task_id, mode, clock=clock, **kwargs)
    outcomes: list[Outcome] = []
    scorecard: ScoreCard | None = None
    for action in actions:
        if action.op == "submit":
            scorecard = session.submit()
            outcomes.append(Outcome(kind="submitted"))
        else:
            outcomes.append(session.handle_action(action))
    return ReplayResult(outcomes=outcomes, scorecard=scorecard, session=session)


# ---------------------------------------------------------------------------
# Golden sequence: a perfect run derived from the catalog and plan
# ---------------------------------------------------------------------------

def _tooling_for(spec: PartSpec, *, fixing: bool) -> tuple[str, list[str]]:
    """Base and attachment ids satisfying the part's condition."""
    cond = spec.wrench_condition
    assert cond is not None
    if fixing and not spec.auto_fix:
        base = cond.fix_wrench_id or cond.wrench_id
    else:
        base = cond.wrench_id
    attachments: list[str] = []
    if cond.need_extension and cond.extension_id:
        attachments.append(cond.extension_id)
    if cond.socket_id:
        attachments.append(cond.socket_id)
    return base, attachments


def golden_sequence(catalog: Catalog, task_id: str) -> list[Action]:
    """Actions that walk the plan in order with zero errors, then submit."""
    plan = catalog.plan(task_id)
    actions: list[Action] = []
    for step in plan.steps:
        spec = catalog.part(step.part_id)
        if step.action is StepAction.REMOVE:
            if spec.tool_dependent:
                base, attachments = _tooling_for(spec, fixing=False)
                for attachment in attachments:
                    actions.append(Action(op="combine", base=base, attachment=attachment))
                tool = (base, *attachments)
                actions.append(Action(op="apply_tool", tool=tool, part=spec.part_id))
                actions.append(Action(op="detach", part=spec.part_id))
                if attachments:
                    actions.append(Action(op="split", tool=tool))
            else:
                actions.append(Action(op="detach", part=spec.part_id))
        else:
            actions.append(Action(op="attach", part=spec.part_id))
            if spec.tool_dependent:
                base, attachments = _tooling_for(spec, fixing=True)
                for attachment in attachments:
                    actions.append(Action(op="combine", base=base, attachment=attachment))
                tool = (base, *attachments)
                torque = suggest_torque(catalog, spec) if fixing_requires_torque(catalog, spec) else None
                actions.append(Action(op="apply_tool", tool=tool, part=spec.part_id, torque=torque))
                if attachments:
                    actions.append(Action(op="split", tool=tool))
    actions.append(Action(op="submit"))
    return actions
