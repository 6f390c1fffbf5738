"""Task engine: drives one training session through a task plan.

A session owns a world, a message bus, a cursor into the plan's step list,
an error log, and the running score. Every engine action is allowed at any
time; the plan only defines the canonical order. An action that completes
a pending step other than the cursor step still completes it, but logs a
SEQUENCE_ERROR and takes the standard deduction.

Scoring: 100 points split evenly across steps (floor division, remainder
on the last step); each rejected or out-of-order action deducts a fixed
amount; the final score is clamped to [0, 100].

Timestamps come from an injected clock so replays are bit-identical.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

from .bus import MessageBus
from .catalog import Catalog, StepAction, TaskPlan
from .engine import (
    Action,
    EngineError,
    Phase,
    StateChangeEvent,
    WorldState,
    execute_action,
    fixing_requires_torque,
    initial_world,
    suggest_torque,
)

DEFAULT_DEDUCTION = 2


class Mode(enum.Enum):
    LEARNING = "LEARNING"
    TRAINING = "TRAINING"
    EXAM = "EXAM"

    @property
    def guidance_on(self) -> bool:
        return self is Mode.LEARNING

    @property
    def live_score_visible(self) -> bool:
        return self is Mode.TRAINING


class LogicalClock:
    """Counts milliseconds one tick per reading; deterministic for replay."""

    def __init__(self) -> None:
        self._now = 0

    def now_ms(self) -> float:
        value = self._now
        self._now += 1
        return float(value)


class MonotonicClock:
    def now_ms(self) -> float:
        return time.monotonic() * 1000.0


class TaskError(Exception):
    def __init__(self, code: str, detail: str):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}")


@dataclass(frozen=True)
class ErrorEntry:
    timestamp_ms: float
    kind: str
    detail: str

    def as_dict(self) -> dict:
        return {"timestamp_ms": self.timestamp_ms, "kind": self.kind, "detail": self.detail}


@dataclass(frozen=True)
class Outcome:
    kind: str  # accepted | rejected | step_completed | task_finished
    step_index: int | None = None
    error: dict | None = None

    def as_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.step_index is not None:
            out["step_index"] = self.step_index
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass(frozen=True)
class GroupProgress:
    group_name: str
    done: int
    total: int


@dataclass(frozen=True)
class ProgressReport:
    steps_total: int
    steps_done: int
    percent: float
    per_group: tuple[GroupProgress, ...]
    current_score: int | None  # None while the mode hides the live score

    def as_dict(self) -> dict:
        return {
            "steps_total": self.steps_total,
            "steps_done": self.steps_done,
            "percent": self.percent,
            "per_group": [
                {"group_name": g.group_name, "done": g.done, "total": g.total}
                for g in self.per_group
            ],
            "current_score": self.current_score,
        }


@dataclass(frozen=True)
class Hint:
    step_name: str
    part_id: str
    action: str
    required_tool: tuple[str, ...] | None
    torque: int | None

    def as_dict(self) -> dict:
        return {
            "step_name": self.step_name,
            "part_id": self.part_id,
            "action": self.action,
            "required_tool": list(self.required_tool) if self.required_tool else None,
            "torque": self.torque,
        }


@dataclass(frozen=True)
class ScoreCard:
    final_score: int
    steps_done: int
    errors: dict[str, int]
    duration_s: float

    def as_dict(self) -> dict:
        return {
            "final_score": self.final_score,
            "steps_done": self.steps_done,
            "errors": dict(self.errors),
            "duration_s": self.duration_s,
        }


def step_points(steps_total: int) -> list[int]:
    """Even 100-point split; the remainder lands on the final step."""
    base = 100 // steps_total
    points = [base] * steps_total
    points[-1] += 100 - base * steps_total
    return points


@dataclass
class TaskSession:
    catalog: Catalog
    plan: TaskPlan
    mode: Mode
    clock: LogicalClock | MonotonicClock
    deduction_per_error: int = DEFAULT_DEDUCTION
    bus: MessageBus = field(default_factory=MessageBus)

    def __post_init__(self) -> None:
        self.world: WorldState = initial_world(self.catalog, self.plan)
        steps = self.plan.steps
        self.completed: list[bool] = [False] * len(steps)
        self.points = step_points(len(steps))
        self.cursor: int = 0
        self.error_log: list[ErrorEntry] = []
        self.deductions: int = 0
        self.submitted: bool = False
        self.scorecard: ScoreCard | None = None
        self.event_log: list[StateChangeEvent] = []
        self.started_at_ms: float = self.clock.now_ms()

    # -- scoring ----------------------------------------------------------

    @property
    def earned(self) -> int:
        return sum(p for p, done in zip(self.points, self.completed) if done)

    @property
    def score(self) -> int:
        return max(0, min(100, self.earned - self.deductions))

    # -- step bookkeeping ---------------------------------------------------

    def _record_error(self, kind: str, detail: str) -> None:
        self.error_log.append(ErrorEntry(self.clock.now_ms(), kind, detail))
        self.deductions += self.deduction_per_error

    def _fulfilled_step(self, events: list[StateChangeEvent]) -> int | None:
        """A step completes when its part makes the step's key transition:
        leaving INSTALLED for REMOVE steps, reaching INSTALLED for INSTALL."""
        steps = self.plan.steps
        for event in events:
            for i, step in enumerate(steps):
                if self.completed[i] or step.part_id != event.part_id:
                    continue
                if step.action is StepAction.REMOVE and event.from_phase is Phase.INSTALLED:
                    return i
                if step.action is StepAction.INSTALL and event.to_phase is Phase.INSTALLED:
                    return i
        return None

    def handle_action(self, action: Action) -> Outcome:
        if self.submitted:
            raise TaskError("SESSION_ALREADY_SUBMITTED", "session is already submitted")
        try:
            world, events = execute_action(self.world, action, bus=self.bus)
        except EngineError as exc:
            self._record_error(exc.code, exc.detail)
            return Outcome(kind="rejected", error=exc.as_dict())

        self.world = world
        self.event_log.extend(events)
        step_index = self._fulfilled_step(events)
        if step_index is None:
            return Outcome(kind="accepted")

        if step_index != self.cursor:
            self._record_error(
                "SEQUENCE_ERROR",
                f"completed step {step_index} while step {self.cursor} was expected",
            )
        self.completed[step_index] = True
        self.cursor = next(
            (i for i, done in enumerate(self.completed) if not done),
            len(self.completed),
        )
        if all(self.completed):
            return Outcome(kind="task_finished", step_index=step_index)
        return Outcome(kind="step_completed", step_index=step_index)

    # -- reporting ----------------------------------------------------------

    def progress(self) -> ProgressReport:
        steps_total = len(self.plan.steps)
        steps_done = sum(self.completed)
        per_group = []
        offset = 0
        for group in self.plan.groups:
            size = len(group.steps)
            done = sum(self.completed[offset:offset + size])
            per_group.append(GroupProgress(group.group_name, done, size))
            offset += size
        return ProgressReport(
            steps_total=steps_total,
            steps_done=steps_done,
            percent=100.0 * steps_done / steps_total,
            per_group=tuple(per_group),
            current_score=self.score if self.mode.live_score_visible else None,
        )

    def next_hint(self) -> Hint | None:
        if not self.mode.guidance_on or self.submitted:
            return None
        if self.cursor >= len(self.plan.steps):
            return None
        step = self.plan.steps[self.cursor]
        spec = self.catalog.part(step.part_id)
        tool: tuple[str, ...] | None = None
        torque: int | None = None
        if spec.tool_dependent:
            cond = spec.wrench_condition
            assert cond is not None
            if step.action is StepAction.REMOVE or spec.auto_fix:
                base = cond.wrench_id
            else:
                base = cond.fix_wrench_id or cond.wrench_id
            ids = [base]
            if cond.need_extension and cond.extension_id:
                ids.append(cond.extension_id)
            if cond.socket_id:
                ids.append(cond.socket_id)
            tool = tuple(ids)
            if step.action is StepAction.INSTALL and fixing_requires_torque(self.catalog, spec):
                torque = suggest_torque(self.catalog, spec)
        return Hint(
            step_name=step.step_name,
            part_id=step.part_id,
            action=step.action.value,
            required_tool=tool,
            torque=torque,
        )

    def submit(self) -> ScoreCard:
        if self.submitted:
            raise TaskError("SESSION_ALREADY_SUBMITTED", "session is already submitted")
        errors: dict[str, int] = {}
        for entry in self.error_log:
            errors[entry.kind] = errors.get(entry.kind, 0) + 1
        card = ScoreCard(
            final_score=self.score,
            steps_done=sum(self.completed),
            errors=errors,
            duration_s=(self.clock.now_ms() - self.started_at_ms) / 1000.0,
        )
        self.submitted = True
        self.world = initial_world(self.catalog, self.plan)
        self.scorecard = card
        return card


def start_task(catalog: Catalog, task_id: str, mode: Mode, *,
               clock: LogicalClock | MonotonicClock | None = None,
               deduction_per_error: int = DEFAULT_DEDUCTION) -> TaskSession:
    if not catalog.has_plan(task_id):
        raise TaskError("NOT_FOUND", f"unknown task {task_id!r}")
    return TaskSession(
        catalog=catalog,
        plan=catalog.plan(task_id),
        mode=mode,
        clock=clock if clock is not None else LogicalClock(),
        deduction_per_error=deduction_per_error,
    )
