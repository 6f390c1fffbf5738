"""Assembly engine: tool combination and the per-part phase state machine.

All operations take a WorldState and return a fresh one (value semantics);
a rejected operation raises EngineError and leaves the input untouched.
Phase transitions produce StateChangeEvents which are returned to the
caller and, when a bus is supplied, also published on "part.state_changed".

Tool-dependent parts travel INSTALLED -> LOOSENED -> REMOVED and back;
hand-operable parts skip LOOSENED entirely. Loosening and fixing are each
one logical operation: screw_progress_cm jumps between 0 and the part's
screw-out target rather than advancing per turn.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .bus import MessageBus
from .catalog import Catalog, PartSpec, TaskPlan, StepAction, ToolKind, WrenchUseCondition

STATE_CHANGED_TOPIC = "part.state_changed"

WRENCH_KINDS = (ToolKind.WRENCH, ToolKind.TORQUE_WRENCH)


class Phase(enum.Enum):
    INSTALLED = "INSTALLED"
    LOOSENED = "LOOSENED"
    REMOVED = "REMOVED"


@dataclass(frozen=True)
class PartState:
    part_id: str
    phase: Phase
    screw_progress_cm: float = 0.0


@dataclass(frozen=True)
class CombinedTool:
    base: str
    extension: str | None = None
    socket: str | None = None

    @property
    def tool_ids(self) -> tuple[str, ...]:
        out = [self.base]
        if self.extension is not None:
            out.append(self.extension)
        if self.socket is not None:
            out.append(self.socket)
        return tuple(out)

    @property
    def is_bare(self) -> bool:
        return self.extension is None and self.socket is None


@dataclass(frozen=True)
class DisappearEffect:
    direction: tuple[float, float, float]
    dist_cm: float
    duration_s: float

    def as_dict(self) -> dict:
        return {
            "direction": list(self.direction),
            "dist_cm": self.dist_cm,
            "duration_s": self.duration_s,
        }


@dataclass(frozen=True)
class StateChangeEvent:
    part_id: str
    from_phase: Phase
    to_phase: Phase
    disappear: DisappearEffect | None = None

    def as_payload(self) -> dict:
        return {
            "part_id": self.part_id,
            "from_phase": self.from_phase.value,
            "to_phase": self.to_phase.value,
            "disappear": self.disappear.as_dict() if self.disappear else None,
        }


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str


class EngineError(Exception):
    """A rejected operation; the world it was applied to is unchanged."""

    def __init__(self, code: str, detail: str, *,
                 blocking: tuple[str, ...] = (),
                 violations: tuple[Violation, ...] = ()):
        self.code = code
        self.detail = detail
        self.blocking = blocking
        self.violations = violations
        super().__init__(f"{code}: {detail}")

    def as_dict(self) -> dict:
        out: dict = {"code": self.code, "detail": self.detail}
        if self.blocking:
            out["blocking"] = list(self.blocking)
        if self.violations:
            out["violations"] = [
                {"code": v.code, "detail": v.detail} for v in self.violations
            ]
        return out


@dataclass(frozen=True)
class WorldState:
    parts: dict[str, PartState]
    toolbox: frozenset[str]
    assemblies: tuple[CombinedTool, ...]
    catalog: Catalog = field(compare=False, repr=False)

    def part_state(self, part_id: str) -> PartState:
        return self.parts[part_id]


@dataclass(frozen=True)
class Action:
    """One executable engine action in replay form."""

    op: str
    base: str | None = None
    attachment: str | None = None
    tool: tuple[str, ...] | None = None
    part: str | None = None
    torque: int | None = None

    def as_dict(self) -> dict:
        out: dict = {"op": self.op}
        if self.base is not None:
            out["base"] = self.base
        if self.attachment is not None:
            out["attachment"] = self.attachment
        if self.tool is not None:
            out["tool"] = list(self.tool)
        if self.part is not None:
            out["part"] = self.part
        if self.torque is not None:
            out["torque"] = self.torque
        return out


def initial_world(catalog: Catalog, plan: TaskPlan | None = None) -> WorldState:
    """Starting configuration: a part begins REMOVED iff the plan installs it first."""
    starts_removed: set[str] = set()
    if plan is not None:
        first_action: dict[str, StepAction] = {}
        for step in plan.steps:
            first_action.setdefault(step.part_id, step.action)
        starts_removed = {
            pid for pid, action in first_action.items()
            if action is StepAction.INSTALL and catalog.has_part(pid)
        }
    parts = {}
    for spec in catalog.parts:
        if spec.part_id in starts_removed:
            progress = spec.screw_out_target_cm() if spec.tool_dependent else 0.0
            parts[spec.part_id] = PartState(spec.part_id, Phase.REMOVED, progress)
        else:
            parts[spec.part_id] = PartState(spec.part_id, Phase.INSTALLED, 0.0)
    return WorldState(
        parts=parts,
        toolbox=frozenset(t.tool_id for t in catalog.tools),
        assemblies=(),
        catalog=catalog,
    )


# ---------------------------------------------------------------------------
# Tool combination
# ---------------------------------------------------------------------------

def combine(world: WorldState, base: str, attachment: str) -> tuple[WorldState, CombinedTool]:
    catalog = world.catalog
    if not catalog.has_tool(base):
        raise EngineError("NOT_FOUND", f"unknown tool {base!r}")
    if not catalog.has_tool(attachment):
        raise EngineError("NOT_FOUND", f"unknown tool {attachment!r}")
    base_spec = catalog.tool(base)
    attach_spec = catalog.tool(attachment)
    if attachment not in base_spec.kit:
        raise EngineError(
            "INCOMPATIBLE_KIT",
            f"{attachment!r} is not in the kit of {base!r}",
        )
    if attach_spec.kind not in (ToolKind.EXTENSION, ToolKind.SOCKET):
        raise EngineError(
            "INCOMPATIBLE_KIT",
            f"only extensions and sockets attach; {attachment!r} is {attach_spec.kind.value}",
        )
    if attachment not in world.toolbox:
        raise EngineError("NOT_FOUND", f"tool {attachment!r} is not in the toolbox")

    existing_index: int | None = None
    if base in world.toolbox:
        current = CombinedTool(base=base)
    else:
        for i, assembly in enumerate(world.assemblies):
            if assembly.base == base:
                existing_index = i
                current = assembly
                break
        else:
            raise EngineError("NOT_FOUND", f"tool {base!r} is not available as a base")

    if attach_spec.kind is ToolKind.EXTENSION:
        if current.extension is not None:
            raise EngineError("SLOT_OCCUPIED", f"{base!r} already carries an extension")
        combined = replace(current, extension=attachment)
    else:
        if current.socket is not None:
            raise EngineError("SLOT_OCCUPIED", f"{base!r} already carries a socket")
        combined = replace(current, socket=attachment)

    toolbox = world.toolbox - {base, attachment}
    if existing_index is None:
        assemblies = world.assemblies + (combined,)
    else:
        assemblies = tuple(
            combined if i == existing_index else a
            for i, a in enumerate(world.assemblies)
        )
    return replace(world, toolbox=toolbox, assemblies=assemblies), combined


def split(world: WorldState, assembly: CombinedTool) -> WorldState:
    if assembly not in world.assemblies:
        raise EngineError("NOT_FOUND", f"no such assembly: {'+'.join(assembly.tool_ids)}")
    assemblies = tuple(a for a in world.assemblies if a != assembly)
    return replace(
        world,
        toolbox=world.toolbox | set(assembly.tool_ids),
        assemblies=assemblies,
    )


def resolve_tool(world: WorldState, tool_ids: list[str] | tuple[str, ...]) -> CombinedTool:
    """Map a list of constituent tool ids onto an available CombinedTool.

    A single wrench id resolves to a bare tool straight from the toolbox;
    anything larger must match an existing assembly exactly.
    """
    if not tool_ids:
        raise EngineError("NOT_FOUND", "empty tool list")
    wanted = frozenset(tool_ids)
    if len(wanted) != len(tool_ids):
        raise EngineError("NOT_FOUND", f"duplicate ids in tool list: {sorted(tool_ids)}")
    for assembly in world.assemblies:
        if frozenset(assembly.tool_ids) == wanted:
            return assembly
    if len(tool_ids) == 1:
        tool_id = next(iter(tool_ids))
        if not world.catalog.has_tool(tool_id):
            raise EngineError("NOT_FOUND", f"unknown tool {tool_id!r}")
        if world.catalog.tool(tool_id).kind not in WRENCH_KINDS:
            raise EngineError("NOT_FOUND", f"{tool_id!r} cannot be used alone")
        if tool_id not in world.toolbox:
            raise EngineError("NOT_FOUND", f"tool {tool_id!r} is not in the toolbox")
        return CombinedTool(base=tool_id)
    raise EngineError("NOT_FOUND", f"no assembled tool matches {sorted(wanted)}")


def _tool_available(world: WorldState, assembly: CombinedTool) -> bool:
    if assembly in world.assemblies:
        return True
    return assembly.is_bare and assembly.base in world.toolbox


# ---------------------------------------------------------------------------
# Wrench condition checking
# ---------------------------------------------------------------------------

def check_wrench_condition(cond: WrenchUseCondition, assembly: CombinedTool,
                           torque: int | None = None, *,
                           fixing: bool = False,
                           require_torque: bool = False) -> list[Violation]:
    """Every violated clause of the condition; an empty list is a pass."""
    violations: list[Violation] = []
    expected_base = cond.wrench_id
    if fixing and cond.fix_wrench_id is not None:
        expected_base = cond.fix_wrench_id
    if assembly.base != expected_base:
        violations.append(Violation(
            "WRENCH_MISMATCH",
            f"requires wrench {expected_base!r}, got {assembly.base!r}",
        ))
    if cond.socket_id is not None and assembly.socket != cond.socket_id:
        violations.append(Violation(
            "SOCKET_MISMATCH",
            f"requires socket {cond.socket_id!r}, got {assembly.socket!r}",
        ))
    if cond.need_extension:
        if assembly.extension is None:
            violations.append(Violation(
                "MISSING_EXTENSION",
                f"requires extension {cond.extension_id!r}",
            ))
        elif cond.extension_id is not None and assembly.extension != cond.extension_id:
            violations.append(Violation(
                "EXTENSION_MISMATCH",
                f"requires extension {cond.extension_id!r}, got {assembly.extension!r}",
            ))
    elif assembly.extension is not None:
        violations.append(Violation(
            "UNEXPECTED_EXTENSION",
            f"no extension expected, got {assembly.extension!r}",
        ))
    if torque is None:
        if require_torque:
            violations.append(Violation(
                "TORQUE_REQUIRED",
                f"fixing requires torque in [{cond.min_torque}, {cond.max_torque}] N.m",
            ))
    elif not cond.min_torque <= torque <= cond.max_torque:
        violations.append(Violation(
            "TORQUE_OUT_OF_RANGE",
            f"torque {torque} outside [{cond.min_torque}, {cond.max_torque}] N.m",
        ))
    return violations


def fixing_requires_torque(catalog: Catalog, spec: PartSpec) -> bool:
    """Torque matters only when the fixing base is a torque wrench."""
    cond = spec.wrench_condition
    if cond is None or spec.auto_fix:
        return False
    base_id = cond.fix_wrench_id or cond.wrench_id
    return catalog.has_tool(base_id) and catalog.tool(base_id).kind is ToolKind.TORQUE_WRENCH


# ---------------------------------------------------------------------------
# Part operations
# ---------------------------------------------------------------------------

def _require_part(world: WorldState, part_id: str) -> tuple[PartSpec, PartState]:
    if not world.catalog.has_part(part_id):
        raise EngineError("NOT_FOUND", f"unknown part {part_id!r}")
    return world.catalog.part(part_id), world.parts[part_id]


def _blocking_preconditions(world: WorldState, spec: PartSpec) -> tuple[str, ...]:
    return tuple(
        pre for pre in spec.preconditions
        if world.catalog.has_part(pre) and world.parts[pre].phase is not Phase.REMOVED
    )


def _blocking_dependents(world: WorldState, part_id: str) -> tuple[str, ...]:
    return tuple(
        dep for dep in world.catalog.dependents(part_id)
        if world.parts[dep].phase is not Phase.REMOVED
    )


def _with_part(world: WorldState, state: PartState) -> WorldState:
    parts = dict(world.parts)
    parts[state.part_id] = state
    return replace(world, parts=parts)


def _emit(bus: MessageBus | None, events: list[StateChangeEvent]) -> None:
    if bus is None:
        return
    for event in events:
        bus.publish(STATE_CHANGED_TOPIC, event.as_payload())


def apply_tool(world: WorldState, assembly: CombinedTool, part_id: str,
               torque: int | None = None, *,
               bus: MessageBus | None = None) -> tuple[WorldState, list[StateChangeEvent]]:
    spec, state = _require_part(world, part_id)
    if not _tool_available(world, assembly):
        raise EngineError("NOT_FOUND", f"tool {'+'.join(assembly.tool_ids)} is not available")
    if not spec.tool_dependent:
        raise EngineError("NOT_TOOL_DEPENDENT", f"part {part_id!r} is hand-operable")
    cond = spec.wrench_condition
    assert cond is not None  # parse guarantees tool_dependent => condition

    if state.phase is Phase.INSTALLED:
        # loosening direction; torque is irrelevant while unscrewing
        blocking = _blocking_preconditions(world, spec)
        if blocking:
            raise EngineError(
                "PRECONDITION_UNMET",
                f"parts must be removed first: {', '.join(blocking)}",
                blocking=blocking,
            )
        violations = check_wrench_condition(cond, assembly)
        if violations:
            raise EngineError(
                "WRENCH_CONDITION_FAILED",
                f"tooling does not satisfy the condition for {part_id!r}",
                violations=tuple(violations),
            )
        new_state = PartState(part_id, Phase.LOOSENED, spec.screw_out_target_cm())
        event = StateChangeEvent(part_id, Phase.INSTALLED, Phase.LOOSENED)
    elif state.phase is Phase.LOOSENED:
        # fixing direction; auto_fix parts tighten with their plain tooling
        require = fixing_requires_torque(world.catalog, spec)
        violations = check_wrench_condition(
            cond, assembly,
            torque if require else None,
            fixing=not spec.auto_fix,
            require_torque=require,
        )
        if violations:
            raise EngineError(
                "WRENCH_CONDITION_FAILED",
                f"tooling does not satisfy the fixing condition for {part_id!r}",
                violations=tuple(violations),
            )
        new_state = PartState(part_id, Phase.INSTALLED, 0.0)
        event = StateChangeEvent(part_id, Phase.LOOSENED, Phase.INSTALLED)
    else:
        raise EngineError("WRONG_PHASE", f"part {part_id!r} is removed; attach it first")

    updated = _with_part(world, new_state)
    _emit(bus, [event])
    return updated, [event]


def detach_part(world: WorldState, part_id: str, *,
                bus: MessageBus | None = None) -> tuple[WorldState, list[StateChangeEvent]]:
    spec, state = _require_part(world, part_id)
    required_phase = Phase.LOOSENED if spec.tool_dependent else Phase.INSTALLED
    if state.phase is not required_phase:
        raise EngineError(
            "WRONG_PHASE",
            f"part {part_id!r} is {state.phase.value}, must be {required_phase.value} to detach",
        )
    blocking = _blocking_preconditions(world, spec)
    if blocking:
        raise EngineError(
            "PRECONDITION_UNMET",
            f"parts must be removed first: {', '.join(blocking)}",
            blocking=blocking,
        )
    progress = spec.screw_out_target_cm() if spec.tool_dependent else 0.0
    event = StateChangeEvent(
        part_id, state.phase, Phase.REMOVED,
        disappear=DisappearEffect(
            direction=spec.disappear_dir,
            dist_cm=spec.disappear_dist_cm,
            duration_s=spec.disappear_duration_s,
        ),
    )
    updated = _with_part(world, PartState(part_id, Phase.REMOVED, progress))
    _emit(bus, [event])
    return updated, [event]


def attach_part(world: WorldState, part_id: str, *,
                bus: MessageBus | None = None) -> tuple[WorldState, list[StateChangeEvent]]:
    spec, state = _require_part(world, part_id)
    if state.phase is not Phase.REMOVED:
        raise EngineError(
            "WRONG_PHASE",
            f"part {part_id!r} is {state.phase.value}, must be REMOVED to attach",
        )
    blocking = _blocking_dependents(world, part_id)
    if blocking:
        raise EngineError(
            "REVERSE_PRECONDITION_UNMET",
            f"dependent parts must be removed first: {', '.join(blocking)}",
            blocking=blocking,
        )
    if spec.tool_dependent:
        new_state = PartState(part_id, Phase.LOOSENED, spec.screw_out_target_cm())
        event = StateChangeEvent(part_id, Phase.REMOVED, Phase.LOOSENED)
    else:
        new_state = PartState(part_id, Phase.INSTALLED, 0.0)
        event = StateChangeEvent(part_id, Phase.REMOVED, Phase.INSTALLED)
    updated = _with_part(world, new_state)
    _emit(bus, [event])
    return updated, [event]


# ---------------------------------------------------------------------------
# Action descriptors: execution and enumeration
# ---------------------------------------------------------------------------

def execute_action(world: WorldState, action: Action, *,
                   bus: MessageBus | None = None) -> tuple[WorldState, list[StateChangeEvent]]:
    if action.op == "combine":
        if action.base is None or action.attachment is None:
            raise EngineError("MALFORMED_ACTION", "combine needs base and attachment")
        updated, _ = combine(world, action.base, action.attachment)
        return updated, []
    if action.op == "split":
        if not action.tool:
            raise EngineError("MALFORMED_ACTION", "split needs a tool id list")
        assembly = resolve_tool(world, action.tool)
        if assembly.is_bare:
            raise EngineError("NOT_FOUND", f"{assembly.base!r} is not an assembly")
        return split(world, assembly), []
    if action.op == "apply_tool":
        if not action.tool or action.part is None:
            raise EngineError("MALFORMED_ACTION", "apply_tool needs tool ids and a part")
        assembly = resolve_tool(world, action.tool)
        return apply_tool(world, assembly, action.part, action.torque, bus=bus)
    if action.op == "detach":
        if action.part is None:
            raise EngineError("MALFORMED_ACTION", "detach needs a part")
        return detach_part(world, action.part, bus=bus)
    if action.op == "attach":
        if action.part is None:
            raise EngineError("MALFORMED_ACTION", "attach needs a part")
        return attach_part(world, action.part, bus=bus)
    raise EngineError("MALFORMED_ACTION", f"unknown op {action.op!r}")


def _candidate_tools(world: WorldState) -> list[CombinedTool]:
    out = list(world.assemblies)
    for tool_id in sorted(world.toolbox):
        if world.catalog.tool(tool_id).kind in WRENCH_KINDS:
            out.append(CombinedTool(base=tool_id))
    return out


def suggest_torque(catalog: Catalog, spec: PartSpec) -> int | None:
    """A witness torque for actions that need one (midpoint of the range)."""
    cond = spec.wrench_condition
    if cond is None or not fixing_requires_torque(catalog, spec):
        return None
    return (cond.min_torque + cond.max_torque) // 2


def available_actions(world: WorldState) -> list[Action]:
    """Every combine/split/apply/detach/attach call that would succeed now.

    Apply actions that need a torque are listed with the midpoint of the
    part's configured range as a witness value.
    """
    catalog = world.catalog
    actions: list[Action] = []

    for base_id in sorted(world.toolbox):
        base_spec = catalog.tool(base_id)
        if base_spec.kind not in WRENCH_KINDS:
            continue
        for attachment in base_spec.kit:
            if attachment not in world.toolbox:
                continue
            kind = catalog.tool(attachment).kind
            if kind in (ToolKind.EXTENSION, ToolKind.SOCKET):
                actions.append(Action(op="combine", base=base_id, attachment=attachment))
    for assembly in world.assemblies:
        base_spec = catalog.tool(assembly.base)
        for attachment in base_spec.kit:
            if attachment not in world.toolbox:
                continue
            kind = catalog.tool(attachment).kind
            if kind is ToolKind.EXTENSION and assembly.extension is None:
                actions.append(Action(op="combine", base=assembly.base, attachment=attachment))
            elif kind is ToolKind.SOCKET and assembly.socket is None:
                actions.append(Action(op="combine", base=assembly.base, attachment=attachment))

    for assembly in world.assemblies:
        actions.append(Action(op="split", tool=assembly.tool_ids))

    candidates = _candidate_tools(world)
    for spec in catalog.parts:
        state = world.parts[spec.part_id]
        if spec.tool_dependent and state.phase in (Phase.INSTALLED, Phase.LOOSENED):
            cond = spec.wrench_condition
            assert cond is not None
            if state.phase is Phase.INSTALLED:
                if _blocking_preconditions(world, spec):
                    continue
                for candidate in candidates:
                    if not check_wrench_condition(cond, candidate):
                        actions.append(Action(
                            op="apply_tool", tool=candidate.tool_ids, part=spec.part_id,
                        ))
            else:
                require = fixing_requires_torque(catalog, spec)
                torque = suggest_torque(catalog, spec)
                for candidate in candidates:
                    violations = check_wrench_condition(
                        cond, candidate,
                        torque if require else None,
                        fixing=not spec.auto_fix,
                        require_torque=require,
                    )
                    if not violations:
                        actions.append(Action(
                            op="apply_tool", tool=candidate.tool_ids,
                            part=spec.part_id, torque=torque,
                        ))

    for spec in catalog.parts:
        state = world.parts[spec.part_id]
        required = Phase.LOOSENED if spec.tool_dependent else Phase.INSTALLED
        if state.phase is required and not _blocking_preconditions(world, spec):
            actions.append(Action(op="detach", part=spec.part_id))

    for spec in catalog.parts:
        state = world.parts[spec.part_id]
        if state.phase is Phase.REMOVED and not _blocking_dependents(world, spec.part_id):
            actions.append(Action(op="attach", part=spec.part_id))

    return actions
