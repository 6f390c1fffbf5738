"""CSV catalog: tool specs, part specs, and task plans.

Three files make up a catalog directory: tools.csv, parts.csv, tasks.csv.
Parsing enforces single-row shape rules (headers, id syntax, field types,
per-row invariants) and raises CatalogParseError carrying every located
issue. Cross-record consistency (dangling ids, precondition cycles, plan
order) is checked separately by validate_catalog, which reports problems
as data instead of raising.

Encoding conventions: comma-separated columns, pipe "|" for in-cell lists,
semicolon-separated 3-vectors, booleans as 0/1, empty optional cells mean
absent. Ids are case-sensitive tokens matching [A-Za-z0-9_-]+.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]+$")

TOOLS_HEADER = ["tool_id", "name", "kind", "kit"]
PARTS_HEADER = [
    "part_id", "name", "tool_dependent", "preconditions",
    "wrench_id", "fix_wrench_id", "extension_id", "socket_id",
    "need_extension", "min_torque", "max_torque",
    "screw_out_level", "custom_out_cm", "auto_fix",
    "disappear_dir", "disappear_dist_cm", "disappear_duration_s",
]
TASKS_HEADER = [
    "task_id", "task_name", "group_index", "group_name",
    "step_index", "step_name", "part_id", "action",
]

# columns that must stay empty on non-tool-dependent part rows
_TOOL_ONLY_COLUMNS = PARTS_HEADER[4:14]

UNIT_VECTOR_TOLERANCE = 1e-6


class ToolKind(enum.Enum):
    WRENCH = "WRENCH"
    TORQUE_WRENCH = "TORQUE_WRENCH"
    EXTENSION = "EXTENSION"
    SOCKET = "SOCKET"
    SPECIAL = "SPECIAL"


class ScrewOutLevel(enum.Enum):
    ONE_CM = "ONE_CM"
    TWO_CM = "TWO_CM"
    CUSTOM = "CUSTOM"


class StepAction(enum.Enum):
    REMOVE = "REMOVE"
    INSTALL = "INSTALL"


@dataclass(frozen=True)
class ToolSpec:
    tool_id: str
    name: str
    kind: ToolKind
    kit: tuple[str, ...] = ()


@dataclass(frozen=True)
class WrenchUseCondition:
    wrench_id: str
    fix_wrench_id: str | None = None
    extension_id: str | None = None
    socket_id: str | None = None
    need_extension: bool = False
    min_torque: int = 0
    max_torque: int = 0


@dataclass(frozen=True)
class PartSpec:
    part_id: str
    name: str
    tool_dependent: bool
    preconditions: tuple[str, ...]
    wrench_condition: WrenchUseCondition | None
    screw_out_level: ScrewOutLevel
    custom_out_cm: float | None
    auto_fix: bool
    disappear_dir: tuple[float, float, float]
    disappear_dist_cm: float
    disappear_duration_s: float

    def screw_out_target_cm(self) -> float:
        """Travel distance a screw covers going from fully seated to loose."""
        if self.screw_out_level is ScrewOutLevel.ONE_CM:
            return 1.0
        if self.screw_out_level is ScrewOutLevel.TWO_CM:
            return 2.0
        return float(self.custom_out_cm or 0.0)


@dataclass(frozen=True)
class Step:
    step_name: str
    part_id: str
    action: StepAction


@dataclass(frozen=True)
class StepGroup:
    group_name: str
    steps: tuple[Step, ...]


@dataclass(frozen=True)
class TaskPlan:
    task_id: str
    task_name: str
    groups: tuple[StepGroup, ...]

    @property
    def steps(self) -> tuple[Step, ...]:
        return tuple(s for g in self.groups for s in g.steps)


@dataclass(frozen=True)
class Location:
    file: str
    row: int | None = None
    column: str | None = None

    def __str__(self) -> str:
        out = self.file
        if self.row is not None:
            out += f":{self.row}"
        if self.column is not None:
            out += f"({self.column})"
        return out


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    location: Location
    detail: str

    def as_dict(self) -> dict:
        return {
            "code": self.code,
            "file": self.location.file,
            "row": self.location.row,
            "column": self.location.column,
            "detail": self.detail,
        }

    def __str__(self) -> str:
        return f"{self.code} at {self.location}: {self.detail}"


@dataclass
class ValidationReport:
    errors: list[ValidationIssue] = field(default_factory=list)
    warnings: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "errors": [i.as_dict() for i in self.errors],
            "warnings": [i.as_dict() for i in self.warnings],
        }


@dataclass(frozen=True)
class ParseIssue:
    file: str
    row: int | None
    message: str

    def __str__(self) -> str:
        where = self.file if self.row is None else f"{self.file}:{self.row}"
        return f"{where}: {self.message}"


class CatalogParseError(ValueError):
    """One or more located problems found while parsing a catalog file."""

    def __init__(self, issues: list[ParseIssue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


@dataclass
class Catalog:
    """A parsed catalog with by-id lookups and the reverse precondition map."""

    tools: tuple[ToolSpec, ...]
    parts: tuple[PartSpec, ...]
    plans: tuple[TaskPlan, ...]

    def __post_init__(self) -> None:
        self._tools = {t.tool_id: t for t in self.tools}
        self._parts = {p.part_id: p for p in self.parts}
        self._plans = {p.task_id: p for p in self.plans}
        self._dependents: dict[str, tuple[str, ...]] = {
            pid: tuple(
                q.part_id for q in self.parts if pid in q.preconditions
            )
            for pid in self._parts
        }

    def tool(self, tool_id: str) -> ToolSpec:
        return self._tools[tool_id]

    def part(self, part_id: str) -> PartSpec:
        return self._parts[part_id]

    def plan(self, task_id: str) -> TaskPlan:
        return self._plans[task_id]

    def has_tool(self, tool_id: str) -> bool:
        return tool_id in self._tools

    def has_part(self, part_id: str) -> bool:
        return part_id in self._parts

    def has_plan(self, task_id: str) -> bool:
        return task_id in self._plans

    def dependents(self, part_id: str) -> tuple[str, ...]:
        """Parts that list part_id as a precondition (reverse DAG edges)."""
        return self._dependents.get(part_id, ())


# ---------------------------------------------------------------------------
# Row-level parsing helpers
# ---------------------------------------------------------------------------

class _Rows:
    """Reads a CSV document, checks the header, yields (row_number, cells)."""

    def __init__(self, text: str, filename: str, header: list[str]):
        self.filename = filename
        self.header = header
        self.issues: list[ParseIssue] = []
        self.records: list[tuple[int, dict[str, str]]] = []
        try:
            raw = list(csv.reader(io.StringIO(text, newline="")))
        except csv.Error as exc:
            self.issues.append(ParseIssue(filename, None, f"unreadable CSV: {exc}"))
            return
        raw = [r for r in raw if r]  # skip blank lines
        if not raw:
            self.issues.append(ParseIssue(filename, 1, "missing header row"))
            return
        if raw[0] != header:
            self.issues.append(ParseIssue(
                filename, 1,
                f"header must be exactly {','.join(header)!r}, got {','.join(raw[0])!r}",
            ))
            return
        for i, cells in enumerate(raw[1:], start=2):
            if len(cells) != len(header):
                self.issues.append(ParseIssue(
                    self.filename, i,
                    f"expected {len(header)} columns, got {len(cells)}",
                ))
                continue
            self.records.append((i, dict(zip(header, cells))))

    def issue(self, row: int | None, message: str) -> None:
        self.issues.append(ParseIssue(self.filename, row, message))

    def raise_if_failed(self) -> None:
        if self.issues:
            raise CatalogParseError(self.issues)


def _parse_id(rows: _Rows, row: int, column: str, value: str) -> str | None:
    if not ID_PATTERN.match(value):
        rows.issue(row, f"{column} {value!r} is not a valid id token")
        return None
    return value


def _parse_optional_id(rows: _Rows, row: int, column: str, value: str) -> str | None:
    if value == "":
        return None
    return _parse_id(rows, row, column, value)


def _parse_id_list(rows: _Rows, row: int, column: str, value: str) -> tuple[str, ...] | None:
    if value == "":
        return ()
    out: list[str] = []
    for token in value.split("|"):
        parsed = _parse_id(rows, row, column, token)
        if parsed is None:
            return None
        out.append(parsed)
    if len(set(out)) != len(out):
        rows.issue(row, f"{column} contains duplicate ids: {value!r}")
        return None
    return tuple(out)


def _parse_bool(rows: _Rows, row: int, column: str, value: str, *,
                default: bool | None = None) -> bool | None:
    if value == "" and default is not None:
        return default
    if value == "0":
        return False
    if value == "1":
        return True
    rows.issue(row, f"{column} must be 0 or 1, got {value!r}")
    return None


def _parse_int(rows: _Rows, row: int, column: str, value: str, *,
               default: int | None = None) -> int | None:
    if value == "" and default is not None:
        return default
    try:
        return int(value)
    except ValueError:
        rows.issue(row, f"{column} must be an integer, got {value!r}")
        return None


def _parse_float(rows: _Rows, row: int, column: str, value: str) -> float | None:
    try:
        out = float(value)
    except ValueError:
        rows.issue(row, f"{column} must be a number, got {value!r}")
        return None
    if not math.isfinite(out):
        rows.issue(row, f"{column} must be finite, got {value!r}")
        return None
    return out


def _parse_vector(rows: _Rows, row: int, column: str, value: str) -> tuple[float, float, float] | None:
    pieces = value.split(";")
    if len(pieces) != 3:
        rows.issue(row, f"{column} must be three ';'-separated numbers, got {value!r}")
        return None
    nums = []
    for piece in pieces:
        n = _parse_float(rows, row, column, piece)
        if n is None:
            return None
        nums.append(n)
    x, y, z = nums
    norm = math.sqrt(x * x + y * y + z * z)
    if abs(norm - 1.0) > UNIT_VECTOR_TOLERANCE:
        rows.issue(row, f"{column} must be a unit vector, |{value}| = {norm:.9f}")
        return None
    return (x, y, z)


def _parse_enum(rows: _Rows, row: int, column: str, value: str, enum_cls, *,
                default=None):
    if value == "" and default is not None:
        return default
    try:
        return enum_cls(value)
    except ValueError:
        allowed = "|".join(m.value for m in enum_cls)
        rows.issue(row, f"{column} must be one of {allowed}, got {value!r}")
        return None


def _check_unique(rows: _Rows, seen: dict[str, int], row: int, column: str,
                  value: str) -> bool:
    if value in seen:
        rows.issue(row, f"duplicate {column} {value!r} (rows {seen[value]} and {row})")
        return False
    seen[value] = row
    return True


# ---------------------------------------------------------------------------
# Parsers
# ---------------------------------------------------------------------------

def parse_tools_csv(text: str, *, filename: str = "tools.csv") -> list[ToolSpec]:
    rows = _Rows(text, filename, TOOLS_HEADER)
    tools: list[ToolSpec] = []
    seen: dict[str, int] = {}
    for row, cells in rows.records:
        tool_id = _parse_id(rows, row, "tool_id", cells["tool_id"])
        kind = _parse_enum(rows, row, "kind", cells["kind"], ToolKind)
        kit = _parse_id_list(rows, row, "kit", cells["kit"])
        name = cells["name"]
        if not name:
            rows.issue(row, "name must be non-empty")
            continue
        if tool_id is None or kind is None or kit is None:
            continue
        if not _check_unique(rows, seen, row, "tool_id", tool_id):
            continue
        if kit and kind not in (ToolKind.WRENCH, ToolKind.TORQUE_WRENCH):
            rows.issue(row, f"kind {kind.value} cannot carry a kit")
            continue
        tools.append(ToolSpec(tool_id=tool_id, name=name, kind=kind, kit=kit))
    rows.raise_if_failed()
    return tools


def _parse_wrench_condition(rows: _Rows, row: int, cells: dict[str, str]) -> WrenchUseCondition | None:
    wrench_id = cells["wrench_id"]
    if wrench_id == "":
        rows.issue(row, "tool_dependent part must set wrench_id")
        return None
    wrench_id = _parse_id(rows, row, "wrench_id", wrench_id)
    fix_wrench_id = _parse_optional_id(rows, row, "fix_wrench_id", cells["fix_wrench_id"])
    extension_id = _parse_optional_id(rows, row, "extension_id", cells["extension_id"])
    socket_id = _parse_optional_id(rows, row, "socket_id", cells["socket_id"])
    need_extension = _parse_bool(rows, row, "need_extension", cells["need_extension"], default=False)
    min_torque = _parse_int(rows, row, "min_torque", cells["min_torque"], default=0)
    max_torque = _parse_int(rows, row, "max_torque", cells["max_torque"], default=0)
    if wrench_id is None or need_extension is None or min_torque is None or max_torque is None:
        return None
    if min_torque > max_torque:
        rows.issue(row, f"min_torque {min_torque} exceeds max_torque {max_torque}")
        return None
    if need_extension and extension_id is None:
        rows.issue(row, "need_extension=1 requires extension_id")
        return None
    return WrenchUseCondition(
        wrench_id=wrench_id,
        fix_wrench_id=fix_wrench_id,
        extension_id=extension_id,
        socket_id=socket_id,
        need_extension=need_extension,
        min_torque=min_torque,
        max_torque=max_torque,
    )


def parse_parts_csv(text: str, *, filename: str = "parts.csv") -> list[PartSpec]:
    rows = _Rows(text, filename, PARTS_HEADER)
    parts: list[PartSpec] = []
    seen: dict[str, int] = {}
    for row, cells in rows.records:
        part_id = _parse_id(rows, row, "part_id", cells["part_id"])
        name = cells["name"]
        if not name:
            rows.issue(row, "name must be non-empty")
            continue
        tool_dependent = _parse_bool(rows, row, "tool_dependent", cells["tool_dependent"])
        preconditions = _parse_id_list(rows, row, "preconditions", cells["preconditions"])
        direction = _parse_vector(rows, row, "disappear_dir", cells["disappear_dir"])
        dist = _parse_float(rows, row, "disappear_dist_cm", cells["disappear_dist_cm"])
        duration = _parse_float(rows, row, "disappear_duration_s", cells["disappear_duration_s"])
        if None in (part_id, tool_dependent, preconditions, direction, dist, duration):
            continue
        if not _check_unique(rows, seen, row, "part_id", part_id):
            continue
        if dist < 0:
            rows.issue(row, f"disappear_dist_cm must be >= 0, got {dist}")
            continue
        if duration <= 0:
            rows.issue(row, f"disappear_duration_s must be > 0, got {duration}")
            continue

        condition: WrenchUseCondition | None = None
        level = ScrewOutLevel.TWO_CM
        custom_out: float | None = None
        auto_fix = False
        if tool_dependent:
            condition = _parse_wrench_condition(rows, row, cells)
            level = _parse_enum(rows, row, "screw_out_level", cells["screw_out_level"],
                                ScrewOutLevel, default=ScrewOutLevel.TWO_CM)
            auto_fix = _parse_bool(rows, row, "auto_fix", cells["auto_fix"], default=False)
            if condition is None or level is None or auto_fix is None:
                continue
            if level is ScrewOutLevel.CUSTOM:
                if cells["custom_out_cm"] == "":
                    rows.issue(row, "screw_out_level CUSTOM requires custom_out_cm")
                    continue
                custom_out = _parse_float(rows, row, "custom_out_cm", cells["custom_out_cm"])
                if custom_out is None:
                    continue
                if custom_out <= 0:
                    rows.issue(row, f"custom_out_cm must be > 0, got {custom_out}")
                    continue
            elif cells["custom_out_cm"] != "":
                rows.issue(row, "custom_out_cm set but screw_out_level is not CUSTOM")
                continue
        else:
            filled = [c for c in _TOOL_ONLY_COLUMNS if cells[c] != ""]
            if filled:
                rows.issue(row, "non-tool-dependent part must leave tool columns empty: "
                                + ", ".join(filled))
                continue

        parts.append(PartSpec(
            part_id=part_id,
            name=name,
            tool_dependent=tool_dependent,
            preconditions=preconditions,
            wrench_condition=condition,
            screw_out_level=level,
            custom_out_cm=custom_out,
            auto_fix=auto_fix,
            disappear_dir=direction,
            disappear_dist_cm=dist,
            disappear_duration_s=duration,
        ))
    rows.raise_if_failed()
    return parts


def parse_tasks_csv(text: str, *, filename: str = "tasks.csv") -> list[TaskPlan]:
    rows = _Rows(text, filename, TASKS_HEADER)

    # group raw rows into contiguous task blocks, preserving row numbers
    blocks: list[tuple[str, list[tuple[int, dict[str, str]]]]] = []
    block_start_row: dict[str, int] = {}
    for row, cells in rows.records:
        task_id = _parse_id(rows, row, "task_id", cells["task_id"])
        if task_id is None:
            continue
        if blocks and blocks[-1][0] == task_id:
            blocks[-1][1].append((row, cells))
        elif task_id in block_start_row:
            rows.issue(row, f"rows for task {task_id!r} are not contiguous "
                            f"(first block starts at row {block_start_row[task_id]})")
        else:
            block_start_row[task_id] = row
            blocks.append((task_id, [(row, cells)]))

    plans: list[TaskPlan] = []
    for task_id, block in blocks:
        plan = _build_plan(rows, task_id, block)
        if plan is not None:
            plans.append(plan)
    rows.raise_if_failed()
    return plans


def _build_plan(rows: _Rows, task_id: str,
                block: list[tuple[int, dict[str, str]]]) -> TaskPlan | None:
    task_name = block[0][1]["task_name"]
    if not task_name:
        rows.issue(block[0][0], "task_name must be non-empty")
        return None
    ok = True
    groups: list[StepGroup] = []
    current_index = 0
    current_name = ""
    current_steps: list[Step] = []
    seen_pairs: dict[tuple[str, StepAction], int] = {}

    def close_group() -> None:
        if current_index:
            groups.append(StepGroup(group_name=current_name, steps=tuple(current_steps)))

    for row, cells in block:
        if cells["task_name"] != task_name:
            rows.issue(row, f"task_name changed mid-task: {cells['task_name']!r} vs {task_name!r}")
            ok = False
        group_index = _parse_int(rows, row, "group_index", cells["group_index"])
        step_index = _parse_int(rows, row, "step_index", cells["step_index"])
        part_id = _parse_id(rows, row, "part_id", cells["part_id"])
        action = _parse_enum(rows, row, "action", cells["action"], StepAction)
        step_name = cells["step_name"]
        if not step_name:
            rows.issue(row, "step_name must be non-empty")
            ok = False
        if None in (group_index, step_index, part_id, action) or not ok:
            ok = False
            continue

        if group_index == current_index + 1:
            close_group()
            current_index = group_index
            current_name = cells["group_name"]
            current_steps = []
            if not current_name:
                rows.issue(row, "group_name must be non-empty")
                ok = False
                continue
        elif group_index != current_index:
            rows.issue(row, f"gap in group indices: expected {current_index} or "
                            f"{current_index + 1}, got {group_index}")
            ok = False
            continue
        elif cells["group_name"] != current_name:
            rows.issue(row, f"group_name changed mid-group: {cells['group_name']!r} "
                            f"vs {current_name!r}")
            ok = False
            continue

        if step_index != len(current_steps) + 1:
            rows.issue(row, f"gap in step indices: expected {len(current_steps) + 1}, "
                            f"got {step_index}")
            ok = False
            continue
        pair = (part_id, action)
        if pair in seen_pairs:
            rows.issue(row, f"duplicate step ({part_id}, {action.value}) "
                            f"(rows {seen_pairs[pair]} and {row})")
            ok = False
            continue
        seen_pairs[pair] = row
        current_steps.append(Step(step_name=step_name, part_id=part_id, action=action))

    close_group()
    if not ok:
        return None
    return TaskPlan(task_id=task_id, task_name=task_name, groups=tuple(groups))


# ---------------------------------------------------------------------------
# Serializers (inverse of the parsers; canonical formatting)
# ---------------------------------------------------------------------------

def _fmt_num(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)


def _writer(buf: io.StringIO) -> csv.writer:
    return csv.writer(buf, lineterminator="\n")


def serialize_tools_csv(tools: list[ToolSpec]) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(TOOLS_HEADER)
    for t in tools:
        w.writerow([t.tool_id, t.name, t.kind.value, "|".join(t.kit)])
    return buf.getvalue()


def serialize_parts_csv(parts: list[PartSpec]) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(PARTS_HEADER)
    for p in parts:
        if p.tool_dependent:
            cond = p.wrench_condition
            assert cond is not None
            tool_cells = [
                cond.wrench_id,
                cond.fix_wrench_id or "",
                cond.extension_id or "",
                cond.socket_id or "",
                "1" if cond.need_extension else "0",
                str(cond.min_torque),
                str(cond.max_torque),
                p.screw_out_level.value,
                _fmt_num(p.custom_out_cm) if p.custom_out_cm is not None else "",
                "1" if p.auto_fix else "0",
            ]
        else:
            tool_cells = [""] * len(_TOOL_ONLY_COLUMNS)
        w.writerow([
            p.part_id,
            p.name,
            "1" if p.tool_dependent else "0",
            "|".join(p.preconditions),
            *tool_cells,
            ";".join(_fmt_num(c) for c in p.disappear_dir),
            _fmt_num(p.disappear_dist_cm),
            _fmt_num(p.disappear_duration_s),
        ])
    return buf.getvalue()


def serialize_tasks_csv(plans: list[TaskPlan]) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(TASKS_HEADER)
    for plan in plans:
        for gi, group in enumerate(plan.groups, start=1):
            for si, step in enumerate(group.steps, start=1):
                w.writerow([
                    plan.task_id, plan.task_name,
                    str(gi), group.group_name,
                    str(si), step.step_name,
                    step.part_id, step.action.value,
                ])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Cross-record validation
# ---------------------------------------------------------------------------

def _find_cycles(parts: list[PartSpec]) -> list[tuple[str, ...]]:
    """One cycle per back edge found by depth-first search."""
    ids = {p.part_id for p in parts}
    prereqs = {p.part_id: [q for q in p.preconditions if q in ids] for p in parts}
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(ids, WHITE)
    stack: list[str] = []
    cycles: list[tuple[str, ...]] = []
    seen_cycles: set[frozenset[str]] = set()

    def visit(node: str) -> None:
        color[node] = GREY
        stack.append(node)
        for dep in prereqs[node]:
            if color[dep] == GREY:
                cycle = tuple(stack[stack.index(dep):])
                key = frozenset(cycle)
                if key not in seen_cycles:
                    seen_cycles.add(key)
                    cycles.append(cycle)
            elif color[dep] == WHITE:
                visit(dep)
        stack.pop()
        color[node] = BLACK

    for part in parts:
        if color[part.part_id] == WHITE:
            visit(part.part_id)
    return cycles


def _expected_tool_kinds(column: str) -> tuple[ToolKind, ...]:
    if column in ("wrench_id", "fix_wrench_id"):
        return (ToolKind.WRENCH, ToolKind.TORQUE_WRENCH)
    if column == "extension_id":
        return (ToolKind.EXTENSION,)
    return (ToolKind.SOCKET,)


def _simulate_plan(plan: TaskPlan, parts_by_id: dict[str, PartSpec],
                   dependents: dict[str, list[str]]) -> list[str]:
    """Walks the plan in order; returns a conflict description per bad step."""
    removed: set[str] = set()
    first_action: dict[str, StepAction] = {}
    for step in plan.steps:
        first_action.setdefault(step.part_id, step.action)
    # starting configuration: a part begins removed iff its first action installs it
    for pid, action in first_action.items():
        if action is StepAction.INSTALL:
            removed.add(pid)

    conflicts: list[str] = []
    for number, step in enumerate(plan.steps, start=1):
        part = parts_by_id[step.part_id]
        if step.action is StepAction.REMOVE:
            if step.part_id in removed:
                conflicts.append(f"step {number} removes {step.part_id!r} which is already removed")
            blocking = [q for q in part.preconditions if q in parts_by_id and q not in removed]
            if blocking:
                conflicts.append(
                    f"step {number} removes {step.part_id!r} before its "
                    f"preconditions: {', '.join(sorted(blocking))}"
                )
            removed.add(step.part_id)
        else:
            if step.part_id not in removed:
                conflicts.append(f"step {number} installs {step.part_id!r} which is not removed")
            blocking = [q for q in dependents.get(step.part_id, []) if q not in removed]
            if blocking:
                conflicts.append(
                    f"step {number} installs {step.part_id!r} while dependent "
                    f"parts are still installed: {', '.join(sorted(blocking))}"
                )
            removed.discard(step.part_id)
    return conflicts


def validate_catalog(tools: list[ToolSpec], parts: list[PartSpec],
                     plans: list[TaskPlan]) -> ValidationReport:
    report = ValidationReport()
    tools_by_id = {t.tool_id: t for t in tools}
    parts_by_id = {p.part_id: p for p in parts}

    for tool in tools:
        for kit_id in tool.kit:
            if kit_id not in tools_by_id:
                report.errors.append(ValidationIssue(
                    "DANGLING_KIT_ID",
                    Location("tools.csv", column="kit"),
                    f"tool {tool.tool_id!r} kit references unknown tool {kit_id!r}",
                ))

    for part in parts:
        for pre in part.preconditions:
            if pre not in parts_by_id:
                report.errors.append(ValidationIssue(
                    "DANGLING_PRECONDITION",
                    Location("parts.csv", column="preconditions"),
                    f"part {part.part_id!r} references unknown part {pre!r}",
                ))
        cond = part.wrench_condition
        if cond is None:
            continue
        for column, tool_id in (
            ("wrench_id", cond.wrench_id),
            ("fix_wrench_id", cond.fix_wrench_id),
            ("extension_id", cond.extension_id),
            ("socket_id", cond.socket_id),
        ):
            if tool_id is None:
                continue
            if tool_id not in tools_by_id:
                report.errors.append(ValidationIssue(
                    "DANGLING_WRENCH_TOOL",
                    Location("parts.csv", column=column),
                    f"part {part.part_id!r} {column} references unknown tool {tool_id!r}",
                ))
            elif tools_by_id[tool_id].kind not in _expected_tool_kinds(column):
                report.errors.append(ValidationIssue(
                    "WRONG_TOOL_KIND",
                    Location("parts.csv", column=column),
                    f"part {part.part_id!r} {column} names {tool_id!r} of kind "
                    f"{tools_by_id[tool_id].kind.value}",
                ))

    for cycle in _find_cycles(parts):
        report.errors.append(ValidationIssue(
            "PRECONDITION_CYCLE",
            Location("parts.csv", column="preconditions"),
            "cyclic preconditions: " + " -> ".join(cycle + (cycle[0],)),
        ))

    dependents: dict[str, list[str]] = {}
    for part in parts:
        for pre in part.preconditions:
            dependents.setdefault(pre, []).append(part.part_id)

    for plan in plans:
        dangling = [s.part_id for s in plan.steps if s.part_id not in parts_by_id]
        for pid in dangling:
            report.errors.append(ValidationIssue(
                "DANGLING_STEP_PART",
                Location("tasks.csv", column="part_id"),
                f"task {plan.task_id!r} references unknown part {pid!r}",
            ))
        if dangling:
            continue  # simulation would chase missing parts
        for conflict in _simulate_plan(plan, parts_by_id, dependents):
            report.errors.append(ValidationIssue(
                "PLAN_ORDER_CONFLICT",
                Location("tasks.csv", column="step_index"),
                f"task {plan.task_id!r}: {conflict}",
            ))

    return report


# ---------------------------------------------------------------------------
# Directory loading
# ---------------------------------------------------------------------------

def builtin_catalog_dir() -> Path:
    """Directory of the catalog shipped with the package."""
    return Path(__file__).parent / "data"


def load_catalog(directory: str | Path) -> tuple[Catalog, ValidationReport]:
    """Parse tools.csv/parts.csv/tasks.csv from a directory and validate.

    Raises FileNotFoundError if a file is missing and CatalogParseError on
    any row-level problem; cross-record problems land in the report.
    """
    directory = Path(directory)
    texts: dict[str, str] = {}
    issues: list[ParseIssue] = []
    for filename in ("tools.csv", "parts.csv", "tasks.csv"):
        path = directory / filename
        if not path.is_file():
            raise FileNotFoundError(f"catalog file not found: {path}")
        try:
            texts[filename] = path.read_bytes().decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            issues.append(ParseIssue(filename, None, f"not valid UTF-8: {exc}"))
    if issues:
        raise CatalogParseError(issues)

    tools = parse_tools_csv(texts["tools.csv"])
    parts = parse_parts_csv(texts["parts.csv"])
    plans = parse_tasks_csv(texts["tasks.csv"])
    report = validate_catalog(tools, parts, plans)
    catalog = Catalog(tools=tuple(tools), parts=tuple(parts), plans=tuple(plans))
    return catalog, report
