"""HTTP/JSON session service: catalog listings, live sessions, snapshots.

One process serves one immutable catalog. Sessions are kept in memory,
keyed by 128-bit random hex ids; requests touching the same session are
serialized by a per-session lock. Every action that reaches a session is
appended to its action log, which makes a session exactly reproducible:
snapshots persist the log and restore replays it, then cross-checks the
recorded progress to detect tampering.

Sessions run on logical clocks, so durations count actions rather than
wall time; that is what makes snapshot restore bit-exact.
"""

from __future__ import annotations

import json
import secrets
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .catalog import Catalog, PartSpec, load_catalog
from .engine import available_actions
from .replay import ReplayFormatError, action_from_dict
from .session import LogicalClock, Mode, TaskError, TaskSession, start_task

CATALOG_DIR_ENV = "WORKBENCH_CATALOG_DIR"


class SnapshotCorruptionError(RuntimeError):
    def __init__(self, session_id: str, detail: str):
        self.session_id = session_id
        super().__init__(f"snapshot for session {session_id} is corrupt: {detail}")


@dataclass
class SessionRecord:
    session_id: str
    task_id: str
    mode: Mode
    created_at: str
    session: TaskSession
    action_log: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self, catalog: Catalog):
        self.catalog = catalog
        self._records: dict[str, SessionRecord] = {}
        self._lock = threading.Lock()

    def create(self, task_id: str, mode: Mode) -> SessionRecord:
        session = start_task(self.catalog, task_id, mode, clock=LogicalClock())
        record = SessionRecord(
            session_id=secrets.token_hex(16),
            task_id=task_id,
            mode=mode,
            created_at=datetime.now(timezone.utc).isoformat(),
            session=session,
        )
        with self._lock:
            self._records[record.session_id] = record
        return record

    def get(self, session_id: str) -> SessionRecord:
        with self._lock:
            if session_id not in self._records:
                raise KeyError(session_id)
            return self._records[session_id]

    def all_records(self) -> list[SessionRecord]:
        with self._lock:
            return list(self._records.values())

    # -- persistence --------------------------------------------------------

    def store_snapshots(self, directory: str | Path) -> int:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        count = 0
        for record in self.all_records():
            with record.lock:
                payload = {
                    "session_id": record.session_id,
                    "task_id": record.task_id,
                    "mode": record.mode.value,
                    "created_at": record.created_at,
                    "deduction_per_error": record.session.deduction_per_error,
                    "action_log": record.action_log,
                    "submitted": record.session.submitted,
                    "progress": record.session.progress().as_dict(),
                    "scorecard": (
                        record.session.scorecard.as_dict()
                        if record.session.submitted else None
                    ),
                }
            path = directory / f"{record.session_id}.json"
            path.write_text(json.dumps(payload, indent=2) + "\n")
            count += 1
        return count

    def restore_snapshots(self, directory: str | Path) -> int:
        directory = Path(directory)
        if not directory.is_dir():
            return 0
        count = 0
        for path in sorted(directory.glob("*.json")):
            data = json.loads(path.read_text())
            session_id = data.get("session_id", path.stem)
            try:
                record = self._rebuild(data)
            except (TaskError, ReplayFormatError, KeyError, ValueError) as exc:
                raise SnapshotCorruptionError(session_id, str(exc)) from exc
            if record.session.progress().as_dict() != data["progress"]:
                raise SnapshotCorruptionError(
                    session_id, "replayed progress does not match the stored progress"
                )
            stored_card = data.get("scorecard")
            live_card = (
                record.session.scorecard.as_dict()
                if record.session.submitted else None
            )
            if live_card != stored_card:
                raise SnapshotCorruptionError(
                    session_id, "replayed scorecard does not match the stored scorecard"
                )
            with self._lock:
                self._records[record.session_id] = record
            count += 1
        return count

    def _rebuild(self, data: dict) -> SessionRecord:
        mode = Mode(data["mode"])
        session = start_task(
            self.catalog, data["task_id"], mode,
            clock=LogicalClock(),
            deduction_per_error=data["deduction_per_error"],
        )
        for entry in data["action_log"]:
            action = action_from_dict(entry)
            if action.op == "submit":
                session.submit()
            else:
                session.handle_action(action)
        return SessionRecord(
            session_id=data["session_id"],
            task_id=data["task_id"],
            mode=mode,
            created_at=data["created_at"],
            session=session,
            action_log=list(data["action_log"]),
        )


# ---------------------------------------------------------------------------
# JSON shapes
# ---------------------------------------------------------------------------

class CreateSessionBody(BaseModel):
    task_id: str
    mode: Literal["LEARNING", "TRAINING", "EXAM"]


def _part_as_dict(spec: PartSpec) -> dict:
    condition = None
    if spec.wrench_condition is not None:
        c = spec.wrench_condition
        condition = {
            "wrench_id": c.wrench_id,
            "fix_wrench_id": c.fix_wrench_id,
            "extension_id": c.extension_id,
            "socket_id": c.socket_id,
            "need_extension": c.need_extension,
            "min_torque": c.min_torque,
            "max_torque": c.max_torque,
        }
    return {
        "part_id": spec.part_id,
        "name": spec.name,
        "tool_dependent": spec.tool_dependent,
        "preconditions": list(spec.preconditions),
        "wrench_condition": condition,
        "screw_out_level": spec.screw_out_level.value,
        "custom_out_cm": spec.custom_out_cm,
        "auto_fix": spec.auto_fix,
        "disappear": {
            "direction": list(spec.disappear_dir),
            "dist_cm": spec.disappear_dist_cm,
            "duration_s": spec.disappear_duration_s,
        },
    }


def _session_view(record: SessionRecord) -> dict:
    session = record.session
    hint = session.next_hint()
    return {
        "session_id": record.session_id,
        "task_id": record.task_id,
        "task_name": session.plan.task_name,
        "mode": record.mode.value,
        "submitted": session.submitted,
        "progress": session.progress().as_dict(),
        "actions": [a.as_dict() for a in available_actions(session.world)],
        "hint": hint.as_dict() if hint else None,
        "scorecard": session.scorecard.as_dict() if session.submitted else None,
    }


# ---------------------------------------------------------------------------
# Application factory
# ---------------------------------------------------------------------------

def create_app(catalog_dir: str | Path | None = None, *,
               snapshot_dir: str | Path | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    """Build the service around a validated catalog directory.

    Falls back to the WORKBENCH_CATALOG_DIR environment variable when no
    directory is given. Raises ValueError when the catalog does not
    validate; the caller decides how to surface that.
    """
    import os

    if catalog_dir is None:
        catalog_dir = os.environ.get(CATALOG_DIR_ENV)
    if catalog_dir is None:
        raise ValueError(
            f"no catalog directory: pass one or set {CATALOG_DIR_ENV}"
        )
    catalog, report = load_catalog(catalog_dir)
    if not report.ok:
        details = "; ".join(str(e) for e in report.errors)
        raise ValueError(f"catalog failed validation: {details}")

    store = SessionStore(catalog)
    if snapshot_dir is not None:
        store.restore_snapshots(snapshot_dir)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        if snapshot_dir is not None:
            store.store_snapshots(snapshot_dir)

    app = FastAPI(title="engine-workbench", lifespan=lifespan)
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def get_record(session_id: str) -> SessionRecord:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")

    @app.get("/catalog/tasks")
    def catalog_tasks() -> list[dict]:
        return [
            {
                "task_id": plan.task_id,
                "task_name": plan.task_name,
                "groups": [
                    {
                        "group_name": group.group_name,
                        "steps": [
                            {
                                "step_name": step.step_name,
                                "part_id": step.part_id,
                                "action": step.action.value,
                            }
                            for step in group.steps
                        ],
                    }
                    for group in plan.groups
                ],
            }
            for plan in catalog.plans
        ]

    @app.get("/catalog/tools")
    def catalog_tools() -> list[dict]:
        return [
            {
                "tool_id": t.tool_id,
                "name": t.name,
                "kind": t.kind.value,
                "kit": list(t.kit),
            }
            for t in catalog.tools
        ]

    @app.get("/catalog/parts")
    def catalog_parts() -> list[dict]:
        return [_part_as_dict(p) for p in catalog.parts]

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        try:
            record = store.create(body.task_id, Mode(body.mode))
        except TaskError as exc:
            raise HTTPException(status_code=404, detail=exc.detail)
        with record.lock:
            return {
                "session_id": record.session_id,
                "progress": record.session.progress().as_dict(),
            }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        record = get_record(session_id)
        with record.lock:
            return _session_view(record)

    @app.post("/sessions/{session_id}/actions")
    async def post_action(session_id: str, request: Request) -> dict:
        record = get_record(session_id)
        try:
            body = await request.json()
        except json.JSONDecodeError:
            raise HTTPException(status_code=400, detail="body is not valid JSON")
        try:
            action = action_from_dict(body)
        except ReplayFormatError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        with record.lock:
            try:
                if action.op == "submit":
                    card = record.session.submit()
                    outcome = {"kind": "submitted", "scorecard": card.as_dict()}
                else:
                    outcome = record.session.handle_action(action).as_dict()
            except TaskError as exc:
                raise HTTPException(status_code=409, detail=exc.detail)
            record.action_log.append(action.as_dict())
            return {
                "outcome": outcome,
                "progress": record.session.progress().as_dict(),
            }

    @app.post("/sessions/{session_id}/submit")
    def submit_session(session_id: str) -> dict:
        record = get_record(session_id)
        with record.lock:
            try:
                card = record.session.submit()
            except TaskError as exc:
                raise HTTPException(status_code=409, detail=exc.detail)
            record.action_log.append({"op": "submit"})
            return {"scorecard": card.as_dict()}

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
