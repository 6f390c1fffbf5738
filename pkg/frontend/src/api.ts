// Typed client for the session service. Every shape here mirrors the JSON
// the service emits; the client adds no interpretation of its own.

export type ModeName = 'LEARNING' | 'TRAINING' | 'EXAM';

export type GroupProgress = {
  group_name: string;
  done: number;
  total: number;
};

export type ProgressReport = {
  steps_total: number;
  steps_done: number;
  percent: number;
  per_group: GroupProgress[];
  current_score: number | null;
};

export type WrenchCondition = {
  wrench_id: string;
  fix_wrench_id: string | null;
  extension_id: string | null;
  socket_id: string | null;
  need_extension: boolean;
  min_torque: number;
  max_torque: number;
};

export type PartInfo = {
  part_id: string;
  name: string;
  tool_dependent: boolean;
  preconditions: string[];
  wrench_condition: WrenchCondition | null;
  screw_out_level: string;
  custom_out_cm: number | null;
  auto_fix: boolean;
  disappear: { direction: number[]; dist_cm: number; duration_s: number };
};

export type ToolInfo = {
  tool_id: string;
  name: string;
  kind: string;
  kit: string[];
};

export type StepInfo = { step_name: string; part_id: string; action: string };
export type TaskGroup = { group_name: string; steps: StepInfo[] };
export type TaskInfo = { task_id: string; task_name: string; groups: TaskGroup[] };

export type ActionRequest = {
  op: 'combine' | 'split' | 'apply_tool' | 'detach' | 'attach' | 'submit';
  base?: string;
  attachment?: string;
  tool?: string[];
  part?: string;
  torque?: number;
};

export type EngineRejection = {
  code: string;
  detail: string;
  blocking?: string[];
  violations?: { code: string; detail: string }[];
};

export type Outcome = {
  kind: 'accepted' | 'rejected' | 'step_completed' | 'task_finished' | 'submitted';
  step_index?: number;
  error?: EngineRejection;
  scorecard?: ScoreCard;
};

export type Hint = {
  step_name: string;
  part_id: string;
  action: string;
  required_tool: string[] | null;
  torque: number | null;
};

export type ScoreCard = {
  final_score: number;
  steps_done: number;
  errors: Record<string, number>;
  duration_s: number;
};

export type SessionView = {
  session_id: string;
  task_id: string;
  task_name: string;
  mode: ModeName;
  submitted: boolean;
  progress: ProgressReport;
  actions: ActionRequest[];
  hint: Hint | null;
  scorecard: ScoreCard | null;
};

export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** The service surface the app depends on; tests substitute fakes. */
export type ApiClient = Pick<
  Api,
  'getTasks' | 'getTools' | 'getParts' | 'createSession' | 'getSession' | 'postAction' | 'submit'
>;

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === 'string') detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export class Api {
  constructor(readonly baseUrl: string = '') {}

  getTasks(): Promise<TaskInfo[]> {
    return this.get('/catalog/tasks');
  }

  getTools(): Promise<ToolInfo[]> {
    return this.get('/catalog/tools');
  }

  getParts(): Promise<PartInfo[]> {
    return this.get('/catalog/parts');
  }

  createSession(taskId: string, mode: ModeName): Promise<{ session_id: string; progress: ProgressReport }> {
    return this.post('/sessions', { task_id: taskId, mode });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.get(`/sessions/${sessionId}`);
  }

  postAction(sessionId: string, action: ActionRequest): Promise<{ outcome: Outcome; progress: ProgressReport }> {
    return this.post(`/sessions/${sessionId}/actions`, action);
  }

  submit(sessionId: string): Promise<{ scorecard: ScoreCard }> {
    return this.post(`/sessions/${sessionId}/submit`, {});
  }

  private async get<T>(path: string): Promise<T> {
    return asJson<T>(await fetch(this.baseUrl + path));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    return asJson<T>(await fetch(this.baseUrl + path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    }));
  }
}
