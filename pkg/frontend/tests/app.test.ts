import { beforeEach, describe, expect, it } from 'vitest';

import type {
  ActionRequest,
  ApiClient,
  ModeName,
  Outcome,
  ProgressReport,
  ScoreCard,
  SessionView,
} from '../src/api.js';
import { ApiError } from '../src/api.js';
import { App } from '../src/main.js';
import { CATALOG, LEARNING_VIEW, TRAINING_VIEW } from './fixtures.js';

const CARD: ScoreCard = {
  final_score: 18,
  steps_done: 1,
  errors: { WRENCH_CONDITION_FAILED: 1 },
  duration_s: 4,
};

/** Scripted stand-in for the session service. */
class FakeApi implements ApiClient {
  bootFailures = 0;
  view: SessionView = LEARNING_VIEW;
  nextOutcome: Outcome = { kind: 'accepted' };
  nextActionError: ApiError | null = null;
  submitError: ApiError | null = null;
  posted: ActionRequest[] = [];
  getSessionCalls = 0;

  private catalogCall<T>(value: T): Promise<T> {
    if (this.bootFailures > 0) {
      this.bootFailures -= 1;
      return Promise.reject(new TypeError('fetch failed'));
    }
    return Promise.resolve(value);
  }

  getTasks() {
    return this.catalogCall(CATALOG.tasks);
  }

  getTools() {
    return this.catalogCall(CATALOG.tools);
  }

  getParts() {
    return this.catalogCall(CATALOG.parts);
  }

  createSession(taskId: string, mode: ModeName): Promise<{ session_id: string; progress: ProgressReport }> {
    this.view = { ...this.view, task_id: taskId, mode };
    return Promise.resolve({ session_id: this.view.session_id, progress: this.view.progress });
  }

  getSession(_sessionId: string): Promise<SessionView> {
    this.getSessionCalls += 1;
    return Promise.resolve(this.view);
  }

  postAction(
    _sessionId: string,
    action: ActionRequest,
  ): Promise<{ outcome: Outcome; progress: ProgressReport }> {
    if (this.nextActionError) return Promise.reject(this.nextActionError);
    this.posted.push(action);
    return Promise.resolve({ outcome: this.nextOutcome, progress: this.view.progress });
  }

  submit(_sessionId: string): Promise<{ scorecard: ScoreCard }> {
    if (this.submitError) return Promise.reject(this.submitError);
    this.view = { ...this.view, submitted: true, scorecard: CARD };
    return Promise.resolve({ scorecard: CARD });
  }
}

let root: HTMLElement;
let api: FakeApi;
let app: App;

beforeEach(() => {
  document.body.innerHTML = '<div id="root"></div>';
  root = document.getElementById('root')!;
  api = new FakeApi();
  app = new App(root, api, 60_000);
});

async function enterWorkbench(): Promise<void> {
  await app.boot();
  await app.startSession('engine_attachment_removal', 'LEARNING');
}

describe('boot', () => {
  it('loads the catalog and shows the selector', async () => {
    await app.boot();
    expect(root.querySelector('#task-select option')).not.toBeNull();
    expect(root.querySelector('#selector-error')).toBeNull();
  });

  it('surfaces a boot failure and recovers on retry', async () => {
    api.bootFailures = 3;
    await app.boot();
    expect(root.querySelector('#selector-error')!.textContent).toContain('unreachable');

    root.querySelector<HTMLButtonElement>('#retry-boot')!.click();
    await Promise.resolve();
    await new Promise((resolve) => setTimeout(resolve, 0));
    expect(root.querySelector('#selector-error')).toBeNull();
    expect(root.querySelector('#task-select option')).not.toBeNull();
  });
});

describe('session lifecycle', () => {
  it('moves to the workbench after starting a session', async () => {
    await enterWorkbench();
    expect(root.querySelector('.screen.workbench')).not.toBeNull();
    expect(app.model.sessionId).toBe(LEARNING_VIEW.session_id);
  });

  it('posts actions and shows the outcome banner', async () => {
    await enterWorkbench();
    api.nextOutcome = { kind: 'step_completed', step_index: 0 };
    api.view = TRAINING_VIEW;

    await app.act({ op: 'apply_tool', tool: ['W2'], part: 'oil_drain_plug' });

    expect(api.posted).toEqual([{ op: 'apply_tool', tool: ['W2'], part: 'oil_drain_plug' }]);
    expect(root.querySelector('#banner')!.textContent).toContain('Step 1 done');
    expect(root.querySelector('#score-value')!.textContent).toBe('18');
  });

  it('shows rejection banners without leaving the workbench', async () => {
    await enterWorkbench();
    api.nextOutcome = {
      kind: 'rejected',
      error: { code: 'WRENCH_CONDITION_FAILED', detail: 'wrong tool' },
    };

    await app.act({ op: 'apply_tool', tool: ['W2'], part: 'turbo_nut' });

    const banner = root.querySelector('#banner')!;
    expect(banner.classList.contains('banner-error')).toBe(true);
    expect(banner.textContent).toContain('WRENCH_CONDITION_FAILED');
    expect(root.querySelector('.screen.workbench')).not.toBeNull();
  });

  it('flags a failed request without crashing the screen', async () => {
    await enterWorkbench();
    api.nextActionError = new ApiError(400, 'op must be one of combine, split, ...');

    await app.act({ op: 'detach', part: 'oil_filter' });

    expect(root.querySelector('#banner')!.textContent).toContain('Request failed');
  });

  it('jumps to the scorecard when acting on a submitted session', async () => {
    await enterWorkbench();
    api.nextActionError = new ApiError(409, 'session already submitted');
    api.view = { ...api.view, submitted: true, scorecard: CARD };

    await app.act({ op: 'detach', part: 'oil_filter' });

    expect(root.querySelector('.screen.scorecard')).not.toBeNull();
  });

  it('submits and renders the scorecard screen', async () => {
    await enterWorkbench();
    await app.submitSession();

    expect(root.querySelector('.screen.scorecard')).not.toBeNull();
    expect(root.querySelector('[data-field="final_score"]')!.textContent).toBe('18');
    const raw = JSON.parse(root.querySelector('#scorecard-json')!.textContent ?? '');
    expect(raw).toEqual(CARD);
  });

  it('keeps the workbench and reports submit failures other than 409', async () => {
    await enterWorkbench();
    api.submitError = new ApiError(500, 'snapshot disk full');

    await app.submitSession();

    expect(root.querySelector('.screen.workbench')).not.toBeNull();
    expect(root.querySelector('#banner')!.textContent).toContain('Submit failed');
  });
});

describe('refresh', () => {
  it('re-renders only when the server view changed', async () => {
    await enterWorkbench();
    const before = root.innerHTML;

    await app.refresh();
    expect(root.innerHTML).toBe(before);

    api.view = TRAINING_VIEW;
    await app.refresh();
    expect(root.querySelector('#score-value')!.textContent).toBe('18');
  });

  it('does nothing outside the workbench', async () => {
    await app.boot();
    const calls = api.getSessionCalls;
    await app.refresh();
    expect(api.getSessionCalls).toBe(calls);
  });
});
