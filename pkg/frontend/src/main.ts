// App controller: owns the view model, routes between screens, and keeps
// the workbench within one poll of server truth.

import { Api, ApiError, type ActionRequest, type ApiClient, type ModeName } from './api.js';
import { SingleFlight, startPolling } from './poll.js';
import { bannerFor, initialModel, type ViewModel } from './state.js';
import { renderSelector } from './selector.js';
import { renderScorecard, renderWorkbench } from './workbench.js';

function describeError(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  return 'Service unreachable. Is the session service running?';
}

export class App {
  model: ViewModel = initialModel();
  private readonly gate = new SingleFlight();
  private stopPolling: (() => void) | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly pollIntervalMs: number = 1000,
  ) {}

  async boot(): Promise<void> {
    try {
      const [tasks, tools, parts] = await Promise.all([
        this.api.getTasks(),
        this.api.getTools(),
        this.api.getParts(),
      ]);
      this.model.catalog = { tasks, tools, parts };
      this.model.selectorError = null;
    } catch (error) {
      this.model.selectorError = describeError(error);
    }
    this.render();
  }

  async startSession(taskId: string, mode: ModeName): Promise<void> {
    await this.gate.run(async () => {
      try {
        const created = await this.api.createSession(taskId, mode);
        this.model.sessionId = created.session_id;
        this.model.view = await this.api.getSession(created.session_id);
        this.model.screen = 'workbench';
        this.model.banner = null;
        this.model.selectorError = null;
      } catch (error) {
        this.model.selectorError = describeError(error);
      }
    });
    this.render();
  }

  async act(action: ActionRequest): Promise<void> {
    const sessionId = this.model.sessionId;
    if (!sessionId) return;
    const ran = await this.gate.run(async () => {
      try {
        const result = await this.api.postAction(sessionId, action);
        this.model.banner = bannerFor(result.outcome);
        this.model.view = await this.api.getSession(sessionId);
      } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
          await this.loadScorecard(sessionId);
          return;
        }
        this.model.banner = { tone: 'error', title: 'Request failed', detail: describeError(error) };
      }
    });
    if (ran !== null) this.render();
  }

  async submitSession(): Promise<void> {
    const sessionId = this.model.sessionId;
    if (!sessionId) return;
    const ran = await this.gate.run(async () => {
      try {
        await this.api.submit(sessionId);
      } catch (error) {
        if (!(error instanceof ApiError && error.status === 409)) {
          this.model.banner = { tone: 'error', title: 'Submit failed', detail: describeError(error) };
          return;
        }
        // already submitted: fall through to the scorecard
      }
      await this.loadScorecard(sessionId);
    });
    if (ran !== null) this.render();
  }

  private async loadScorecard(sessionId: string): Promise<void> {
    this.model.view = await this.api.getSession(sessionId);
    if (this.model.view.scorecard) this.model.screen = 'scorecard';
  }

  /** Poll tick: refresh the workbench unless a request is already in flight. */
  async refresh(): Promise<void> {
    if (this.model.screen !== 'workbench' || !this.model.sessionId) return;
    const sessionId = this.model.sessionId;
    let view;
    try {
      view = await this.gate.run(() => this.api.getSession(sessionId));
    } catch {
      return; // missed poll; the next tick retries
    }
    if (view && JSON.stringify(view) !== JSON.stringify(this.model.view)) {
      this.model.view = view;
      this.render();
    }
  }

  render(): void {
    this.root.innerHTML = '';
    const { model } = this;
    if (model.screen === 'selector' || !model.catalog || !model.view) {
      this.root.appendChild(renderSelector(model.catalog?.tasks ?? [], model.selectorError, {
        onStart: (taskId, mode) => void this.startSession(taskId, mode),
        onRetry: () => void this.boot(),
      }));
    } else if (model.screen === 'workbench') {
      this.root.appendChild(renderWorkbench(model.view, model.catalog, model.banner,
        this.gate.inFlight, {
          onAction: (action) => void this.act(action),
          onSubmit: () => void this.submitSession(),
        }));
    } else {
      const card = model.view.scorecard;
      if (card) this.root.appendChild(renderScorecard(card));
    }
    this.syncPolling();
  }

  private syncPolling(): void {
    const shouldPoll = this.model.screen === 'workbench';
    if (shouldPoll && !this.stopPolling) {
      this.stopPolling = startPolling(() => void this.refresh(), this.pollIntervalMs);
    } else if (!shouldPoll && this.stopPolling) {
      this.stopPolling();
      this.stopPolling = null;
    }
  }
}

const mount = typeof document !== 'undefined' ? document.getElementById('app') : null;
if (mount) {
  const app = new App(mount, new Api(''));
  void app.boot();
}
