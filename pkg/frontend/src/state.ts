// View model and the pure helpers that derive it from service responses.
// The client never evaluates assembly rules; everything rendered comes
// straight from the last response.

import type {
  ActionRequest,
  Outcome,
  PartInfo,
  SessionView,
  TaskInfo,
  ToolInfo,
} from './api.js';

export type Screen = 'selector' | 'workbench' | 'scorecard';

export type Banner = {
  tone: 'ok' | 'error' | 'info';
  title: string;
  detail: string;
};

export type CatalogSnapshot = {
  tasks: TaskInfo[];
  tools: ToolInfo[];
  parts: PartInfo[];
};

export type ViewModel = {
  screen: Screen;
  catalog: CatalogSnapshot | null;
  sessionId: string | null;
  view: SessionView | null;
  banner: Banner | null;
  selectorError: string | null;
  busy: boolean;
};

export function initialModel(): ViewModel {
  return {
    screen: 'selector',
    catalog: null,
    sessionId: null,
    view: null,
    banner: null,
    selectorError: null,
    busy: false,
  };
}

export function bannerFor(outcome: Outcome): Banner {
  switch (outcome.kind) {
    case 'rejected': {
      const error = outcome.error;
      const violations = (error?.violations ?? [])
        .map((v) => `${v.code}: ${v.detail}`)
        .join('; ');
      return {
        tone: 'error',
        title: error?.code ?? 'REJECTED',
        detail: violations || error?.detail || 'action rejected',
      };
    }
    case 'step_completed':
      return {
        tone: 'ok',
        title: 'Step complete',
        detail: `Step ${(outcome.step_index ?? 0) + 1} done`,
      };
    case 'task_finished':
      return {
        tone: 'ok',
        title: 'Task finished',
        detail: 'All steps complete. Submit to get your score.',
      };
    case 'submitted':
      return { tone: 'ok', title: 'Submitted', detail: 'Session scored' };
    default:
      return { tone: 'info', title: 'Accepted', detail: 'Action accepted' };
  }
}

/** Apply actions the service currently offers for one part. */
export function applyActionsFor(view: SessionView, partId: string): ActionRequest[] {
  return view.actions.filter((a) => a.op === 'apply_tool' && a.part === partId);
}

/** Tool chains the student can pick from: everything the action list mentions. */
export function knownToolChains(view: SessionView, catalog: CatalogSnapshot): string[][] {
  const seen = new Map<string, string[]>();
  const keep = (chain: string[]) => {
    if (chain.length > 0) seen.set(chain.join('+'), chain);
  };
  for (const action of view.actions) {
    if (action.tool) keep(action.tool);
    if (action.op === 'combine' && action.base) keep([action.base]);
  }
  for (const tool of catalog.tools) {
    if (tool.kind === 'WRENCH' || tool.kind === 'TORQUE_WRENCH') keep([tool.tool_id]);
  }
  return [...seen.values()].sort((a, b) => a.join('+').localeCompare(b.join('+')));
}

/** The service-suggested tool chain for a part, if any apply action lists one. */
export function suggestedToolChain(view: SessionView, partId: string): string[] | null {
  const first = applyActionsFor(view, partId)[0];
  return first?.tool ?? null;
}

/** Torque entry is only offered when the part's condition has a torque range. */
export function torqueRequired(part: PartInfo): boolean {
  return (part.wrench_condition?.max_torque ?? 0) > 0;
}

export function suggestedTorque(view: SessionView, partId: string): number | null {
  const withTorque = applyActionsFor(view, partId).find((a) => a.torque !== undefined);
  return withTorque?.torque ?? null;
}
