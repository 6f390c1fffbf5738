// Workbench screen: progress header (large-screen analog), toolbox and
// parts panels, hint panel, outcome banner, and the submitted scorecard.

import type { ActionRequest, ScoreCard, SessionView } from './api.js';
import { button, el, option } from './dom.js';
import {
  Banner,
  CatalogSnapshot,
  knownToolChains,
  suggestedToolChain,
  suggestedTorque,
  torqueRequired,
} from './state.js';

export type WorkbenchHandlers = {
  onAction: (action: ActionRequest) => void;
  onSubmit: () => void;
};

function chainLabel(chain: string[]): string {
  return chain.join('+');
}

function offered(view: SessionView, probe: Partial<ActionRequest>): boolean {
  return view.actions.some(
    (a) =>
      a.op === probe.op &&
      (probe.part === undefined || a.part === probe.part) &&
      (probe.base === undefined || a.base === probe.base),
  );
}

function renderHeader(view: SessionView, handlers: WorkbenchHandlers, busy: boolean): HTMLElement {
  const header = el('header', 'progress-board');
  const title = el('div', 'board-title');
  title.appendChild(el('h1', undefined, view.task_name));
  title.appendChild(el('span', 'mode-chip', view.mode));
  header.appendChild(title);

  const progress = view.progress;
  const track = el('div', 'progress-track');
  const bar = el('div', 'progress-bar');
  bar.id = 'progress-bar';
  bar.style.width = `${progress.percent}%`;
  track.appendChild(bar);
  header.appendChild(track);

  const counters = el('div', 'counters');
  const steps = el('span', 'steps-counter',
    `${progress.steps_done}/${progress.steps_total} steps`);
  steps.id = 'steps-counter';
  counters.appendChild(steps);
  if (progress.current_score !== null) {
    const score = el('span', 'score', String(progress.current_score));
    score.id = 'score-value';
    counters.appendChild(el('span', 'score-label', 'score'));
    counters.appendChild(score);
  }
  for (const group of progress.per_group) {
    counters.appendChild(
      el('span', 'group-counter', `${group.group_name} ${group.done}/${group.total}`),
    );
  }
  header.appendChild(counters);

  const submit = button('Submit session', 'primary submit', handlers.onSubmit);
  submit.id = 'submit-session';
  submit.disabled = busy;
  if (progress.percent === 100) submit.classList.add('ready');
  header.appendChild(submit);
  return header;
}

function renderBanner(banner: Banner | null): HTMLElement {
  const node = el('div', 'banner');
  node.id = 'banner';
  if (banner) {
    node.classList.add(`banner-${banner.tone}`);
    node.appendChild(el('strong', undefined, banner.title));
    node.appendChild(el('span', undefined, ` ${banner.detail}`));
  } else {
    node.classList.add('banner-empty');
  }
  node.setAttribute('role', 'status');
  return node;
}

function renderHint(view: SessionView): HTMLElement | null {
  if (!view.hint) return null;
  const hint = view.hint;
  const panel = el('aside', 'panel hint-panel');
  panel.id = 'hint-panel';
  panel.appendChild(el('h2', undefined, 'Next step'));
  panel.appendChild(el('p', 'hint-step', `${hint.step_name} (${hint.action} ${hint.part_id})`));
  if (hint.required_tool) {
    panel.appendChild(el('p', 'hint-tool', `Tool: ${chainLabel(hint.required_tool)}`));
  }
  if (hint.torque !== null) {
    panel.appendChild(el('p', 'hint-torque', `Torque: ${hint.torque}`));
  }
  return panel;
}

function renderToolbox(view: SessionView, handlers: WorkbenchHandlers, busy: boolean): HTMLElement {
  const panel = el('section', 'panel toolbox-panel');
  panel.id = 'toolbox-panel';
  panel.appendChild(el('h2', undefined, 'Toolbox'));

  const list = el('div', 'tool-actions');
  const offers = view.actions.filter((a) => a.op === 'combine' || a.op === 'split');
  if (offers.length === 0) {
    list.appendChild(el('p', 'empty', 'No tool moves available.'));
  }
  offers.forEach((action, index) => {
    const label = action.op === 'combine'
      ? `Combine ${action.base} + ${action.attachment}`
      : `Split ${chainLabel(action.tool ?? [])}`;
    const node = button(label, `tool-action ${action.op}`, () => handlers.onAction(action));
    node.dataset.actionIndex = String(index);
    node.disabled = busy;
    list.appendChild(node);
  });
  panel.appendChild(list);
  return panel;
}

function renderPartRow(
  view: SessionView,
  catalog: CatalogSnapshot,
  partId: string,
  handlers: WorkbenchHandlers,
  busy: boolean,
): HTMLElement {
  const part = catalog.parts.find((p) => p.part_id === partId);
  const row = el('div', 'part-row');
  row.dataset.part = partId;
  if (!part) return row;

  const head = el('div', 'part-head');
  head.appendChild(el('span', 'part-name', part.name));
  head.appendChild(el('code', 'part-id', part.part_id));
  row.appendChild(head);

  const controls = el('div', 'part-controls');

  const detach = button('Detach', 'detach', () =>
    handlers.onAction({ op: 'detach', part: partId }));
  if (offered(view, { op: 'detach', part: partId })) detach.classList.add('suggested');
  detach.disabled = busy;
  controls.appendChild(detach);

  const attach = button('Attach', 'attach', () =>
    handlers.onAction({ op: 'attach', part: partId }));
  if (offered(view, { op: 'attach', part: partId })) attach.classList.add('suggested');
  attach.disabled = busy;
  controls.appendChild(attach);

  if (part.tool_dependent) {
    const toolSelect = el('select', 'tool-select');
    for (const chain of knownToolChains(view, catalog)) {
      toolSelect.appendChild(option(chainLabel(chain)));
    }
    const suggested = suggestedToolChain(view, partId);
    if (suggested) toolSelect.value = chainLabel(suggested);
    controls.appendChild(toolSelect);

    let torqueInput: HTMLInputElement | null = null;
    if (torqueRequired(part)) {
      torqueInput = el('input', 'torque-input');
      torqueInput.type = 'number';
      torqueInput.placeholder = 'torque';
      const torque = suggestedTorque(view, partId) ?? view.hint?.torque ?? null;
      if (torque !== null) torqueInput.value = String(torque);
      controls.appendChild(torqueInput);
    }

    const apply = button('Apply tool', 'apply-button', () => {
      const action: ActionRequest = {
        op: 'apply_tool',
        tool: toolSelect.value.split('+'),
        part: partId,
      };
      if (torqueInput && torqueInput.value !== '') {
        action.torque = Number(torqueInput.value);
      }
      handlers.onAction(action);
    });
    if (offered(view, { op: 'apply_tool', part: partId })) apply.classList.add('suggested');
    apply.disabled = busy;
    controls.appendChild(apply);
  }

  row.appendChild(controls);
  return row;
}

function renderParts(
  view: SessionView,
  catalog: CatalogSnapshot,
  handlers: WorkbenchHandlers,
  busy: boolean,
): HTMLElement {
  const panel = el('section', 'panel parts-panel');
  panel.id = 'parts-panel';
  panel.appendChild(el('h2', undefined, 'Parts'));
  for (const part of catalog.parts) {
    panel.appendChild(renderPartRow(view, catalog, part.part_id, handlers, busy));
  }
  return panel;
}

function renderPlan(view: SessionView, catalog: CatalogSnapshot): HTMLElement {
  const panel = el('section', 'panel plan-panel');
  panel.id = 'plan-panel';
  panel.appendChild(el('h2', undefined, 'Plan'));
  const task = catalog.tasks.find((t) => t.task_id === view.task_id);
  if (!task) return panel;
  view.progress.per_group.forEach((groupProgress, index) => {
    const group = task.groups[index];
    if (!group) return;
    const block = el('div', 'plan-group');
    block.appendChild(el('h3', undefined,
      `${group.group_name} (${groupProgress.done}/${groupProgress.total})`));
    const list = el('ol');
    for (const step of group.steps) {
      list.appendChild(el('li', 'plan-step', `${step.step_name} [${step.action} ${step.part_id}]`));
    }
    block.appendChild(list);
    panel.appendChild(block);
  });
  return panel;
}

export function renderWorkbench(
  view: SessionView,
  catalog: CatalogSnapshot,
  banner: Banner | null,
  busy: boolean,
  handlers: WorkbenchHandlers,
): HTMLElement {
  const screen = el('section', 'screen workbench');
  screen.appendChild(renderHeader(view, handlers, busy));
  screen.appendChild(renderBanner(banner));
  const hint = renderHint(view);
  if (hint) screen.appendChild(hint);
  const panels = el('div', 'panels');
  panels.appendChild(renderToolbox(view, handlers, busy));
  panels.appendChild(renderParts(view, catalog, handlers, busy));
  panels.appendChild(renderPlan(view, catalog));
  screen.appendChild(panels);
  return screen;
}

export function renderScorecard(card: ScoreCard): HTMLElement {
  const screen = el('section', 'screen scorecard');
  screen.appendChild(el('h1', undefined, 'Session scored'));

  const board = el('dl', 'scorecard-board');
  const addField = (name: string, value: string) => {
    board.appendChild(el('dt', undefined, name.replace('_', ' ')));
    const dd = el('dd', undefined, value);
    dd.dataset.field = name;
    board.appendChild(dd);
  };
  addField('final_score', String(card.final_score));
  addField('steps_done', String(card.steps_done));
  addField('duration_s', String(card.duration_s));
  screen.appendChild(board);

  const errors = el('div', 'error-breakdown');
  errors.appendChild(el('h2', undefined, 'Errors'));
  const entries = Object.entries(card.errors);
  if (entries.length === 0) {
    errors.appendChild(el('p', 'empty', 'No errors recorded.'));
  } else {
    const list = el('ul');
    for (const [kind, count] of entries) {
      const item = el('li', undefined, `${kind}: ${count}`);
      item.dataset.errorKind = kind;
      list.appendChild(item);
    }
    errors.appendChild(list);
  }
  screen.appendChild(errors);

  const raw = el('details', 'raw-card');
  raw.appendChild(el('summary', undefined, 'Raw scorecard'));
  const pre = el('pre', undefined, JSON.stringify(card, null, 2));
  pre.id = 'scorecard-json';
  raw.appendChild(pre);
  screen.appendChild(raw);
  return screen;
}
