// Task and mode selection screen: the entry point of every session.

import type { ModeName, TaskInfo } from './api.js';
import { button, el, option } from './dom.js';

export type SelectorHandlers = {
  onStart: (taskId: string, mode: ModeName) => void;
  onRetry?: () => void;
};

const MODES: { name: ModeName; blurb: string }[] = [
  { name: 'LEARNING', blurb: 'step hints shown, score hidden' },
  { name: 'TRAINING', blurb: 'live score shown, no hints' },
  { name: 'EXAM', blurb: 'nothing shown until submit' },
];

function stepCount(task: TaskInfo): number {
  return task.groups.reduce((n, g) => n + g.steps.length, 0);
}

export function renderSelector(
  tasks: TaskInfo[],
  error: string | null,
  handlers: SelectorHandlers,
): HTMLElement {
  const screen = el('section', 'screen selector');
  screen.appendChild(el('h1', undefined, 'Engine Workbench'));
  screen.appendChild(el('p', 'lede', 'Pick a task and a mode to start a session.'));

  if (error) {
    const banner = el('div', 'banner banner-error', error);
    banner.id = 'selector-error';
    screen.appendChild(banner);
    if (handlers.onRetry) {
      const retry = button('Retry', 'retry', handlers.onRetry);
      retry.id = 'retry-boot';
      screen.appendChild(retry);
    }
  }

  const form = el('form', 'selector-form');
  form.addEventListener('submit', (event) => event.preventDefault());

  const taskLabel = el('label', undefined, 'Task');
  const taskSelect = el('select');
  taskSelect.id = 'task-select';
  for (const task of tasks) {
    taskSelect.appendChild(
      option(task.task_id, `${task.task_name} (${stepCount(task)} steps)`),
    );
  }
  taskLabel.appendChild(taskSelect);
  form.appendChild(taskLabel);

  const modeSet = el('fieldset', 'mode-set');
  modeSet.appendChild(el('legend', undefined, 'Mode'));
  for (const mode of MODES) {
    const label = el('label', 'mode-option');
    const radio = el('input');
    radio.type = 'radio';
    radio.name = 'mode';
    radio.value = mode.name;
    if (mode.name === 'LEARNING') radio.checked = true;
    label.appendChild(radio);
    label.appendChild(el('span', 'mode-name', mode.name));
    label.appendChild(el('span', 'mode-blurb', mode.blurb));
    modeSet.appendChild(label);
  }
  form.appendChild(modeSet);

  const start = button('Start session', 'primary', () => {
    const checked = form.querySelector<HTMLInputElement>('input[name=mode]:checked');
    handlers.onStart(taskSelect.value, (checked?.value ?? 'LEARNING') as ModeName);
  });
  start.id = 'start-session';
  start.disabled = tasks.length === 0;
  form.appendChild(start);

  screen.appendChild(form);
  return screen;
}
