// Shapes copied from live service responses against the built-in catalog.

import type { SessionView, TaskInfo, ToolInfo, PartInfo } from '../src/api.js';
import type { CatalogSnapshot } from '../src/state.js';

export const TOOLS: ToolInfo[] = [
  { tool_id: 'W1', name: 'Ratchet wrench', kind: 'WRENCH', kit: ['S1', 'S2', 'E1'] },
  { tool_id: 'TW1', name: 'Torque wrench', kind: 'TORQUE_WRENCH', kit: ['S1', 'S2', 'E1'] },
  { tool_id: 'W2', name: 'Open-end wrench', kind: 'WRENCH', kit: [] },
  { tool_id: 'S1', name: '17mm socket', kind: 'SOCKET', kit: [] },
  { tool_id: 'S2', name: '14mm socket', kind: 'SOCKET', kit: [] },
  { tool_id: 'E1', name: 'Extension post', kind: 'EXTENSION', kit: [] },
];

export const PARTS: PartInfo[] = [
  {
    part_id: 'oil_drain_plug', name: 'Oil drain plug', tool_dependent: true,
    preconditions: [],
    wrench_condition: {
      wrench_id: 'W2', fix_wrench_id: null, extension_id: null, socket_id: null,
      need_extension: false, min_torque: 0, max_torque: 0,
    },
    screw_out_level: 'TWO_CM', custom_out_cm: null, auto_fix: true,
    disappear: { direction: [0, -1, 0], dist_cm: 10, duration_s: 1 },
  },
  {
    part_id: 'oil_filter', name: 'Oil filter', tool_dependent: false,
    preconditions: [], wrench_condition: null,
    screw_out_level: 'TWO_CM', custom_out_cm: null, auto_fix: false,
    disappear: { direction: [0, -1, 0], dist_cm: 15, duration_s: 1.5 },
  },
  {
    part_id: 'turbo_nut', name: 'Turbocharger nut', tool_dependent: true,
    preconditions: [],
    wrench_condition: {
      wrench_id: 'W1', fix_wrench_id: 'TW1', extension_id: null, socket_id: 'S1',
      need_extension: false, min_torque: 20, max_torque: 30,
    },
    screw_out_level: 'TWO_CM', custom_out_cm: null, auto_fix: false,
    disappear: { direction: [0, 0, 1], dist_cm: 5, duration_s: 0.5 },
  },
  {
    part_id: 'exhaust_manifold', name: 'Exhaust manifold', tool_dependent: true,
    preconditions: ['turbo_nut'],
    wrench_condition: {
      wrench_id: 'W1', fix_wrench_id: null, extension_id: 'E1', socket_id: 'S2',
      need_extension: true, min_torque: 0, max_torque: 0,
    },
    screw_out_level: 'TWO_CM', custom_out_cm: null, auto_fix: false,
    disappear: { direction: [1, 0, 0], dist_cm: 30, duration_s: 2 },
  },
  {
    part_id: 'heat_shield', name: 'Heat shield', tool_dependent: false,
    preconditions: ['exhaust_manifold'], wrench_condition: null,
    screw_out_level: 'TWO_CM', custom_out_cm: null, auto_fix: false,
    disappear: { direction: [0, 0, 1], dist_cm: 20, duration_s: 1 },
  },
];

export const TASKS: TaskInfo[] = [
  {
    task_id: 'engine_attachment_removal',
    task_name: 'Engine attachment removal',
    groups: [
      {
        group_name: 'Oil system',
        steps: [
          { step_name: 'Drain the oil', part_id: 'oil_drain_plug', action: 'REMOVE' },
          { step_name: 'Remove the oil filter', part_id: 'oil_filter', action: 'REMOVE' },
        ],
      },
      {
        group_name: 'Exhaust system',
        steps: [
          { step_name: 'Remove the turbocharger nut', part_id: 'turbo_nut', action: 'REMOVE' },
          { step_name: 'Remove the exhaust manifold', part_id: 'exhaust_manifold', action: 'REMOVE' },
          { step_name: 'Remove the heat shield', part_id: 'heat_shield', action: 'REMOVE' },
        ],
      },
    ],
  },
];

export const CATALOG: CatalogSnapshot = { tasks: TASKS, tools: TOOLS, parts: PARTS };

export const LEARNING_VIEW: SessionView = {
  session_id: 'a'.repeat(32),
  task_id: 'engine_attachment_removal',
  task_name: 'Engine attachment removal',
  mode: 'LEARNING',
  submitted: false,
  progress: {
    steps_total: 5,
    steps_done: 0,
    percent: 0.0,
    per_group: [
      { group_name: 'Oil system', done: 0, total: 2 },
      { group_name: 'Exhaust system', done: 0, total: 3 },
    ],
    current_score: null,
  },
  actions: [
    { op: 'combine', base: 'TW1', attachment: 'S1' },
    { op: 'combine', base: 'TW1', attachment: 'S2' },
    { op: 'combine', base: 'TW1', attachment: 'E1' },
    { op: 'combine', base: 'W1', attachment: 'S1' },
    { op: 'combine', base: 'W1', attachment: 'S2' },
    { op: 'combine', base: 'W1', attachment: 'E1' },
    { op: 'apply_tool', tool: ['W2'], part: 'oil_drain_plug' },
    { op: 'detach', part: 'oil_filter' },
  ],
  hint: {
    step_name: 'Drain the oil',
    part_id: 'oil_drain_plug',
    action: 'REMOVE',
    required_tool: ['W2'],
    torque: null,
  },
  scorecard: null,
};

/** Mid-session TRAINING view: first step done, one assembly built. */
export const TRAINING_VIEW: SessionView = {
  ...LEARNING_VIEW,
  mode: 'TRAINING',
  progress: {
    ...LEARNING_VIEW.progress,
    steps_done: 1,
    percent: 20.0,
    per_group: [
      { group_name: 'Oil system', done: 1, total: 2 },
      { group_name: 'Exhaust system', done: 0, total: 3 },
    ],
    current_score: 18,
  },
  actions: [
    { op: 'split', tool: ['W1', 'S1'] },
    { op: 'apply_tool', tool: ['W1', 'S1'], part: 'turbo_nut' },
    { op: 'detach', part: 'oil_drain_plug' },
    { op: 'detach', part: 'oil_filter' },
  ],
  hint: null,
};
