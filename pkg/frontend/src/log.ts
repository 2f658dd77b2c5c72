/**
 * Interaction recording and replay.
 *
 * The reducer is pure, so a session is just the lens document plus the
 * ordered list of events; replaying that list rebuilds the exact final
 * state. Logs serialize to JSON for export and later replay.
 */

import { initialState, reduce } from './state.js';
import type { ViewerEvent, ViewerState } from './state.js';
import type { LensDocument } from './types.js';

export function replay(doc: LensDocument, events: ViewerEvent[]): ViewerState {
  let state = initialState(doc);
  for (const event of events) {
    state = reduce(state, event);
  }
  return state;
}

export function serializeLog(events: ViewerEvent[]): string {
  return JSON.stringify({ version: 1, events });
}

export function deserializeLog(text: string): ViewerEvent[] {
  const parsed = JSON.parse(text) as { version?: number; events?: ViewerEvent[] };
  if (parsed.version !== 1 || !Array.isArray(parsed.events)) {
    throw new Error('unsupported interaction log format');
  }
  return parsed.events;
}

/** A dispatcher that applies events and remembers them for export. */
export function createRecorder(doc: LensDocument) {
  const events: ViewerEvent[] = [];
  let state = initialState(doc);
  return {
    get state(): ViewerState {
      return state;
    },
    get events(): readonly ViewerEvent[] {
      return events;
    },
    dispatch(event: ViewerEvent): ViewerState {
      events.push(event);
      state = reduce(state, event);
      return state;
    },
  };
}
