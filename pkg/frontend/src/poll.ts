// At most one request is in flight at a time; the poll loop and button
// handlers share the same gate so a click can never race a refresh.

export class SingleFlight {
  private busy = false;

  get inFlight(): boolean {
    return this.busy;
  }

  /** Run fn unless something is already in flight; returns null if skipped. */
  async run<T>(fn: () => Promise<T>): Promise<T | null> {
    if (this.busy) return null;
    this.busy = true;
    try {
      return await fn();
    } finally {
      this.busy = false;
    }
  }
}

export const POLL_INTERVAL_MS = 1000;

/** Keep the view within one poll of server truth. Returns a stop function. */
export function startPolling(tick: () => void, intervalMs: number = POLL_INTERVAL_MS): () => void {
  const timer = setInterval(tick, intervalMs);
  return () => clearInterval(timer);
}
