/**
 * Session controller: polls the service, rebuilds the view-model, and turns
 * plot clicks into posted suggestions. Rendering and the HTTP client are
 * injected, so the control flow is testable without a browser.
 */

import { ApiError, type SessionApi, type SessionDto } from "./api.js";
import { screenToDomain, type ScreenPoint } from "./transform.js";
import { frameFor, renderScatterSvg, type RenderOptions } from "./render.js";
import {
  buildViewModel,
  clickToDomainPoint,
  defaultAxes,
  type AxisSelection,
  type SessionViewModel,
} from "./viewModel.js";

export const POLL_INTERVAL_MS = 1000;

export interface ControllerCallbacks {
  /** Called with fresh markup whenever server state changes. */
  onRender: (svg: string, vm: SessionViewModel) => void;
  /** Transient fetch failure: show a retry banner, keep last good state. */
  onFetchError: (message: string) => void;
  /** Server rejected an action; the message is the server's, verbatim. */
  onRejected: (message: string) => void;
  /** Numeric confirmation before a suggestion is posted. */
  confirmSuggestion: (x: number[]) => boolean;
}

export class SessionController {
  private lastGood: SessionDto | null = null;
  axes: AxisSelection | null = null;

  constructor(
    private readonly api: SessionApi,
    private readonly sessionId: string,
    private readonly renderOpts: RenderOptions,
    private readonly callbacks: ControllerCallbacks,
  ) {}

  get session(): SessionDto | null {
    return this.lastGood;
  }

  /** One poll tick; safe to call on an interval. */
  async refresh(): Promise<void> {
    let session: SessionDto;
    try {
      session = await this.api.getSession(this.sessionId);
    } catch (err) {
      // no state loss: the last good snapshot stays rendered
      this.callbacks.onFetchError(err instanceof Error ? err.message : String(err));
      return;
    }
    if (
      this.lastGood !== null &&
      this.lastGood.updated === session.updated &&
      this.lastGood.phase === session.phase
    ) {
      return; // unchanged snapshot; skip the re-render
    }
    this.lastGood = session;
    if (this.axes === null || this.axes.fixed.length !== session.dim) {
      this.axes = defaultAxes(session);
    }
    const vm = buildViewModel(session, this.axes);
    this.callbacks.onRender(renderScatterSvg(vm, this.renderOpts), vm);
  }

  /**
   * Handle a click at plot pixel coordinates. Returns the posted point, or
   * null when the click was a no-op (wrong phase, declined, out of bounds,
   * or rejected by the server).
   */
  async handleClick(p: ScreenPoint): Promise<number[] | null> {
    const session = this.lastGood;
    if (session === null || this.axes === null) return null;
    if (session.phase !== "awaiting_human") {
      return null; // phase guard: clicking while waiting is a no-op
    }
    const vm = buildViewModel(session, this.axes);
    const frame = frameFor(vm, this.renderOpts);
    const [cx, cy] = screenToDomain(frame, p);
    // out-of-bounds clicks are posted anyway: the server is the authority
    // and its per-dimension rejection is surfaced verbatim
    const x = clickToDomainPoint(session, this.axes, cx, cy);
    if (!this.callbacks.confirmSuggestion(x)) return null;
    try {
      this.lastGood = await this.api.postSuggestion(this.sessionId, x);
    } catch (err) {
      if (err instanceof ApiError) {
        this.callbacks.onRejected(err.detail);
        return null;
      }
      this.callbacks.onFetchError(err instanceof Error ? err.message : String(err));
      return null;
    }
    const nextVm = buildViewModel(this.lastGood, this.axes);
    this.callbacks.onRender(renderScatterSvg(nextVm, this.renderOpts), nextVm);
    return x;
  }

  /** Run the next batch (machine sessions, or after a posted suggestion). */
  async advance(): Promise<boolean> {
    try {
      await this.api.advance(this.sessionId);
    } catch (err) {
      if (err instanceof ApiError) {
        this.callbacks.onRejected(err.detail);
        return false;
      }
      this.callbacks.onFetchError(err instanceof Error ? err.message : String(err));
      return false;
    }
    await this.refresh();
    return true;
  }
}

/** Wire the controller into a live page; returns a stop function. */
export function mount(
  container: HTMLElement,
  controller: SessionController,
): () => void {
  const onClick = (event: MouseEvent) => {
    const svg = container.querySelector("svg");
    if (svg === null) return;
    const rect = svg.getBoundingClientRect();
    void controller.handleClick({
      px: event.clientX - rect.left,
      py: event.clientY - rect.top,
    });
  };
  container.addEventListener("click", onClick);
  void controller.refresh();
  const timer = setInterval(() => void controller.refresh(), POLL_INTERVAL_MS);
  return () => {
    clearInterval(timer);
    container.removeEventListener("click", onClick);
  };
}
