// Live classification dashboard: explicit acknowledgment modal, then an SSE
// subscription feeding per-class counters (colored per event) and a rolling
// timeline. The buffer is bounded; counters track every event received.

import { ApiClient } from "./api";
import { escapeHtml } from "./catalog";
import { RingBuffer } from "./ring";
import type { Binding, BindingOutcome, TelemetryEvent } from "./types";

export const BUFFER_CAPACITY = 500;
export const TIMELINE_WINDOW = 60;

export interface EventSourceLike {
  onmessage: ((event: { data: string }) => void) | null;
  onerror: ((event: unknown) => void) | null;
  addEventListener(type: string, handler: (event: { data: string }) => void): void;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

const defaultFactory: EventSourceFactory = (url) =>
  new EventSource(url) as unknown as EventSourceLike;

export interface DashboardOptions {
  eventSourceFactory?: EventSourceFactory;
  retryBaseMs?: number;
  scheduler?: (fn: () => void, delayMs: number) => void;
}

export class RecipeDashboard {
  binding: Binding | null = null;
  buffer = new RingBuffer<TelemetryEvent>(BUFFER_CAPACITY);
  counters = new Map<string, { count: number; color: string }>();
  totalReceived = 0;
  connectionState: "idle" | "live" | "stale" = "idle";

  private root: HTMLElement | null = null;
  private source: EventSourceLike | null = null;
  private retryAttempt = 0;
  private readonly factory: EventSourceFactory;
  private readonly retryBaseMs: number;
  private readonly schedule: (fn: () => void, delayMs: number) => void;

  constructor(
    private readonly api: ApiClient,
    options: DashboardOptions = {},
  ) {
    this.factory = options.eventSourceFactory ?? defaultFactory;
    this.retryBaseMs = options.retryBaseMs ?? 1000;
    this.schedule = options.scheduler ?? ((fn, delay) => setTimeout(fn, delay));
  }

  mount(root: HTMLElement): void {
    this.root = root;
    root.innerHTML = `<div class="dashboard" data-testid="dashboard"><em>no binding yet</em></div>`;
  }

  private pane(): HTMLElement {
    return this.root!.querySelector("[data-testid=dashboard]")!;
  }

  /** Propose a binding and show the explicit acknowledgment modal. */
  async bindAndConfirm(recipeId: string, deviceIds: string[]): Promise<void> {
    const outcome = await this.api.proposeBinding(recipeId, deviceIds);
    this.renderOutcome(outcome);
  }

  renderOutcome(outcome: BindingOutcome): void {
    const pane = this.pane();
    if (outcome.kind === "missing") {
      pane.innerHTML = `
        <div class="report" data-testid="missing-report">
          <h3>no matching datapoints</h3>
          <ul>${outcome.missing
            .map((m) => `<li>role <code>${escapeHtml(m.role)}</code> needs ${escapeHtml(m.requiredType)}</li>`)
            .join("")}</ul>
        </div>`;
      return;
    }
    if (outcome.kind === "ambiguous") {
      pane.innerHTML = `
        <div class="report" data-testid="ambiguity-report">
          <h3>multiple candidate datapoints — narrow the device selection</h3>
          <ul>${Object.entries(outcome.candidates)
            .map(
              ([role, candidates]) =>
                `<li><code>${escapeHtml(role)}</code>: ${candidates
                  .map((c) => escapeHtml(`${c.deviceId}#${c.datapointRole}`))
                  .join(", ")}</li>`,
            )
            .join("")}</ul>
        </div>`;
      return;
    }
    this.binding = outcome;
    this.renderAckModal();
  }

  renderAckModal(): void {
    const binding = this.binding!;
    const assignments = Object.entries(binding.assignments)
      .map(
        ([role, assigned]) =>
          `<li><code>${escapeHtml(role)}</code> → ${assigned
            .map((a) => escapeHtml(`${a.deviceId} (${a.address})`))
            .join(", ")}</li>`,
      )
      .join("");
    this.pane().innerHTML = `
      <div class="modal" data-testid="ack-modal">
        <h3>acknowledge binding ${escapeHtml(binding.bindingId)}</h3>
        <p>the application can only run after you confirm this match:</p>
        <ul>${assignments}</ul>
        <button data-testid="ack-accept">accept</button>
        <button data-testid="ack-reject">reject</button>
      </div>`;
    this.pane()
      .querySelector("[data-testid=ack-accept]")!
      .addEventListener("click", () => void this.decide("accept"));
    this.pane()
      .querySelector("[data-testid=ack-reject]")!
      .addEventListener("click", () => void this.decide("reject"));
  }

  async decide(decision: "accept" | "reject"): Promise<void> {
    this.binding = await this.api.acknowledgeBinding(this.binding!.bindingId, decision);
    if (this.binding.status === "acknowledged") {
      this.openStream();
    } else {
      this.pane().innerHTML = `
        <div class="report" data-testid="rejected-note">
          binding rejected — the dashboard stays closed until a new binding is acknowledged
          <button data-testid="ack-reopen">propose again</button>
        </div>`;
    }
  }

  /** Open the dashboard for an acknowledged binding (refuses otherwise). */
  openStream(): void {
    const binding = this.binding;
    if (!binding || binding.status !== "acknowledged") {
      this.pane().innerHTML = `
        <div class="report" data-testid="ack-required">
          this binding is ${escapeHtml(binding?.status ?? "absent")} — acknowledge it before monitoring
        </div>`;
      return;
    }
    this.renderWidgets();
    this.connect();
  }

  private connect(): void {
    const binding = this.binding!;
    this.source?.close();
    const source = this.factory(this.api.streamUrl(binding.bindingId));
    this.source = source;
    const handler = (event: { data: string }) => {
      this.retryAttempt = 0;
      this.setConnectionState("live");
      this.receive(JSON.parse(event.data) as TelemetryEvent);
    };
    source.addEventListener("telemetry", handler);
    source.onmessage = handler;
    source.onerror = () => {
      this.setConnectionState("stale");
      source.close();
      const delay = this.retryBaseMs * 2 ** Math.min(this.retryAttempt, 5);
      this.retryAttempt += 1;
      this.schedule(() => this.connect(), delay);
    };
  }

  receive(event: TelemetryEvent): void {
    this.totalReceived += 1;
    this.buffer.push(event);
    const counter = this.counters.get(event.classLabel) ?? { count: 0, color: event.color };
    counter.count += 1;
    counter.color = event.color;
    this.counters.set(event.classLabel, counter);
    this.scheduleRender();
  }

  private renderQueued = false;

  /** Coalesce bursts: one DOM update per microtask, so a fast stream never
   * outruns the renderer. */
  private scheduleRender(): void {
    if (this.renderQueued) return;
    this.renderQueued = true;
    queueMicrotask(() => {
      this.renderQueued = false;
      this.renderData();
    });
  }

  close(): void {
    this.source?.close();
    this.source = null;
    this.setConnectionState("idle");
  }

  private setConnectionState(state: "idle" | "live" | "stale"): void {
    this.connectionState = state;
    const indicator = this.root?.querySelector("[data-testid=stream-state]");
    if (indicator) {
      indicator.textContent = state;
      indicator.className = `stream-state stream-${state}`;
    }
  }

  renderWidgets(): void {
    this.pane().innerHTML = `
      <div class="dashboard-live">
        <header>
          <h3>classification monitor</h3>
          <span class="stream-state" data-testid="stream-state">connecting</span>
        </header>
        <div class="counters" data-testid="counters"></div>
        <ol class="timeline" data-testid="timeline"></ol>
        <p class="totals">events received: <span data-testid="total-received">0</span>
           (buffer holds <span data-testid="buffer-size">0</span>)</p>
      </div>`;
    this.renderData();
  }

  renderData(): void {
    const counters = this.root?.querySelector("[data-testid=counters]");
    if (!counters) return;
    counters.innerHTML = [...this.counters.entries()]
      .sort(([a], [b]) => a.localeCompare(b))
      .map(
        ([label, { count, color }]) => `
        <div class="counter" data-testid="counter-${escapeHtml(label)}" style="border-color: ${escapeHtml(color)}">
          <span class="count">${count}</span>
          <span class="label">${escapeHtml(label)}</span>
        </div>`,
      )
      .join("");
    const timeline = this.root!.querySelector("[data-testid=timeline]")!;
    timeline.innerHTML = this.buffer
      .last(TIMELINE_WINDOW)
      .map(
        (event) => `
        <li style="color: ${escapeHtml(event.color)}">
          <time>${escapeHtml(event.ts)}</time>
          ${escapeHtml(event.classLabel)}
          <span class="confidence">${event.confidence}</span>
        </li>`,
      )
      .join("");
    this.root!.querySelector("[data-testid=total-received]")!.textContent = String(this.totalReceived);
    this.root!.querySelector("[data-testid=buffer-size]")!.textContent = String(this.buffer.length);
  }
}
