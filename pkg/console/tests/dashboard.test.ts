// Dashboard: acknowledgment gate, bounded buffer, cumulative counters,
// reconnect with backoff and a stale indicator.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { BUFFER_CAPACITY, RecipeDashboard } from "../src/dashboard";
import { RingBuffer } from "../src/ring";
import type { Binding, TelemetryEvent } from "../src/types";
import { FakeEventSource, mockFetch } from "./helpers";

const PROPOSED: Binding = {
  kind: "binding",
  bindingId: "binding-0001",
  recipeId: "classification-monitor",
  assignments: {
    classification: [
      { deviceId: "device_npu_01", datapointRole: "classification_result", address: "opc/1" },
    ],
  },
  status: "proposed",
};

function tick(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function event(label: string, index = 0): TelemetryEvent {
  return {
    ts: `2026-01-01T00:00:${String(index).padStart(2, "0")}.000Z`,
    classLabel: label,
    confidence: 0.9,
    color: label === "red_workpiece" ? "#d64545" : "#2b2b2b",
  };
}

function makeDashboard() {
  FakeEventSource.instances = [];
  const scheduled: { fn: () => void; delay: number }[] = [];
  const fetchFn = mockFetch({
    "POST /recipes/classification-monitor/bindings": () => ({ body: PROPOSED }),
    "POST /bindings/binding-0001/ack": (init) => {
      const decision = JSON.parse(String(init?.body)).decision;
      return {
        body: { ...PROPOSED, status: decision === "accept" ? "acknowledged" : "rejected" },
      };
    },
  });
  const api = new ApiClient("http://testhost", fetchFn);
  const dashboard = new RecipeDashboard(api, {
    eventSourceFactory: (url) => new FakeEventSource(url),
    retryBaseMs: 100,
    scheduler: (fn, delay) => scheduled.push({ fn, delay }),
  });
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  dashboard.mount(root);
  return { dashboard, root, scheduled };
}

describe("acknowledgment gate", () => {
  it("shows an explicit modal and only opens the stream after accept", async () => {
    const { dashboard, root } = makeDashboard();
    await dashboard.bindAndConfirm("classification-monitor", ["device_npu_01"]);
    expect(root.querySelector("[data-testid=ack-modal]")).not.toBeNull();
    expect(FakeEventSource.instances).toHaveLength(0); // nothing subscribed yet
    await dashboard.decide("accept");
    expect(FakeEventSource.instances).toHaveLength(1);
    expect(root.querySelector("[data-testid=counters]")).not.toBeNull();
  });

  it("refuses the dashboard after reject", async () => {
    const { dashboard, root } = makeDashboard();
    await dashboard.bindAndConfirm("classification-monitor", ["device_npu_01"]);
    await dashboard.decide("reject");
    expect(FakeEventSource.instances).toHaveLength(0);
    expect(root.querySelector("[data-testid=rejected-note]")).not.toBeNull();
    // opening directly still refuses while unacknowledged
    dashboard.openStream();
    expect(root.querySelector("[data-testid=ack-required]")).not.toBeNull();
    expect(FakeEventSource.instances).toHaveLength(0);
  });

  it("renders ambiguity and missing reports instead of a modal", async () => {
    const { dashboard, root } = makeDashboard();
    dashboard.renderOutcome({
      kind: "ambiguous",
      recipeId: "classification-monitor",
      candidates: { classification: [
        { deviceId: "a", datapointRole: "r", address: "x" },
        { deviceId: "b", datapointRole: "r", address: "y" },
      ] },
    });
    expect(root.querySelector("[data-testid=ambiguity-report]")).not.toBeNull();
    dashboard.renderOutcome({
      kind: "missing",
      recipeId: "classification-monitor",
      missing: [{ role: "classification", requiredType: "http://iotschema.org/ClassificationResult" }],
    });
    expect(root.querySelector("[data-testid=missing-report]")!.textContent).toContain("ClassificationResult");
  });
});

describe("live widgets", () => {
  async function liveDashboard() {
    const setup = makeDashboard();
    await setup.dashboard.bindAndConfirm("classification-monitor", ["device_npu_01"]);
    await setup.dashboard.decide("accept");
    return { ...setup, source: FakeEventSource.instances[0] };
  }

  it("counter totals equal the number of received events", async () => {
    const { dashboard, root, source } = await liveDashboard();
    source.emit(event("red_workpiece", 1));
    source.emit(event("black_workpiece", 2));
    source.emit(event("red_workpiece", 3));
    await tick();
    expect(root.querySelector("[data-testid=counter-red_workpiece] .count")!.textContent).toBe("2");
    expect(root.querySelector("[data-testid=counter-black_workpiece] .count")!.textContent).toBe("1");
    expect(root.querySelector("[data-testid=total-received]")!.textContent).toBe("3");
    expect(dashboard.connectionState).toBe("live");
  });

  it("counters keep counting past the bounded buffer", async () => {
    const { dashboard, root, source } = await liveDashboard();
    for (let i = 0; i < BUFFER_CAPACITY + 100; i++) {
      source.emit(event("red_workpiece", i % 60));
    }
    await tick();
    expect(dashboard.buffer.length).toBe(BUFFER_CAPACITY); // oldest dropped
    expect(root.querySelector("[data-testid=counter-red_workpiece] .count")!.textContent).toBe(
      String(BUFFER_CAPACITY + 100),
    );
    expect(root.querySelector("[data-testid=buffer-size]")!.textContent).toBe(String(BUFFER_CAPACITY));
  });

  it("colors counters from the event payload", async () => {
    const { root, source } = await liveDashboard();
    source.emit(event("red_workpiece"));
    await tick();
    const counter = root.querySelector<HTMLElement>("[data-testid=counter-red_workpiece]")!;
    expect(counter.getAttribute("style")).toContain("#d64545");
  });

  it("reconnects with backoff and flags the stream stale on error", async () => {
    const { dashboard, root, scheduled, source } = await liveDashboard();
    source.emit(event("red_workpiece"));
    expect(dashboard.connectionState).toBe("live");
    source.fail();
    expect(dashboard.connectionState).toBe("stale");
    expect(root.querySelector("[data-testid=stream-state]")!.textContent).toBe("stale");
    expect(scheduled).toHaveLength(1);
    expect(scheduled[0].delay).toBe(100);
    scheduled[0].fn(); // reconnect attempt
    expect(FakeEventSource.instances).toHaveLength(2);
    FakeEventSource.instances[1].fail();
    expect(scheduled[1].delay).toBe(200); // exponential backoff
  });
});

describe("ring buffer", () => {
  it("drops oldest beyond capacity", () => {
    const ring = new RingBuffer<number>(3);
    for (const n of [1, 2, 3, 4, 5]) ring.push(n);
    expect(ring.toArray()).toEqual([3, 4, 5]);
    expect(ring.length).toBe(3);
    expect(ring.last(2)).toEqual([4, 5]);
  });
});
