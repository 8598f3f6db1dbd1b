// Shared mocks: a route-table fetch stub and a controllable EventSource.

import type { EventSourceLike } from "../src/dashboard";
import type { ConfigField } from "../src/types";

export type RouteHandler = (init?: RequestInit) => { status?: number; body: unknown };

export function mockFetch(routes: Record<string, RouteHandler>): typeof fetch {
  const calls: { url: string; init?: RequestInit }[] = [];
  const fn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    calls.push({ url, init });
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const key = `${init?.method ?? "GET"} ${path}`;
    const handler = routes[key] ?? routes[path];
    if (!handler) {
      throw new Error(`no mock route for ${key}`);
    }
    const { status = 200, body } = handler(init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  }) as typeof fetch;
  (fn as unknown as { calls: typeof calls }).calls = calls;
  return fn;
}

export function fetchCalls(fn: typeof fetch): { url: string; init?: RequestInit }[] {
  return (fn as unknown as { calls: { url: string; init?: RequestInit }[] }).calls;
}

export class FakeEventSource implements EventSourceLike {
  static instances: FakeEventSource[] = [];
  onmessage: ((event: { data: string }) => void) | null = null;
  onerror: ((event: unknown) => void) | null = null;
  closed = false;
  private listeners = new Map<string, ((event: { data: string }) => void)[]>();

  constructor(readonly url: string) {
    FakeEventSource.instances.push(this);
  }

  addEventListener(type: string, handler: (event: { data: string }) => void): void {
    const bucket = this.listeners.get(type) ?? [];
    bucket.push(handler);
    this.listeners.set(type, bucket);
  }

  emit(data: unknown): void {
    const payload = { data: JSON.stringify(data) };
    for (const handler of this.listeners.get("telemetry") ?? []) {
      handler(payload);
    }
  }

  fail(): void {
    this.onerror?.(new Event("error"));
  }

  close(): void {
    this.closed = true;
  }
}

export const NPU_FIELDS: ConfigField[] = [
  { name: "model_slot", description: "slot", valueType: "integer", required: true, file: "npu_app.conf" },
  { name: "input_source", description: "feed", valueType: "enum", required: true, file: "npu_app.conf", choices: ["usb_camera", "ip_camera"] },
  { name: "execution_mode", description: "mode", valueType: "enum", required: true, file: "npu_app.conf", choices: ["continuous", "triggered"] },
  { name: "confidence_threshold", description: "threshold", valueType: "decimal", required: true, file: "npu_app.conf" },
  { name: "class_labels", description: "labels", valueType: "string", required: true, file: "main.py" },
  { name: "reject_label", description: "reject", valueType: "string", required: true, file: "main.py" },
  { name: "preprocess_width", description: "width", valueType: "integer", required: true, file: "main.py" },
  { name: "preprocess_height", description: "height", valueType: "integer", required: true, file: "main.py" },
  { name: "output_variable_name", description: "variable", valueType: "string", required: true, file: "main.py" },
  { name: "polling_interval_ms", description: "poll", valueType: "integer", required: true, file: "main.py" },
  { name: "struct_name", description: "udt", valueType: "string", required: true, file: "DataTypes.udt" },
  { name: "function_block_name", description: "fb", valueType: "string", required: true, file: "fbLogic.scl" },
  { name: "data_block_name", description: "db", valueType: "string", required: true, file: "ControlData.db" },
];

export const VALID_VALUES: Record<string, string> = {
  model_slot: "1",
  input_source: "usb_camera",
  execution_mode: "continuous",
  confidence_threshold: "0.75",
  class_labels: "red,black,metal",
  reject_label: "unknown",
  preprocess_width: "96",
  preprocess_height: "96",
  output_variable_name: "ClassificationResult",
  polling_interval_ms: "200",
  struct_name: "ClassificationRecord",
  function_block_name: "fbClassify",
  data_block_name: "ControlData",
};
