// End-to-end: the console's API client against a real registry server
// (spawned from the Python package in this repository), including the
// wizard-criteria checks — 13 declared fields, a bundle byte-identical to
// the CLI's for the same inputs, 2 compatible models for the NPU device,
// and a telemetry event on the dashboard's stream within a second.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { createServer } from "node:net";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../../src/api";
import type { Binding } from "../../src/types";

const REPO_ROOT = resolve(__dirname, "../../..");
const PYTHON = process.env.SEMREG_PYTHON ?? "python3";

const WORKPIECES_UUID = "2c8f6c2a-8c2e-4d14-9f6b-3a5d8e9c0f41";
const NPU_DEVICE = "device_npu_01";
const CONFIG = {
  model_slot: 1,
  input_source: "usb_camera",
  execution_mode: "continuous",
  confidence_threshold: 0.75,
  class_labels: "red_workpiece,black_workpiece,metal_workpiece",
  reject_label: "unknown",
  preprocess_width: 96,
  preprocess_height: 96,
  output_variable_name: "ClassificationResult",
  polling_interval_ms: 200,
  struct_name: "ClassificationRecord",
  function_block_name: "fbClassify",
  data_block_name: "ControlData",
};

let server: ChildProcess;
let api: ApiClient;
let base: string;
const scratch: string[] = [];

function freePort(): Promise<number> {
  return new Promise((resolvePort, reject) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolvePort(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  server = spawn(
    PYTHON,
    ["-m", "semreg.cli", "serve", "--fixtures", "--bind", `127.0.0.1:${port}`],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  api = new ApiClient(base);
  const deadline = Date.now() + 60_000;
  // wait until the service answers
  for (;;) {
    try {
      await api.listModels();
      break;
    } catch {
      if (Date.now() > deadline) throw new Error("registry server did not come up");
      await new Promise((r) => setTimeout(r, 150));
    }
  }
});

afterAll(() => {
  server?.kill("SIGTERM");
  for (const dir of scratch) rmSync(dir, { recursive: true, force: true });
});

describe("catalog over the wire", () => {
  it("reports the seeded census", async () => {
    expect(await api.listModels()).toHaveLength(22);
    expect(await api.listDevices()).toHaveLength(9);
  });

  it("serves entity detail with raw triples", async () => {
    const detail = await api.modelDetail(WORKPIECES_UUID);
    expect(detail.descriptor.name).toBe("workpieces_conveyorbelt_mobilnet");
    expect(detail.triples.length).toBeGreaterThan(10);
  });
});

describe("wizard criteria", () => {
  it("the NPU device has exactly 2 compatible models", async () => {
    const matches = await api.matchModels(NPU_DEVICE);
    expect(matches).toHaveLength(2);
    expect(matches.map((m) => m.modelUuid.slice(0, 2))).toEqual(["2c", "49"]);
  });

  it("declares exactly the 13 wizard fields", async () => {
    const fields = await api.projectConfig(WORKPIECES_UUID, NPU_DEVICE, "npu");
    expect(fields).toHaveLength(13);
    const perFile = new Map<string, number>();
    for (const field of fields) perFile.set(field.file, (perFile.get(field.file) ?? 0) + 1);
    expect(Object.fromEntries(perFile)).toEqual({
      "npu_app.conf": 4,
      "main.py": 6,
      "DataTypes.udt": 1,
      "fbLogic.scl": 1,
      "ControlData.db": 1,
    });
  });

  it("downloads a bundle byte-identical to the CLI's for the same inputs", async () => {
    const project = await api.generateProject({
      model: WORKPIECES_UUID,
      device: NPU_DEVICE,
      target: "npu",
      config: CONFIG,
    });
    expect(project.effortReport.userInputCount).toBe(13);

    const outDir = mkdtempSync(join(tmpdir(), "semreg-e2e-"));
    scratch.push(outDir);
    const configPath = join(outDir, "config.json");
    const bundleDir = join(outDir, "bundle");
    writeFileSync(configPath, JSON.stringify(CONFIG));
    const cli = spawnSync(
      PYTHON,
      [
        "-m", "semreg.cli", "--fixtures", "generate",
        "--model", WORKPIECES_UUID,
        "--device", NPU_DEVICE,
        "--target", "npu",
        "--config", configPath,
        "--out", bundleDir,
      ],
      { cwd: REPO_ROOT, encoding: "utf-8" },
    );
    expect(cli.status, cli.stderr).toBe(0);

    const cliFiles = readdirSync(bundleDir).sort();
    expect(cliFiles).toEqual(Object.keys(project.files).sort());
    for (const name of cliFiles) {
      const cliBytes = readFileSync(join(bundleDir, name), "utf-8");
      expect(project.files[name], name).toBe(cliBytes);
    }

    const blob = await api.downloadProjectZip({
      model: WORKPIECES_UUID,
      device: NPU_DEVICE,
      target: "npu",
      config: CONFIG,
    });
    expect(blob.size).toBeGreaterThan(500);
    expect(blob.type).toBe("application/zip");
  });
});

describe("dashboard criteria", () => {
  it("streams a telemetry event within 1 s of subscribing", async () => {
    const outcome = await api.proposeBinding("classification-monitor", [NPU_DEVICE, "device_002"]);
    expect(outcome.kind).toBe("binding");
    const binding = outcome as Binding;
    const acknowledged = await api.acknowledgeBinding(binding.bindingId, "accept");
    expect(acknowledged.status).toBe("acknowledged");

    const controller = new AbortController();
    const started = Date.now();
    const response = await fetch(api.streamUrl(binding.bindingId), {
      signal: controller.signal,
      headers: { accept: "text/event-stream" },
    });
    expect(response.status).toBe(200);
    const reader = response.body!.getReader();
    const decoder = new TextDecoder();
    let text = "";
    let firstEvent: Record<string, unknown> | null = null;
    while (!firstEvent) {
      const { value, done } = await reader.read();
      if (done) break;
      text += decoder.decode(value, { stream: true });
      const match = text.match(/^data: (.*)$/m);
      if (match) firstEvent = JSON.parse(match[1]);
    }
    const elapsed = Date.now() - started;
    controller.abort();
    expect(firstEvent).not.toBeNull();
    expect(firstEvent).toHaveProperty("classLabel");
    expect(firstEvent).toHaveProperty("color");
    expect(elapsed).toBeLessThan(1000);
  });

  it("refuses the stream for a rejected binding", async () => {
    const outcome = await api.proposeBinding("classification-monitor", [NPU_DEVICE]);
    const binding = outcome as Binding;
    await api.acknowledgeBinding(binding.bindingId, "reject");
    const response = await fetch(api.streamUrl(binding.bindingId));
    expect(response.status).toBe(409);
  });
});
