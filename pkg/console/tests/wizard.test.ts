// Deploy wizard: the form must mirror the server-declared fields exactly,
// validate client-side per value type, and display effort figures verbatim.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { DeployWizard, validateValue } from "../src/wizard";
import type { DeviceDescriptor } from "../src/types";
import { NPU_FIELDS, VALID_VALUES, fetchCalls, mockFetch } from "./helpers";

const NPU_DEVICE: DeviceDescriptor = {
  id: "device_npu_01",
  name: "Workstation NPU vision module",
  sensorClasses: ["http://tinyml-schema.org/sosa_extend#Camera"],
  ramKb: 144,
  flashKb: 621,
  runtimePlatform: "npu",
  datapoints: [],
  graphIri: null,
};

const TWO_MATCHES = [
  { modelUuid: "2c8f6c2a", deviceId: "device_npu_01", ramMarginKb: 50, flashMarginKb: 21, satisfiedSensors: [], rank: 1 },
  { modelUuid: "49b2e7d1", deviceId: "device_npu_01", ramMarginKb: 28, flashMarginKb: 3, satisfiedSensors: [], rank: 2 },
];

// effort figures chosen so any client-side recomputation would be caught
const EFFORT = {
  userInputCount: 13,
  generatedLineCount: 777,
  baselineTraditional: 766,
  baselineTemplate: 38,
  reductionVsTraditional: 123.456,
  reductionVsTemplate: 9.87,
};

function wizardWithRoutes(extra: Record<string, (init?: RequestInit) => { status?: number; body: unknown }> = {}) {
  const fetchFn = mockFetch({
    "GET /match/models?device=device_npu_01": () => ({ body: TWO_MATCHES }),
    "GET /projects/config?model=2c8f6c2a&device=device_npu_01&target=npu": () => ({ body: NPU_FIELDS }),
    "POST /projects": () => ({
      body: { files: { "npu_app.conf": "x" }, effortReport: EFFORT, metadata: {} },
    }),
    ...extra,
  });
  const api = new ApiClient("http://testhost", fetchFn);
  const wizard = new DeployWizard(api);
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  wizard.mount(root);
  return { wizard, root, fetchFn };
}

async function openConfigured(wizard: DeployWizard) {
  await wizard.openForDevice(NPU_DEVICE);
  await wizard.configure("2c8f6c2a", "device_npu_01");
}

function fillAll(root: HTMLElement, values: Record<string, string> = VALID_VALUES) {
  for (const [name, value] of Object.entries(values)) {
    const input = root.querySelector<HTMLInputElement>(`[name="${name}"]`);
    if (input) input.value = value;
  }
}

describe("match modal", () => {
  it("lists exactly the API-returned compatible models for the device", async () => {
    const { wizard, root } = wizardWithRoutes();
    await wizard.openForDevice(NPU_DEVICE);
    const entries = root.querySelectorAll("[data-testid=match-list] li");
    expect(entries).toHaveLength(2);
    expect(root.querySelector("[data-testid=match-modal] h3")!.textContent).toContain("compatible (2)");
    expect(entries[0].textContent).toContain("2c8f6c2a");
    expect(entries[1].textContent).toContain("49b2e7d1");
  });

  it("shows the API margins without recomputation", async () => {
    const { wizard, root } = wizardWithRoutes();
    await wizard.openForDevice(NPU_DEVICE);
    expect(root.querySelectorAll(".margins")[0].textContent).toContain("RAM margin 50 kB");
  });
});

describe("config form", () => {
  it("renders exactly the server-declared fields, grouped per file", async () => {
    const { wizard, root } = wizardWithRoutes();
    await openConfigured(wizard);
    const rendered = [...root.querySelectorAll<HTMLElement>(".config-field")].map(
      (label) => label.dataset.field,
    );
    expect(rendered).toEqual(NPU_FIELDS.map((f) => f.name));
    expect(rendered).toHaveLength(13);
    const legends = [...root.querySelectorAll("legend")].map((l) => l.textContent);
    expect(legends).toEqual(["npu_app.conf", "main.py", "DataTypes.udt", "fbLogic.scl", "ControlData.db"]);
  });

  it("blocks submission and flags the field when a required value is blank", async () => {
    const { wizard, root, fetchFn } = wizardWithRoutes();
    await openConfigured(wizard);
    const values = { ...VALID_VALUES, class_labels: "" };
    fillAll(root, values);
    await wizard.submit();
    expect(root.querySelector("[data-testid=error-class_labels]")).not.toBeNull();
    expect(root.querySelector("[data-testid=error-class_labels]")!.textContent).toBe("required");
    const posts = fetchCalls(fetchFn).filter((c) => c.init?.method === "POST");
    expect(posts).toHaveLength(0); // nothing reached the API
    expect(root.querySelector("[data-testid=effort-panel]")).toBeNull();
  });

  it("validates integer, decimal and enum types client-side", () => {
    const integer = NPU_FIELDS.find((f) => f.name === "model_slot")!;
    const decimal = NPU_FIELDS.find((f) => f.name === "confidence_threshold")!;
    const enumField = NPU_FIELDS.find((f) => f.name === "input_source")!;
    expect(validateValue(integer, "5")).toBeNull();
    expect(validateValue(integer, "5.5")).toBe("integer required");
    expect(validateValue(decimal, "0.75")).toBeNull();
    expect(validateValue(decimal, "zero")).toBe("number required");
    expect(validateValue(enumField, "usb_camera")).toBeNull();
    expect(validateValue(enumField, "betamax")).toContain("one of");
  });

  it("highlights fields named by a MissingConfigError envelope", async () => {
    const { wizard, root } = wizardWithRoutes({
      "POST /projects": () => ({
        status: 400,
        body: {
          httpStatus: 400,
          code: "MissingConfigError",
          message: "missing required config fields: reject_label",
          details: { fields: ["reject_label"] },
        },
      }),
    });
    await openConfigured(wizard);
    fillAll(root);
    await wizard.submit();
    expect(root.querySelector("[data-testid=error-reject_label]")).not.toBeNull();
  });
});

describe("effort panel", () => {
  it("displays the API's effort figures verbatim (no local math)", async () => {
    const { wizard, root } = wizardWithRoutes();
    await openConfigured(wizard);
    fillAll(root);
    await wizard.submit();
    expect(root.querySelector("[data-testid=effort-inputs]")!.textContent).toBe("13");
    expect(root.querySelector("[data-testid=effort-lines]")!.textContent).toBe("777");
    // 123.456 and 9.87 are deliberately NOT 766/13 and 38/13: the panel must
    // echo the response, not recompute the ratios
    expect(root.querySelector("[data-testid=effort-vs-traditional]")!.textContent).toBe("123.456");
    expect(root.querySelector("[data-testid=effort-vs-template]")!.textContent).toBe("9.87");
  });
});
