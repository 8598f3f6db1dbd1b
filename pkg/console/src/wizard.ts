// Match-and-deploy wizard: compatible-counterpart modal, a config form built
// from exactly the server-declared fields, client-side type validation,
// bundle download and the effort panel (all figures verbatim from the API).

import { ApiClient, ApiError } from "./api";
import { escapeHtml } from "./catalog";
import type {
  ConfigField,
  DeviceDescriptor,
  MatchResult,
  ModelDescriptor,
  ProjectResponse,
} from "./types";

export interface WizardState {
  model: string | null;
  device: string | null;
  target: string | null;
  fields: ConfigField[];
  values: Record<string, string>;
  errors: Record<string, string>;
  matches: MatchResult[];
  result: ProjectResponse | null;
}

export interface WizardCallbacks {
  onBindRecipe?: (deviceId: string) => void;
  saveBlob?: (blob: Blob, filename: string) => void;
}

export function validateValue(field: ConfigField, raw: string): string | null {
  if (!raw) {
    return field.required ? "required" : null;
  }
  switch (field.valueType) {
    case "integer":
      return /^[+-]?\d+$/.test(raw) ? null : "integer required";
    case "decimal":
      return Number.isFinite(Number(raw)) ? null : "number required";
    case "enum":
      return field.choices?.includes(raw) ? null : `one of: ${field.choices?.join(", ")}`;
    default:
      return null;
  }
}

export function coerceValue(field: ConfigField, raw: string): unknown {
  if (field.valueType === "integer") return parseInt(raw, 10);
  if (field.valueType === "decimal") return Number(raw);
  return raw;
}

export class DeployWizard {
  state: WizardState = {
    model: null,
    device: null,
    target: null,
    fields: [],
    values: {},
    errors: {},
    matches: [],
    result: null,
  };

  private root: HTMLElement | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly callbacks: WizardCallbacks = {},
  ) {}

  mount(root: HTMLElement): void {
    this.root = root;
    root.innerHTML = `<div class="wizard" data-testid="wizard"></div>`;
  }

  private pane(): HTMLElement {
    return this.root!.querySelector("[data-testid=wizard]")!;
  }

  /** Device-first flow: pop up the compatible models the API reports. */
  async openForDevice(device: DeviceDescriptor): Promise<void> {
    this.state = { ...this.state, device: device.id, model: null, result: null };
    this.state.matches = await this.api.matchModels(device.id);
    this.state.target = device.runtimePlatform === "none" ? null : device.runtimePlatform;
    this.renderMatchModal(
      this.state.matches.map((m) => ({ key: m.modelUuid, match: m })),
      (uuid) => void this.configure(uuid, device.id),
    );
  }

  /** Model-first flow: pop up the compatible devices instead. */
  async openForModel(model: ModelDescriptor): Promise<void> {
    this.state = { ...this.state, model: model.uuid, device: null, result: null };
    this.state.matches = await this.api.matchDevices(model.uuid);
    this.renderMatchModal(
      this.state.matches.map((m) => ({ key: m.deviceId, match: m })),
      (deviceId) => void this.configure(model.uuid, deviceId),
    );
  }

  private renderMatchModal(
    entries: { key: string; match: MatchResult }[],
    onPick: (key: string) => void,
  ): void {
    const pane = this.pane();
    pane.innerHTML = `
      <div class="modal" data-testid="match-modal">
        <h3>compatible (${entries.length})</h3>
        <ul data-testid="match-list"></ul>
      </div>`;
    const list = pane.querySelector("[data-testid=match-list]")!;
    if (!entries.length) {
      list.innerHTML = `<li class="empty">no compatible counterparts</li>`;
      return;
    }
    for (const { key, match } of entries) {
      const item = document.createElement("li");
      item.innerHTML = `
        <button data-key="${escapeHtml(key)}">${escapeHtml(key)}</button>
        <span class="margins">RAM margin ${match.ramMarginKb} kB, Flash margin ${match.flashMarginKb} kB</span>`;
      item.querySelector("button")!.addEventListener("click", () => onPick(key));
      list.appendChild(item);
    }
  }

  async configure(modelUuid: string, deviceId: string): Promise<void> {
    this.state.model = modelUuid;
    this.state.device = deviceId;
    if (!this.state.target) {
      const devices = await this.api.listDevices();
      const device = devices.find((d) => d.id === deviceId);
      this.state.target = device && device.runtimePlatform !== "none" ? device.runtimePlatform : null;
    }
    if (!this.state.target) {
      this.pane().innerHTML = `<p class="error" data-testid="wizard-error">device has no deployable runtime platform</p>`;
      return;
    }
    this.state.fields = await this.api.projectConfig(modelUuid, deviceId, this.state.target);
    this.state.values = {};
    this.state.errors = {};
    this.renderForm();
  }

  renderForm(): void {
    const pane = this.pane();
    const grouped = new Map<string, ConfigField[]>();
    for (const field of this.state.fields) {
      const bucket = grouped.get(field.file) ?? [];
      bucket.push(field);
      grouped.set(field.file, bucket);
    }
    const sections = [...grouped.entries()]
      .map(
        ([file, fields]) => `
        <fieldset>
          <legend>${escapeHtml(file)}</legend>
          ${fields.map((f) => this.fieldMarkup(f)).join("")}
        </fieldset>`,
      )
      .join("");
    pane.innerHTML = `
      <form class="deploy-form" data-testid="deploy-form">
        <p>deploying <code>${escapeHtml(this.state.model ?? "")}</code>
           to <code>${escapeHtml(this.state.device ?? "")}</code>
           (target <code>${escapeHtml(this.state.target ?? "")}</code>,
           ${this.state.fields.length} inputs)</p>
        ${sections}
        <button type="submit" data-testid="deploy-submit">generate project</button>
      </form>
      <div data-testid="deploy-result"></div>`;
    const form = pane.querySelector("form")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    for (const field of this.state.fields) {
      const input = form.querySelector<HTMLElement>(`[name="${field.name}"]`)!;
      input.addEventListener("change", () => {
        this.state.values[field.name] = (input as HTMLInputElement).value;
      });
    }
  }

  private fieldMarkup(field: ConfigField): string {
    const error = this.state.errors[field.name];
    const flag = error ? ` <span class="field-error" data-testid="error-${field.name}">${escapeHtml(error)}</span>` : "";
    const invalid = error ? " invalid" : "";
    if (field.valueType === "enum") {
      const options = (field.choices ?? [])
        .map((c) => `<option value="${escapeHtml(c)}">${escapeHtml(c)}</option>`)
        .join("");
      return `<label class="config-field${invalid}" data-field="${field.name}">
          <span>${field.name}</span>${flag}
          <select name="${field.name}" data-testid="field-${field.name}">
            <option value=""></option>${options}
          </select>
          <small>${escapeHtml(field.description)}</small>
        </label>`;
    }
    const inputType = field.valueType === "string" ? "text" : "number";
    const step = field.valueType === "decimal" ? ` step="any"` : "";
    return `<label class="config-field${invalid}" data-field="${field.name}">
        <span>${field.name}</span>${flag}
        <input name="${field.name}" type="${inputType}"${step} data-testid="field-${field.name}" />
        <small>${escapeHtml(field.description)}</small>
      </label>`;
  }

  /** Validate client-side; only a fully valid form reaches the API. */
  async submit(): Promise<void> {
    const pane = this.pane();
    const form = pane.querySelector("form")!;
    this.state.errors = {};
    const config: Record<string, unknown> = {};
    for (const field of this.state.fields) {
      const input = form.querySelector<HTMLInputElement | HTMLSelectElement>(`[name="${field.name}"]`)!;
      const raw = input.value.trim();
      this.state.values[field.name] = raw;
      const problem = validateValue(field, raw);
      if (problem) {
        this.state.errors[field.name] = problem;
      } else if (raw) {
        config[field.name] = coerceValue(field, raw);
      }
    }
    if (Object.keys(this.state.errors).length) {
      this.renderForm();
      this.restoreValues();
      return;
    }
    try {
      this.state.result = await this.api.generateProject({
        model: this.state.model!,
        device: this.state.device!,
        target: this.state.target!,
        config,
      });
    } catch (error) {
      if (error instanceof ApiError && error.code === "MissingConfigError") {
        const details = error.details as { fields?: string[] } | undefined;
        for (const name of details?.fields ?? []) {
          this.state.errors[name] = "required";
        }
        this.renderForm();
        this.restoreValues();
        return;
      }
      throw error;
    }
    this.renderResult();
  }

  private restoreValues(): void {
    const form = this.pane().querySelector("form");
    if (!form) return;
    for (const [name, value] of Object.entries(this.state.values)) {
      const input = form.querySelector<HTMLInputElement>(`[name="${name}"]`);
      if (input) input.value = value;
    }
  }

  renderResult(): void {
    const result = this.state.result!;
    const target = this.pane().querySelector("[data-testid=deploy-result]")!;
    const effort = result.effortReport;
    // every figure below is rendered verbatim from the response
    target.innerHTML = `
      <div class="effort-panel" data-testid="effort-panel">
        <h3>project generated</h3>
        <p>${Object.keys(result.files).length} files, <span data-testid="effort-lines">${effort.generatedLineCount}</span> generated lines
           from <span data-testid="effort-inputs">${effort.userInputCount}</span> user inputs</p>
        <p>reduction vs template approach: <strong data-testid="effort-vs-template">${effort.reductionVsTemplate}</strong>×</p>
        <p>reduction vs traditional approach: <strong data-testid="effort-vs-traditional">${effort.reductionVsTraditional}</strong>×</p>
        <button data-testid="download-zip">download bundle (.zip)</button>
        <button data-testid="bind-recipe">bind monitoring recipe</button>
      </div>`;
    target.querySelector("[data-testid=download-zip]")!.addEventListener("click", () => {
      void this.download();
    });
    target.querySelector("[data-testid=bind-recipe]")!.addEventListener("click", () => {
      this.callbacks.onBindRecipe?.(this.state.device!);
    });
  }

  async download(): Promise<void> {
    const config: Record<string, unknown> = {};
    for (const field of this.state.fields) {
      const raw = this.state.values[field.name];
      if (raw) config[field.name] = coerceValue(field, raw);
    }
    const blob = await this.api.downloadProjectZip({
      model: this.state.model!,
      device: this.state.device!,
      target: this.state.target!,
      config,
    });
    const save = this.callbacks.saveBlob ?? defaultSaveBlob;
    save(blob, `${this.state.target}_${(this.state.model ?? "bundle").slice(0, 8)}.zip`);
  }
}

function defaultSaveBlob(blob: Blob, filename: string): void {
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}
