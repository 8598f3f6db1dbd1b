// Catalog browser: model/device lists with counts, kind filter and a
// click-through detail pane showing descriptor fields plus raw triples.

import { ApiClient } from "./api";
import type { DeviceDescriptor, ModelDescriptor, RawTriple } from "./types";

export type KindFilter = "all" | "models" | "devices";

export interface CatalogCallbacks {
  onDeployModel?: (model: ModelDescriptor) => void;
  onDeployDevice?: (device: DeviceDescriptor) => void;
}

export class CatalogView {
  models: ModelDescriptor[] = [];
  devices: DeviceDescriptor[] = [];
  filter: KindFilter = "all";

  private root: HTMLElement | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly callbacks: CatalogCallbacks = {},
  ) {}

  async load(): Promise<void> {
    [this.models, this.devices] = await Promise.all([
      this.api.listModels(),
      this.api.listDevices(),
    ]);
  }

  mount(root: HTMLElement): void {
    this.root = root;
    this.render();
  }

  setFilter(filter: KindFilter): void {
    this.filter = filter;
    this.render();
  }

  render(): void {
    if (!this.root) return;
    this.root.innerHTML = `
      <div class="catalog">
        <div class="catalog-toolbar">
          <span class="counts" data-testid="catalog-counts">
            ${this.models.length} models / ${this.devices.length} devices
          </span>
          <select data-testid="kind-filter">
            <option value="all">models + devices</option>
            <option value="models">models</option>
            <option value="devices">devices</option>
          </select>
        </div>
        <div class="catalog-body">
          <ul class="entity-list" data-testid="entity-list"></ul>
          <div class="detail-pane" data-testid="detail-pane"><em>select an entity</em></div>
        </div>
      </div>`;
    const select = this.root.querySelector<HTMLSelectElement>("[data-testid=kind-filter]")!;
    select.value = this.filter;
    select.addEventListener("change", () => this.setFilter(select.value as KindFilter));

    const list = this.root.querySelector<HTMLUListElement>("[data-testid=entity-list]")!;
    if (this.filter !== "devices") {
      for (const model of this.models) {
        list.appendChild(this.entityItem("model", model.name, () => this.showModel(model)));
      }
    }
    if (this.filter !== "models") {
      for (const device of this.devices) {
        list.appendChild(this.entityItem("device", device.name, () => this.showDevice(device)));
      }
    }
    if (!list.children.length) {
      list.innerHTML = `<li class="empty">no entities registered yet</li>`;
    }
  }

  private entityItem(kind: string, label: string, onClick: () => void): HTMLLIElement {
    const item = document.createElement("li");
    item.className = `entity entity-${kind}`;
    item.textContent = label;
    item.dataset.kind = kind;
    item.addEventListener("click", onClick);
    return item;
  }

  async showModel(model: ModelDescriptor): Promise<void> {
    const pane = this.detailPane();
    if (!pane) return;
    const detail = await this.api.modelDetail(model.uuid);
    const d = detail.descriptor;
    pane.innerHTML = `
      <h3 data-testid="detail-name">${escapeHtml(d.name)}</h3>
      <dl>
        <dt>uuid</dt><dd>${escapeHtml(d.uuid)}</dd>
        <dt>description</dt><dd>${escapeHtml(d.description)}</dd>
        <dt>category</dt><dd>${escapeHtml(d.category)}</dd>
        <dt>MACs</dt><dd data-testid="detail-macs">${d.macs}</dd>
        <dt>min RAM</dt><dd>${d.minRamKb} kB</dd>
        <dt>min Flash</dt><dd>${d.minFlashKb} kB</dd>
        <dt>inputs</dt><dd>${d.inputs.map((i) => escapeHtml(localName(i.sensorClass))).join(", ") || "none"}</dd>
      </dl>
      <button data-testid="find-devices">find compatible devices</button>
      <h4>raw triples (${detail.triples.length})</h4>
      <pre class="triples" data-testid="raw-triples">${escapeHtml(renderTriples(detail.triples))}</pre>`;
    pane
      .querySelector("[data-testid=find-devices]")!
      .addEventListener("click", () => this.callbacks.onDeployModel?.(d));
  }

  async showDevice(device: DeviceDescriptor): Promise<void> {
    const pane = this.detailPane();
    if (!pane) return;
    const detail = await this.api.deviceDetail(device.id);
    const d = detail.descriptor;
    pane.innerHTML = `
      <h3 data-testid="detail-name">${escapeHtml(d.name)}</h3>
      <dl>
        <dt>id</dt><dd>${escapeHtml(d.id)}</dd>
        <dt>RAM</dt><dd>${d.ramKb} kB</dd>
        <dt>Flash</dt><dd>${d.flashKb} kB</dd>
        <dt>platform</dt><dd>${escapeHtml(d.runtimePlatform)}</dd>
        <dt>sensors</dt><dd>${d.sensorClasses.map((c) => escapeHtml(localName(c))).join(", ") || "none"}</dd>
        <dt>datapoints</dt><dd>${d.datapoints.map((p) => escapeHtml(p.role)).join(", ") || "none"}</dd>
      </dl>
      <button data-testid="find-models">find compatible models</button>
      <h4>raw triples (${detail.triples.length})</h4>
      <pre class="triples" data-testid="raw-triples">${escapeHtml(renderTriples(detail.triples))}</pre>`;
    pane
      .querySelector("[data-testid=find-models]")!
      .addEventListener("click", () => this.callbacks.onDeployDevice?.(d));
  }

  private detailPane(): HTMLElement | null {
    return this.root?.querySelector("[data-testid=detail-pane]") ?? null;
  }
}

export function localName(iri: string): string {
  const hash = iri.lastIndexOf("#");
  const slash = iri.lastIndexOf("/");
  return iri.slice(Math.max(hash, slash) + 1);
}

export function renderTriples(triples: RawTriple[]): string {
  return triples
    .map((t) => `${termText(t.subject)} ${termText(t.predicate)} ${termText(t.object)} .`)
    .join("\n");
}

function termText(term: { type: string; value: string; datatype?: string }): string {
  if (term.type === "uri") return `<${term.value}>`;
  if (term.type === "bnode") return `_:${term.value}`;
  return term.datatype ? `"${term.value}"^^<${term.datatype}>` : `"${term.value}"`;
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
