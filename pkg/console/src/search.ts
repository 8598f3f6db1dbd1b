// Similarity search form: free text plus optional structured filters; the
// ranked hits (and their scores) come straight from the API response.

import { ApiClient } from "./api";
import { escapeHtml, localName } from "./catalog";
import type { SearchHit } from "./types";

export class SearchView {
  hits: SearchHit[] = [];

  private root: HTMLElement | null = null;

  constructor(private readonly api: ApiClient) {}

  mount(root: HTMLElement): void {
    this.root = root;
    root.innerHTML = `
      <form class="search-form" data-testid="search-form">
        <input name="text" type="text" placeholder="search text" data-testid="search-text" />
        <select name="kind" data-testid="search-kind">
          <option value="">any kind</option>
          <option value="model">models</option>
          <option value="device">devices</option>
        </select>
        <input name="maxRam" type="number" placeholder="max RAM kB" data-testid="search-max-ram" />
        <input name="sensor" type="text" placeholder="required sensor" data-testid="search-sensor" />
        <button type="submit">search</button>
      </form>
      <table class="hits">
        <thead><tr><th>entity</th><th>kind</th><th>score</th><th>matched</th></tr></thead>
        <tbody data-testid="search-hits"></tbody>
      </table>`;
    root.querySelector("form")!.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.run();
    });
  }

  async run(): Promise<void> {
    if (!this.root) return;
    const text = this.root.querySelector<HTMLInputElement>("[data-testid=search-text]")!.value;
    const kind = this.root.querySelector<HTMLSelectElement>("[data-testid=search-kind]")!.value;
    const maxRam = this.root.querySelector<HTMLInputElement>("[data-testid=search-max-ram]")!.value;
    const sensor = this.root.querySelector<HTMLInputElement>("[data-testid=search-sensor]")!.value;
    const filters: Record<string, unknown> = {};
    if (kind) filters.kind = kind;
    if (maxRam) filters.maxRamKb = Number(maxRam);
    if (sensor) filters.requiredSensor = sensor;
    this.hits = await this.api.search(text, filters);
    this.renderHits();
  }

  renderHits(): void {
    const body = this.root?.querySelector<HTMLTableSectionElement>("[data-testid=search-hits]");
    if (!body) return;
    body.innerHTML = this.hits.length
      ? ""
      : `<tr><td colspan="4" class="empty">no hits</td></tr>`;
    for (const hit of this.hits) {
      const row = document.createElement("tr");
      // score text is the API value verbatim — the console never rescores
      row.innerHTML = `
        <td>${escapeHtml(localName(hit.entityIri))}</td>
        <td>${hit.kind}</td>
        <td data-testid="hit-score">${hit.score}</td>
        <td>${hit.matchedTerms.map(escapeHtml).join(", ")}</td>`;
      body.appendChild(row);
    }
  }
}
