import "./style.css";
import { ApiClient } from "./api";
import { CatalogView } from "./catalog";
import { SearchView } from "./search";
import { DeployWizard } from "./wizard";
import { RecipeDashboard } from "./dashboard";

// one setting: the API base (query parameter beats the build-time default)
const params = new URLSearchParams(location.search);
export const apiBase =
  params.get("apiBase") ?? import.meta.env.VITE_API_BASE ?? "http://127.0.0.1:8099";

const app = document.querySelector<HTMLDivElement>("#app")!;
app.innerHTML = `
  <header class="topbar">
    <h1>semantic ML registry</h1>
    <nav>
      <button data-view="catalog" class="active">catalog</button>
      <button data-view="search">search</button>
      <button data-view="deploy">deploy</button>
      <button data-view="dashboard">dashboard</button>
    </nav>
    <div id="connection-banner" hidden>
      cannot reach the registry at <code>${apiBase}</code>
      <button id="retry-connection">retry</button>
    </div>
  </header>
  <main>
    <section id="view-catalog"></section>
    <section id="view-search" hidden></section>
    <section id="view-deploy" hidden></section>
    <section id="view-dashboard" hidden></section>
  </main>`;

const api = new ApiClient(apiBase);
const dashboard = new RecipeDashboard(api);
const wizard = new DeployWizard(api, {
  onBindRecipe: (deviceId) => {
    showView("dashboard");
    void dashboard.bindAndConfirm("classification-monitor", [deviceId]);
  },
});
const catalog = new CatalogView(api, {
  onDeployDevice: (device) => {
    showView("deploy");
    void wizard.openForDevice(device);
  },
  onDeployModel: (model) => {
    showView("deploy");
    void wizard.openForModel(model);
  },
});
const search = new SearchView(api);

catalog.mount(document.querySelector("#view-catalog")!);
search.mount(document.querySelector("#view-search")!);
wizard.mount(document.querySelector("#view-deploy")!);
dashboard.mount(document.querySelector("#view-dashboard")!);

function showView(name: string): void {
  for (const section of app.querySelectorAll("main > section")) {
    (section as HTMLElement).hidden = section.id !== `view-${name}`;
  }
  for (const button of app.querySelectorAll("nav button")) {
    button.classList.toggle("active", (button as HTMLElement).dataset.view === name);
  }
}

for (const button of app.querySelectorAll<HTMLButtonElement>("nav button")) {
  button.addEventListener("click", () => showView(button.dataset.view!));
}

async function boot(): Promise<void> {
  const banner = document.querySelector<HTMLDivElement>("#connection-banner")!;
  try {
    await catalog.load();
    banner.hidden = true;
    catalog.render();
  } catch {
    banner.hidden = false;
  }
}

document.querySelector("#retry-connection")!.addEventListener("click", () => void boot());
void boot();
