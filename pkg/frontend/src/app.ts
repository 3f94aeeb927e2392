import { ApiClient, ApiError } from "./api";
import { FacetTree } from "./facets";
import { ProfilePanel } from "./profile";
import { ResultList } from "./results";
import type { ResponseEntry, SearchResponse } from "./types";

const USER_KEY = "isf-user";

export interface AppOptions {
  api?: ApiClient;
  /** Injected so tests can observe navigation. */
  navigate?: (url: string) => void;
}

/** Query bar on top, facet tree left, clustered results center, profile
 * panel right. One search request in flight at a time; facet changes
 * re-query in place; clicks post a visit and then navigate. */
export class App {
  readonly api: ApiClient;
  private navigate: (url: string) => void;
  private inflight: AbortController | null = null;
  private facetTree: FacetTree | null = null;
  private results = new ResultList({ onClick: (entry) => this.clickEntry(entry) });
  private profilePanel = new ProfilePanel();
  private queryInput!: HTMLInputElement;
  private userInput!: HTMLInputElement;
  private lastResponse: SearchResponse | null = null;

  constructor(private root: HTMLElement, options: AppOptions = {}) {
    this.api = options.api ?? new ApiClient();
    this.navigate = options.navigate ?? ((url) => window.open(url, "_blank"));
  }

  async start(): Promise<void> {
    this.root.textContent = "";
    this.root.appendChild(this.renderHeader());
    const layout = document.createElement("div");
    layout.className = "layout";
    const facetSlot = document.createElement("div");
    facetSlot.className = "facet-slot";
    layout.append(facetSlot, this.results.element, this.profilePanel.element);
    this.root.appendChild(layout);

    try {
      const tree = await this.api.categories();
      this.facetTree = new FacetTree(tree, { onChange: () => void this.submit() });
      facetSlot.appendChild(this.facetTree.element);
    } catch (error) {
      this.results.showMessage(this.describe(error), "error");
    }
    await this.refreshProfile();
  }

  get user(): string {
    return this.userInput.value.trim();
  }

  currentEntries(): ResponseEntry[] {
    return this.lastResponse ? [...this.lastResponse.entries] : [];
  }

  async submit(): Promise<void> {
    const query = this.queryInput.value.trim();
    if (!query) return;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const response = await this.api.search(
        {
          q: query,
          user: this.user || undefined,
          cats: this.facetTree?.selectedPaths() ?? [],
        },
        controller.signal,
      );
      if (controller !== this.inflight) return; // superseded while awaiting
      this.lastResponse = response;
      this.results.render(response.entries, response.flags);
      this.facetTree?.setFacets(response.facets);
    } catch (error) {
      if (controller.signal.aborted) return; // canceled by a newer request
      this.results.showMessage(this.describe(error), "error");
    } finally {
      if (controller === this.inflight) this.inflight = null;
    }
  }

  /** Fire the visit, then navigate; a failed visit only logs. */
  clickEntry(entry: ResponseEntry): Promise<void> {
    const user = this.user;
    const recorded = user
      ? this.api.visit(user, entry.url).then((ok) => {
          if (!ok) console.warn(`visit not recorded for ${entry.url}`);
          return this.refreshProfile();
        })
      : Promise.resolve();
    this.navigate(entry.url);
    return recorded.then(() => undefined);
  }

  async refreshProfile(): Promise<void> {
    const user = this.user;
    if (!user) {
      this.profilePanel.render(null);
      return;
    }
    try {
      this.profilePanel.render(await this.api.profile(user));
    } catch {
      this.profilePanel.render(null);
    }
  }

  private describe(error: unknown): string {
    if (error instanceof ApiError) return `Search failed: ${error.message}`;
    return "Service unreachable. Is the isf service running?";
  }

  private renderHeader(): HTMLElement {
    const header = document.createElement("header");
    header.className = "query-bar";

    const form = document.createElement("form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });

    this.queryInput = document.createElement("input");
    this.queryInput.type = "search";
    this.queryInput.name = "q";
    this.queryInput.placeholder = "Search the ecosystem";

    const button = document.createElement("button");
    button.type = "submit";
    button.textContent = "Search";

    this.userInput = document.createElement("input");
    this.userInput.type = "text";
    this.userInput.name = "user";
    this.userInput.placeholder = "user id";
    this.userInput.value = localStorage.getItem(USER_KEY) ?? "";
    this.userInput.addEventListener("change", () => {
      localStorage.setItem(USER_KEY, this.user);
      void this.refreshProfile();
    });

    form.append(this.queryInput, button, this.userInput);
    header.appendChild(form);
    return header;
  }

  setQuery(text: string): void {
    this.queryInput.value = text;
  }

  setUser(user: string): void {
    this.userInput.value = user;
  }
}
