import type { ResponseEntry } from "./types";
import { UNCLASSIFIED } from "./types";

export interface ClusterGroup {
  label: string;
  entries: ResponseEntry[];
}

/** Group entries by cluster label, keeping the service's ordering: groups
 * appear in order of their first entry, entries stay in response order.
 * The UI never re-sorts by score. */
export function groupByCluster(entries: ResponseEntry[]): ClusterGroup[] {
  const groups = new Map<string, ClusterGroup>();
  for (const entry of entries) {
    const label = entry.cluster ?? UNCLASSIFIED;
    let group = groups.get(label);
    if (!group) {
      group = { label, entries: [] };
      groups.set(label, group);
    }
    group.entries.push(entry);
  }
  return [...groups.values()];
}

export interface ResultListOptions {
  onClick: (entry: ResponseEntry) => void;
}

export class ResultList {
  readonly element: HTMLElement;

  constructor(private options: ResultListOptions) {
    this.element = document.createElement("main");
    this.element.className = "results";
  }

  showMessage(text: string, kind: "empty" | "error" = "empty"): void {
    this.element.textContent = "";
    const banner = document.createElement("p");
    banner.className = kind === "error" ? "banner banner-error" : "banner";
    banner.textContent = text;
    this.element.appendChild(banner);
  }

  render(entries: ResponseEntry[], flags: string[]): void {
    this.element.textContent = "";
    for (const flag of flags) {
      const note = document.createElement("p");
      note.className = "banner banner-flag";
      note.textContent = flag;
      this.element.appendChild(note);
    }
    if (entries.length === 0) {
      this.showMessage("No results.");
      return;
    }
    for (const group of groupByCluster(entries)) {
      this.element.appendChild(this.renderGroup(group));
    }
  }

  private renderGroup(group: ClusterGroup): HTMLElement {
    const section = document.createElement("section");
    section.className = "cluster";
    const heading = document.createElement("h3");
    heading.className = "cluster-label";
    heading.textContent = group.label;
    section.appendChild(heading);
    const list = document.createElement("ol");
    for (const entry of group.entries) {
      list.appendChild(this.renderEntry(entry));
    }
    section.appendChild(list);
    return section;
  }

  private renderEntry(entry: ResponseEntry): HTMLLIElement {
    const item = document.createElement("li");
    item.className = "result";
    item.dataset.url = entry.url;

    const link = document.createElement("a");
    link.href = entry.url;
    link.textContent = entry.title || entry.url;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      this.options.onClick(entry);
    });

    const meta = document.createElement("div");
    meta.className = "result-meta";
    const score = document.createElement("span");
    score.className = "result-score";
    score.textContent = entry.score.toFixed(4);
    meta.appendChild(score);
    for (const category of [entry.primary, entry.secondary]) {
      if (!category) continue;
      const badge = document.createElement("span");
      badge.className = "badge";
      badge.textContent = category;
      meta.appendChild(badge);
    }
    const source = document.createElement("span");
    source.className = "result-source";
    source.textContent = entry.source;
    meta.appendChild(source);

    const snippet = document.createElement("p");
    snippet.className = "result-snippet";
    snippet.textContent = entry.snippet;

    const url = document.createElement("span");
    url.className = "result-url";
    url.textContent = entry.url;

    item.append(link, meta, snippet, url);
    return item;
  }
}
