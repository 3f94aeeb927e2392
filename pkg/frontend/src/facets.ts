import type { CategoryNode, FacetCount } from "./types";

/** Result count for a node: facet entries at the node or anywhere in its
 * subtree (facets arrive keyed by each entry's primary category). */
export function subtreeCount(node: CategoryNode, facets: FacetCount[]): number {
  let total = 0;
  for (const { path, count } of facets) {
    if (path === node.path || path.startsWith(node.path + "/")) total += count;
  }
  return total;
}

export function selectionCovers(selection: Set<string>, path: string): boolean {
  for (const selected of selection) {
    if (path === selected || path.startsWith(selected + "/")) return true;
  }
  return false;
}

export interface FacetTreeOptions {
  onChange: (selection: string[]) => void;
}

/** Checkbox tree over the taxonomy. Checking a node selects its whole
 * subtree: descendants render checked and disabled while an ancestor is
 * selected. Counts reflect the current response's facet summary. */
export class FacetTree {
  readonly element: HTMLElement;
  private selection = new Set<string>();
  private facets: FacetCount[] = [];

  constructor(private root: CategoryNode, private options: FacetTreeOptions) {
    this.element = document.createElement("nav");
    this.element.className = "facet-tree";
    this.element.setAttribute("aria-label", "Categories");
    this.render();
  }

  selectedPaths(): string[] {
    return [...this.selection].sort();
  }

  setFacets(facets: FacetCount[]): void {
    this.facets = facets;
    this.render();
  }

  clearSelection(): void {
    this.selection.clear();
    this.render();
  }

  private toggle(path: string, checked: boolean): void {
    if (checked) {
      this.selection.add(path);
      // an explicitly selected ancestor subsumes its descendants
      for (const other of [...this.selection]) {
        if (other !== path && other.startsWith(path + "/")) this.selection.delete(other);
      }
    } else {
      this.selection.delete(path);
    }
    this.render();
    this.options.onChange(this.selectedPaths());
  }

  private render(): void {
    this.element.textContent = "";
    const heading = document.createElement("h2");
    heading.textContent = "Categories";
    this.element.appendChild(heading);
    this.element.appendChild(this.renderChildren(this.root));
  }

  private renderChildren(node: CategoryNode): HTMLUListElement {
    const list = document.createElement("ul");
    for (const child of node.children) {
      list.appendChild(this.renderNode(child));
    }
    return list;
  }

  private renderNode(node: CategoryNode): HTMLLIElement {
    const item = document.createElement("li");
    const label = document.createElement("label");
    const checkbox = document.createElement("input");
    checkbox.type = "checkbox";
    checkbox.value = node.path;
    const covered = selectionCovers(this.selection, node.path);
    checkbox.checked = covered;
    checkbox.disabled = covered && !this.selection.has(node.path);
    checkbox.addEventListener("change", () => this.toggle(node.path, checkbox.checked));

    const name = document.createElement("span");
    name.className = "facet-name";
    name.textContent = node.title;

    const count = document.createElement("span");
    count.className = "facet-count";
    count.textContent = String(subtreeCount(node, this.facets));

    label.append(checkbox, name, count);
    item.appendChild(label);
    if (node.children.length > 0) {
      item.appendChild(this.renderChildren(node));
    }
    return item;
  }
}
