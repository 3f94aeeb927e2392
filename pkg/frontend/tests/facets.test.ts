import { describe, expect, it, vi } from "vitest";

import { FacetTree, selectionCovers, subtreeCount } from "../src/facets";
import { RESPONSE, TREE } from "./fixtures";

describe("subtreeCount", () => {
  it("sums the whole subtree", () => {
    expect(subtreeCount(TREE, RESPONSE.facets)).toBe(4);
    const science = TREE.children[0];
    expect(subtreeCount(science, RESPONSE.facets)).toBe(2);
    const autos = TREE.children[1].children[0];
    expect(subtreeCount(autos, RESPONSE.facets)).toBe(2);
  });

  it("matches path components, not string prefixes", () => {
    const node = { path: "Top/Science", title: "Science", children: [] };
    expect(subtreeCount(node, [{ path: "Top/Sciencey", count: 5 }])).toBe(0);
  });
});

describe("selectionCovers", () => {
  it("covers descendants of a selected node", () => {
    const selection = new Set(["Top/Science"]);
    expect(selectionCovers(selection, "Top/Science")).toBe(true);
    expect(selectionCovers(selection, "Top/Science/Biology")).toBe(true);
    expect(selectionCovers(selection, "Top/Recreation")).toBe(false);
  });
});

describe("FacetTree", () => {
  function mount(tree: FacetTree): void {
    document.body.appendChild(tree.element);
  }

  it("displays counts identical to the facet summary rollup", () => {
    const tree = new FacetTree(TREE, { onChange: () => {} });
    tree.setFacets(RESPONSE.facets);
    const labels = [...tree.element.querySelectorAll("label")];
    const byName = new Map(
      labels.map((label) => [
        label.querySelector(".facet-name")!.textContent,
        label.querySelector(".facet-count")!.textContent,
      ]),
    );
    expect(byName.get("Science")).toBe("2");
    expect(byName.get("Biology")).toBe("1");
    expect(byName.get("Recreation")).toBe("2");
    expect(byName.get("Autos")).toBe("2");
  });

  it("selecting a node implies its subtree", () => {
    const onChange = vi.fn();
    const tree = new FacetTree(TREE, { onChange });
    mount(tree);
    const science = [...tree.element.querySelectorAll("input")].find(
      (input) => input.value === "Top/Science",
    )!;
    science.click();
    expect(onChange).toHaveBeenCalledWith(["Top/Science"]);
    const biology = [...tree.element.querySelectorAll("input")].find(
      (input) => input.value === "Top/Science/Biology",
    )!;
    expect(biology.checked).toBe(true);
    expect(biology.disabled).toBe(true);
  });

  it("selecting an ancestor absorbs selected descendants", () => {
    const onChange = vi.fn();
    const tree = new FacetTree(TREE, { onChange });
    mount(tree);
    const pick = (value: string) =>
      [...tree.element.querySelectorAll("input")].find((input) => input.value === value)!;
    pick("Top/Science/Biology").click();
    expect(onChange).toHaveBeenLastCalledWith(["Top/Science/Biology"]);
    pick("Top/Science").click();
    expect(onChange).toHaveBeenLastCalledWith(["Top/Science"]);
    expect(tree.selectedPaths()).toEqual(["Top/Science"]);
  });

  it("unchecking clears the selection", () => {
    const onChange = vi.fn();
    const tree = new FacetTree(TREE, { onChange });
    mount(tree);
    const pick = (value: string) =>
      [...tree.element.querySelectorAll("input")].find((input) => input.value === value)!;
    pick("Top/Recreation").click();
    pick("Top/Recreation").click();
    expect(onChange).toHaveBeenLastCalledWith([]);
  });
});
