import { afterEach, beforeEach, describe, expect, inject, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { App } from "../src/app";
import type { CategoryNode, ResponseEntry } from "../src/types";

const serviceUrl = inject("serviceUrl");

function profileTopics(tree: CategoryNode): string[] {
  // the profile-topic cut: two levels below the root
  const topics: string[] = [];
  for (const child of tree.children) {
    for (const grandchild of child.children) {
      topics.push(grandchild.path);
    }
  }
  return topics;
}

function topicOf(primary: string, topics: string[]): string | null {
  const parts = primary.split("/");
  for (let end = parts.length; end > 0; end--) {
    const candidate = parts.slice(0, end).join("/");
    if (topics.includes(candidate)) return candidate;
  }
  return null;
}

/** The service's re-rank rule, recomputed here as the test oracle. */
function expectedRerank(
  before: ResponseEntry[],
  weights: Record<string, number>,
  topics: string[],
): { url: string; score: number }[] {
  const maxWeight = Math.max(1, ...Object.values(weights));
  const rescored = before.map((entry) => {
    const topic = topicOf(entry.primary, topics);
    const weight = topic ? (weights[topic] ?? 0) : 0;
    return { url: entry.url, score: entry.score * (1 + weight / maxWeight) };
  });
  rescored.sort((a, b) => b.score - a.score || a.url.localeCompare(b.url));
  return rescored;
}

describe("feedback loop against the live service", () => {
  let root: HTMLElement;

  beforeEach(() => {
    root = document.createElement("div");
    document.body.appendChild(root);
  });

  afterEach(() => {
    root.remove();
    vi.restoreAllMocks();
  });

  it("query, click two same-topic results, re-query: ordering matches the re-rank oracle", async () => {
    const api = new ApiClient(serviceUrl);
    const navigate = vi.fn();
    const app = new App(root, { api, navigate });
    await app.start();

    const user = `loop-${Date.now()}-${Math.floor(Math.random() * 1e6)}`;
    app.setUser(user);
    app.setQuery("jaguar");
    await app.submit();

    const before = app.currentEntries();
    expect(before.length).toBeGreaterThanOrEqual(3);
    const tree = await api.categories();
    const topics = profileTopics(tree);

    // pick a topic with at least two results whose best entry is not
    // already ranked first, so the boost has something to promote
    const byTopic = new Map<string, ResponseEntry[]>();
    for (const entry of before) {
      const topic = topicOf(entry.primary, topics);
      if (topic) byTopic.set(topic, [...(byTopic.get(topic) ?? []), entry]);
    }
    const candidates = [...byTopic.entries()].filter(([, es]) => es.length >= 2);
    const flippable = candidates.find(
      ([, es]) => before.findIndex((e) => e.url === es[0].url) > 0,
    );
    expect(flippable).toBeDefined();
    const [topic, clickable] = flippable!;

    // observe the POST /visit traffic while clicking through the DOM
    const visitPosts: string[] = [];
    const realFetch = globalThis.fetch;
    const fetchSpy = vi
      .spyOn(globalThis, "fetch")
      .mockImplementation(async (input: RequestInfo | URL, init?: RequestInit) => {
        const url = new URL(String(input), serviceUrl);
        if (url.pathname === "/visit" && init?.method === "POST") {
          visitPosts.push(JSON.parse(String(init.body)).url);
        }
        return realFetch(input, init);
      });

    for (const target of clickable.slice(0, 2)) {
      const item = [...root.querySelectorAll<HTMLElement>(".result")].find(
        (el) => el.dataset.url === target.url,
      )!;
      item.querySelector("a")!.click();
    }
    await vi.waitFor(() => expect(navigate).toHaveBeenCalledTimes(2));
    await vi.waitFor(async () => {
      const profile = await api.profile(user);
      expect(profile.weights[topic] ?? 0).toBeGreaterThanOrEqual(2);
    });
    expect(visitPosts).toEqual(clickable.slice(0, 2).map((e) => e.url));
    fetchSpy.mockRestore();

    const profile = await api.profile(user);
    const expected = expectedRerank(before, profile.weights, topics);

    await app.submit();
    const after = app.currentEntries();
    expect(after.map((e) => e.url)).toEqual(expected.map((e) => e.url));
    for (let i = 0; i < after.length; i++) {
      expect(after[i].score).toBeCloseTo(expected[i].score, 9);
    }

    // the clicked topic visibly moved up
    const firstClickedBefore = before.findIndex(
      (e) => topicOf(e.primary, topics) === topic,
    );
    const firstClickedAfter = after.findIndex(
      (e) => topicOf(e.primary, topics) === topic,
    );
    expect(firstClickedAfter).toBeLessThanOrEqual(firstClickedBefore);
    expect(after.map((e) => e.url)).not.toEqual(before.map((e) => e.url));
  });

  it("facet selection refilters through the service without a reload", async () => {
    const api = new ApiClient(serviceUrl);
    const app = new App(root, { api, navigate: vi.fn() });
    await app.start();
    app.setQuery("jaguar");
    await app.submit();
    const urlBefore = window.location.href;
    const countBefore = root.querySelectorAll(".result").length;

    // the tree re-renders after every response, so re-query the live node
    const scienceBox = () =>
      [...root.querySelectorAll("input")].find((input) => input.value === "Top/Science")!;
    scienceBox().click();
    await vi.waitFor(() => {
      const entries = app.currentEntries();
      expect(entries.length).toBeGreaterThan(0);
      expect(entries.length).toBeLessThan(countBefore);
    });
    for (const entry of app.currentEntries()) {
      const cats = [entry.primary, entry.secondary].filter(Boolean) as string[];
      expect(cats.some((c) => c === "Top/Science" || c.startsWith("Top/Science/"))).toBe(true);
    }
    expect(window.location.href).toBe(urlBefore);

    // deselect: the full list comes back
    scienceBox().click();
    await vi.waitFor(() => expect(app.currentEntries().length).toBe(countBefore));
  });

  it("health and categories endpoints answer", async () => {
    const resp = await fetch(`${serviceUrl}/health`);
    expect(resp.status).toBe(200);
    const tree = await new ApiClient(serviceUrl).categories();
    expect(tree.path).toBe("Top");
    expect(profileTopics(tree).length).toBeGreaterThanOrEqual(5);
  });
});
