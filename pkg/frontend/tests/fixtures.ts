import type { CategoryNode, ResponseEntry, SearchResponse } from "../src/types";

export const TREE: CategoryNode = {
  path: "Top",
  title: "Top",
  children: [
    {
      path: "Top/Science",
      title: "Science",
      children: [
        { path: "Top/Science/Biology", title: "Biology", children: [] },
        { path: "Top/Science/Environment", title: "Environment", children: [] },
      ],
    },
    {
      path: "Top/Recreation",
      title: "Recreation",
      children: [{ path: "Top/Recreation/Autos", title: "Autos", children: [] }],
    },
  ],
};

export function entry(overrides: Partial<ResponseEntry>): ResponseEntry {
  return {
    url: "http://web/x",
    title: "x",
    snippet: "about x",
    score: 0.5,
    primary: "Top/Science/Biology",
    secondary: null,
    cluster: "Top/Science",
    source: "crawl",
    ...overrides,
  };
}

export const RESPONSE: SearchResponse = {
  query: "jaguar",
  flags: [],
  entries: [
    entry({
      url: "http://web/animal",
      title: "jaguar animal",
      score: 1.0,
      primary: "Top/Science/Biology",
      cluster: "Top/Science",
    }),
    entry({
      url: "http://web/dealers",
      title: "jaguar dealers",
      score: 0.61,
      primary: "Top/Recreation/Autos",
      cluster: "Top/Recreation",
    }),
    entry({
      url: "http://web/climate",
      title: "climate",
      score: 0.44,
      primary: "Top/Science/Environment",
      cluster: "Top/Science",
    }),
    entry({
      url: "http://web/car",
      title: "jaguar car",
      score: 0.13,
      primary: "Top/Recreation/Autos",
      secondary: "Top/Science/Biology",
      cluster: "Top/Recreation",
    }),
  ],
  facets: [
    { path: "Top/Recreation/Autos", count: 2 },
    { path: "Top/Science/Biology", count: 1 },
    { path: "Top/Science/Environment", count: 1 },
  ],
};
