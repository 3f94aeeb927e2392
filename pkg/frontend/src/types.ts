export interface ResponseEntry {
  url: string;
  title: string;
  snippet: string;
  score: number;
  primary: string;
  secondary: string | null;
  cluster: string | null;
  source: string;
}

export interface FacetCount {
  path: string;
  count: number;
}

export interface SearchResponse {
  query: string;
  flags: string[];
  entries: ResponseEntry[];
  facets: FacetCount[];
}

export interface CategoryNode {
  path: string;
  title: string;
  children: CategoryNode[];
}

export interface Profile {
  user_id: string;
  weights: Record<string, number>;
  created_at: number;
  updated_at: number;
}

export interface SearchParams {
  q: string;
  user?: string;
  cats?: string[];
  sources?: string[];
  topic?: string;
  k?: number;
}

export const UNCLASSIFIED = "Unclassified";
