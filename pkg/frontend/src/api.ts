import type { CategoryNode, Profile, SearchParams, SearchResponse } from "./types";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function errorMessage(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    if (body && typeof body.error === "string") return body.error;
  } catch {
    /* fall through to the status line */
  }
  return `request failed with status ${resp.status}`;
}

/** Thin typed client over the service endpoints; the UI computes nothing
 * itself, it only renders what comes back. */
export class ApiClient {
  constructor(private baseUrl: string = "") {}

  async search(params: SearchParams, signal?: AbortSignal): Promise<SearchResponse> {
    const query = new URLSearchParams({ q: params.q });
    if (params.user) query.set("user", params.user);
    if (params.cats && params.cats.length > 0) query.set("cats", params.cats.join(","));
    if (params.sources && params.sources.length > 0) query.set("sources", params.sources.join(","));
    if (params.topic) query.set("topic", params.topic);
    if (params.k) query.set("k", String(params.k));
    const resp = await fetch(`${this.baseUrl}/search?${query}`, { signal });
    if (!resp.ok) throw new ApiError(resp.status, await errorMessage(resp));
    return (await resp.json()) as SearchResponse;
  }

  async categories(): Promise<CategoryNode> {
    const resp = await fetch(`${this.baseUrl}/categories`);
    if (!resp.ok) throw new ApiError(resp.status, await errorMessage(resp));
    return (await resp.json()) as CategoryNode;
  }

  async profile(user: string): Promise<Profile> {
    const resp = await fetch(`${this.baseUrl}/profile?user=${encodeURIComponent(user)}`);
    if (!resp.ok) throw new ApiError(resp.status, await errorMessage(resp));
    return (await resp.json()) as Profile;
  }

  /** Record a click; resolves regardless of outcome so navigation never
   * waits on bookkeeping. Resolves true when the service accepted it. */
  async visit(user: string, url: string): Promise<boolean> {
    try {
      const resp = await fetch(`${this.baseUrl}/visit`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ user, url }),
      });
      return resp.ok;
    } catch {
      return false;
    }
  }
}
