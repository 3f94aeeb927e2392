import type { Profile } from "./types";

/** Read-only view of the active user's topic weights. */
export class ProfilePanel {
  readonly element: HTMLElement;

  constructor() {
    this.element = document.createElement("aside");
    this.element.className = "profile-panel";
    this.render(null);
  }

  render(profile: Profile | null): void {
    this.element.textContent = "";
    const heading = document.createElement("h2");
    heading.textContent = "Profile";
    this.element.appendChild(heading);
    if (!profile || Object.keys(profile.weights).length === 0) {
      const empty = document.createElement("p");
      empty.className = "profile-empty";
      empty.textContent = "No topic weights yet. Click results to teach the ranking.";
      this.element.appendChild(empty);
      return;
    }
    const list = document.createElement("dl");
    const topics = Object.entries(profile.weights).sort(
      (a, b) => b[1] - a[1] || a[0].localeCompare(b[0]),
    );
    for (const [topic, weight] of topics) {
      const term = document.createElement("dt");
      term.textContent = topic;
      const value = document.createElement("dd");
      value.textContent = String(weight);
      list.append(term, value);
    }
    this.element.appendChild(list);
  }
}
