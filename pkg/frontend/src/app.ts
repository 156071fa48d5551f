// Controller for the single-page feedback loop: search and rate books,
// retrain, browse ranked recommendations, drill into explanations. All
// mutations map to exactly one API call; the generation badge tracks
// profile freshness.

import { ApiError, Client } from "./api.js";
import {
  errorBanner,
  explanationTable,
  featureTable,
  generationBadge,
  recommendationTable,
  searchResults,
} from "./render.js";

const SHELL = `
  <header>
    <h1>Book recommender</h1>
    <span id="gen-badge" class="badge"></span>
    <button type="button" id="retrain" data-action="retrain">Retrain</button>
  </header>
  <div id="banner"></div>
  <main>
    <section id="search-section">
      <h2>Search &amp; rate</h2>
      <form id="search-form">
        <input id="search-box" type="search" placeholder="title or author" />
        <button type="submit">Search</button>
      </form>
      <div id="search-results"></div>
    </section>
    <section id="recs-section">
      <h2>Recommendations</h2>
      <div id="recommendations"></div>
      <div id="bottom"></div>
    </section>
    <aside id="drawer">
      <div id="explanation"></div>
      <div id="feature"></div>
    </aside>
  </main>
`;

export class App {
  private generation = 0;
  private viewGeneration: number | null = null;
  private pending: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly client: Client,
    private readonly topN = 10,
    private readonly bottomN = 5,
  ) {}

  /** Resolves when every action triggered so far has settled. */
  whenIdle(): Promise<void> {
    return this.pending;
  }

  private track(work: Promise<void>): void {
    this.pending = this.pending.then(() => work).catch(() => undefined);
  }

  private pane(id: string): HTMLElement {
    const el = this.root.querySelector<HTMLElement>(`#${id}`);
    if (!el) throw new Error(`missing pane #${id}`);
    return el;
  }

  private showError(err: unknown): void {
    const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    this.pane("banner").innerHTML = errorBanner(message);
  }

  private clearError(): void {
    this.pane("banner").innerHTML = "";
  }

  private renderBadge(): void {
    const stale = this.viewGeneration !== null && this.viewGeneration !== this.generation;
    this.pane("gen-badge").innerHTML = generationBadge(this.generation, stale);
  }

  async init(): Promise<void> {
    this.root.innerHTML = SHELL;
    this.root.addEventListener("click", (event) => this.onClick(event));
    const form = this.pane("search-form") as HTMLFormElement;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const box = this.pane("search-box") as HTMLInputElement;
      this.track(this.doSearch(box.value));
    });
    try {
      const status = await this.client.status();
      this.generation = status.generation;
      this.renderBadge();
      if (status.trained) {
        await this.refreshRecommendations();
      } else {
        this.pane("recommendations").innerHTML =
          `<p class="empty">No profile yet: search for books, rate a few, then hit Retrain.</p>`;
      }
    } catch (err) {
      this.showError(err);
    }
  }

  private onClick(event: Event): void {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!target) return;
    event.preventDefault();
    const action = target.dataset.action;
    if (action === "rate") {
      this.track(this.rate(target.dataset.id ?? "", Number(target.dataset.rating)));
    } else if (action === "retrain") {
      this.track(this.retrain());
    } else if (action === "explain") {
      this.track(this.showExplanation(target.dataset.id ?? ""));
    } else if (action === "feature") {
      this.track(this.showFeature(target.dataset.slot ?? "", target.dataset.token ?? ""));
    }
  }

  async doSearch(query: string): Promise<void> {
    try {
      const result = await this.client.search(query);
      this.pane("search-results").innerHTML = searchResults(result.items);
      this.clearError();
    } catch (err) {
      this.showError(err);
    }
  }

  async rate(id: string, rating: number): Promise<void> {
    try {
      await this.client.rate(id, rating);
      this.clearError();
      // reflect the stored value on every control for this book
      for (const control of this.root.querySelectorAll<HTMLElement>('[data-action="rate"]')) {
        if (control.dataset.id === id) {
          control.classList.toggle("active", Number(control.dataset.rating) === rating);
        }
      }
    } catch (err) {
      this.showError(err);
    }
  }

  async retrain(): Promise<void> {
    try {
      const result = await this.client.train();
      this.generation = result.generation;
      this.renderBadge(); // flags the current view stale until the refresh lands
      this.clearError();
      await this.refreshRecommendations();
    } catch (err) {
      this.showError(err);
    }
  }

  async refreshRecommendations(): Promise<void> {
    try {
      const top = await this.client.recommendations(this.topN);
      const worst = await this.client.bottom(this.bottomN);
      this.viewGeneration = top.generation;
      this.pane("recommendations").innerHTML = recommendationTable(top.entries, "Top picks");
      this.pane("bottom").innerHTML = recommendationTable(worst.entries, "Bottom of the list");
      this.renderBadge();
      this.clearError();
    } catch (err) {
      this.showError(err);
    }
  }

  async showExplanation(id: string): Promise<void> {
    try {
      const payload = await this.client.explain(id);
      this.pane("explanation").innerHTML = explanationTable(payload);
      this.pane("feature").innerHTML = "";
      this.clearError();
    } catch (err) {
      if (err instanceof ApiError && err.code === "not_found") {
        this.pane("explanation").innerHTML = `<p class="empty">Nothing known about this book.</p>`;
      } else {
        this.showError(err);
      }
    }
  }

  async showFeature(slot: string, token: string): Promise<void> {
    try {
      const payload = await this.client.explainFeature(slot, token);
      this.pane("feature").innerHTML = featureTable(payload);
      this.clearError();
    } catch (err) {
      if (err instanceof ApiError && err.code === "not_found") {
        this.pane("feature").innerHTML = `<p class="empty">That word is not in the profile.</p>`;
      } else {
        this.showError(err);
      }
    }
  }
}
