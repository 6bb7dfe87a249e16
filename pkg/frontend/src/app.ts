// Application shell: auth gate, tab navigation, and the running score strip.

import { ApiClient, SessionInfo } from "./api.js";
import { el, escapeHtml } from "./dom.js";
import { ScoreTally } from "./state.js";
import { AuthView } from "./views/auth.js";
import { LeaderboardView } from "./views/leaderboard.js";
import { PerformanceView } from "./views/performance.js";
import { TimelineGameView } from "./views/timeline-game.js";
import { YearGameView } from "./views/year-game.js";

type Tab = "year" | "timeline" | "leaderboard" | "performance";

export class App {
  private readonly tally = new ScoreTally();
  private session: SessionInfo | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient = new ApiClient(),
  ) {}

  start(): void {
    this.renderShell();
    const screen = el<HTMLElement>(this.root, ".screen");
    new AuthView(this.api, screen, (session) => {
      this.session = session;
      this.renderShell();
      void this.show("year");
    }).start();
  }

  private renderShell(): void {
    const who = this.session
      ? this.session.username
        ? `Playing as <strong>${escapeHtml(this.session.username)}</strong>`
        : "Playing as guest"
      : "";
    this.root.innerHTML = `
      <header class="top-bar">
        <h1>Guess the Age of Photos</h1>
        <nav class="tabs ${this.session ? "" : "hidden"}">
          <button data-tab="year">Guess the Year</button>
          <button data-tab="timeline">Timeline</button>
          <button data-tab="leaderboard">Leaderboard</button>
          <button data-tab="performance">My performance</button>
        </nav>
        <div class="session-strip ${this.session ? "" : "hidden"}">
          <span class="who">${who}</span>
          <span class="totals">Session points:
            <span class="total-static">${this.tally.staticDisplay}</span> static /
            <span class="total-dynamic">${this.tally.dynamicDisplay}</span> dynamic</span>
        </div>
      </header>
      <main class="screen"></main>`;
    this.tally.onChange(() => this.refreshTotals());
    this.root.querySelectorAll<HTMLButtonElement>(".tabs button").forEach((button) => {
      button.onclick = () => void this.show(button.dataset.tab as Tab);
    });
  }

  private refreshTotals(): void {
    const staticNode = this.root.querySelector(".total-static");
    const dynamicNode = this.root.querySelector(".total-dynamic");
    if (staticNode) staticNode.textContent = this.tally.staticDisplay;
    if (dynamicNode) dynamicNode.textContent = this.tally.dynamicDisplay;
  }

  async show(tab: Tab): Promise<void> {
    const screen = el<HTMLElement>(this.root, ".screen");
    this.root.querySelectorAll<HTMLButtonElement>(".tabs button").forEach((button) => {
      button.classList.toggle("active", button.dataset.tab === tab);
    });
    switch (tab) {
      case "year":
        await new YearGameView(this.api, this.tally, screen).start();
        break;
      case "timeline":
        await new TimelineGameView(this.api, this.tally, screen).start();
        break;
      case "leaderboard":
        await new LeaderboardView(this.api, screen).start();
        break;
      case "performance":
        await new PerformanceView(this.api, screen).start();
        break;
    }
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  new App(document.getElementById("app") as HTMLElement).start();
}
