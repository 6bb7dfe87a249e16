// Leaderboard screen: static and dynamic rankings side by side.

import { ApiClient, Leaderboard } from "../api.js";
import { el, escapeHtml } from "../dom.js";

export class LeaderboardView {
  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    this.root.innerHTML = `<p class="loading">Loading leaderboard…</p>`;
    let staticBoard: Leaderboard;
    let dynamicBoard: Leaderboard;
    try {
      [staticBoard, dynamicBoard] = await Promise.all([
        this.api.leaderboard("static"),
        this.api.leaderboard("dynamic"),
      ]);
    } catch {
      this.root.innerHTML = `<p class="load-error">Could not load the leaderboard.</p>`;
      return;
    }
    this.root.innerHTML = `
      <div class="leaderboard">
        <section class="board static-board">
          <h2>Static Scoring</h2>
          ${this.table(staticBoard, (e) => String(e.total_static))}
        </section>
        <section class="board dynamic-board">
          <h2>Dynamic Scoring</h2>
          ${this.table(dynamicBoard, (e) => e.total_dynamic)}
        </section>
      </div>`;
  }

  private table(board: Leaderboard, points: (e: Leaderboard["entries"][0]) => string): string {
    if (board.entries.length === 0) {
      return `<p class="empty-state">No scores yet. Be the first to play!</p>`;
    }
    const rows = board.entries
      .map(
        (entry) => `
          <tr>
            <td class="rank">${entry.rank}</td>
            <td class="username">${escapeHtml(entry.username)}</td>
            <td class="points">${escapeHtml(points(entry))}</td>
          </tr>`,
      )
      .join("");
    return `
      <table>
        <thead><tr><th>Rank</th><th>Username</th><th>Points</th></tr></thead>
        <tbody>${rows}</tbody>
      </table>`;
  }
}
