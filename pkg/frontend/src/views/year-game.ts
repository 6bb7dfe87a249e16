// "Guess the Year" screen: one photo, a year input constrained to
// 1930-1999, then a reveal with the correct year, title, and both scores.

import { ApiClient, ApiError, YearRound, YearReveal } from "../api.js";
import { el, escapeHtml } from "../dom.js";
import { RoundState, ScoreTally } from "../state.js";

export const YEAR_MIN = 1930;
export const YEAR_MAX = 1999;

export class YearGameView {
  readonly state = new RoundState<YearRound, YearReveal>();
  private submitting = false;

  constructor(
    private readonly api: ApiClient,
    private readonly tally: ScoreTally,
    private readonly root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    this.root.innerHTML = `<p class="loading">Loading round…</p>`;
    try {
      this.state.startRound(await this.api.newYearRound());
    } catch (err) {
      this.renderLoadError(err);
      return;
    }
    this.renderGuessing();
  }

  private renderGuessing(): void {
    const round = this.state.round!;
    this.root.innerHTML = `
      <div class="round year-round">
        <img class="round-photo" alt="historical photo" />
        <p class="photo-missing hidden">Image unavailable.
          <button class="skip">Skip this round</button></p>
        <form class="guess-form">
          <label>Which year was this photo taken?
            <input class="year-input" type="number"
                   min="${YEAR_MIN}" max="${YEAR_MAX}" step="1"
                   placeholder="${YEAR_MIN}–${YEAR_MAX}" required />
          </label>
          <button type="submit" class="submit">Submit guess</button>
          <p class="input-error hidden"></p>
        </form>
      </div>`;
    const photo = el<HTMLImageElement>(this.root, ".round-photo");
    photo.onerror = () => {
      photo.classList.add("hidden");
      el(this.root, ".photo-missing").classList.remove("hidden");
    };
    photo.src = this.api.imageUrl(round.image_url);
    el<HTMLButtonElement>(this.root, ".skip").onclick = (event) => {
      event.preventDefault();
      void this.start();
    };
    el<HTMLFormElement>(this.root, ".guess-form").onsubmit = (event) => {
      event.preventDefault();
      void this.submit();
    };
  }

  private async submit(): Promise<void> {
    if (this.submitting || this.state.phase !== "guessing") return;
    const field = el<HTMLInputElement>(this.root, ".year-input");
    const error = el(this.root, ".input-error");
    const guess = Number(field.value);
    if (!Number.isInteger(guess) || guess < YEAR_MIN || guess > YEAR_MAX) {
      error.textContent = `Enter a year between ${YEAR_MIN} and ${YEAR_MAX}.`;
      error.classList.remove("hidden");
      return;
    }
    error.classList.add("hidden");
    this.submitting = true;
    const button = el<HTMLButtonElement>(this.root, ".submit");
    button.disabled = true;
    const roundId = this.state.round!.round_id;
    try {
      const reveal = await this.api.submitYearGuess(roundId, guess);
      this.state.reveal(reveal);
      this.tally.add(reveal.static_points, reveal.dynamic_points);
      this.renderRevealed(guess);
    } catch (err) {
      if (err instanceof ApiError && err.code === "round_already_answered") {
        error.textContent = "This round was already answered.";
        error.classList.remove("hidden");
      } else {
        this.renderRetry(guess, err);
        return;
      }
    } finally {
      this.submitting = false;
    }
  }

  private renderRevealed(guess: number): void {
    const reveal = this.state.outcome!;
    this.root.innerHTML = `
      <div class="reveal ${reveal.correct ? "correct" : "incorrect"}">
        <p class="verdict">${reveal.correct ? "Within five years!" : "Not quite."}</p>
        <p class="feedback">${escapeHtml(reveal.feedback)}</p>
        <dl class="outcome">
          <dt>Your guess</dt><dd class="your-guess">${guess}</dd>
          <dt>Correct year</dt><dd class="correct-year">${reveal.correct_year}</dd>
          <dt>Title</dt><dd class="photo-title">${escapeHtml(reveal.title)}</dd>
          <dt>Static points</dt><dd class="static-points">${reveal.static_points}</dd>
          <dt>Dynamic points</dt><dd class="dynamic-points">${escapeHtml(reveal.dynamic_points)}</dd>
        </dl>
        <button class="next">Next photo</button>
      </div>`;
    el<HTMLButtonElement>(this.root, ".next").onclick = () => void this.start();
  }

  private renderRetry(guess: number, err: unknown): void {
    // Network failure: keep the round id so the same round can be retried.
    el<HTMLButtonElement>(this.root, ".submit").disabled = false;
    const error = el(this.root, ".input-error");
    error.textContent = "Could not reach the server. ";
    const retry = document.createElement("button");
    retry.className = "retry";
    retry.textContent = "Retry";
    retry.onclick = (event) => {
      event.preventDefault();
      error.classList.add("hidden");
      void this.submit();
    };
    error.appendChild(retry);
    error.classList.remove("hidden");
  }

  private renderLoadError(err: unknown): void {
    this.root.innerHTML = `
      <p class="load-error">Could not load a round.
        <button class="retry">Retry</button></p>`;
    el<HTMLButtonElement>(this.root, ".retry").onclick = () => void this.start();
  }
}
