// "Timeline" screen: two photos side by side, pick the older one, then a
// reveal with both years, the server's feedback line, and the points.

import { ApiClient, ApiError, TimelineRound, TimelineReveal, TimelineSide } from "../api.js";
import { el, escapeHtml } from "../dom.js";
import { RoundState, ScoreTally } from "../state.js";

export class TimelineGameView {
  readonly state = new RoundState<TimelineRound, TimelineReveal>();
  private submitting = false;

  constructor(
    private readonly api: ApiClient,
    private readonly tally: ScoreTally,
    private readonly root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    this.root.innerHTML = `<p class="loading">Loading round…</p>`;
    try {
      this.state.startRound(await this.api.newTimelineRound());
    } catch (err) {
      this.renderLoadError();
      return;
    }
    this.renderGuessing();
  }

  private renderGuessing(): void {
    const round = this.state.round!;
    this.root.innerHTML = `
      <div class="round timeline-round">
        <p class="prompt">Which photo is older?</p>
        <div class="pair">
          <figure class="side left">
            <img class="photo-left round-photo" alt="left photo" />
            <button class="choose-left">Left is older</button>
          </figure>
          <figure class="side right">
            <img class="photo-right round-photo" alt="right photo" />
            <button class="choose-right">Right is older</button>
          </figure>
        </div>
        <p class="photo-missing hidden">An image failed to load.
          <button class="skip">Skip this round</button></p>
        <p class="submit-error hidden"></p>
      </div>`;
    this.wirePhoto(".photo-left", round.left_image_url);
    this.wirePhoto(".photo-right", round.right_image_url);
    el<HTMLButtonElement>(this.root, ".choose-left").onclick = () => void this.submit("left");
    el<HTMLButtonElement>(this.root, ".choose-right").onclick = () => void this.submit("right");
    el<HTMLButtonElement>(this.root, ".skip").onclick = () => void this.start();
  }

  private wirePhoto(selector: string, url: string): void {
    const photo = el<HTMLImageElement>(this.root, selector);
    photo.onerror = () => {
      photo.classList.add("placeholder");
      el(this.root, ".photo-missing").classList.remove("hidden");
    };
    photo.src = this.api.imageUrl(url);
  }

  private async submit(choice: TimelineSide): Promise<void> {
    if (this.submitting || this.state.phase !== "guessing") return;
    this.submitting = true;
    for (const selector of [".choose-left", ".choose-right"]) {
      el<HTMLButtonElement>(this.root, selector).disabled = true;
    }
    try {
      const reveal = await this.api.submitTimelineChoice(
        this.state.round!.round_id, choice,
      );
      this.state.reveal(reveal);
      this.tally.add(reveal.static_points, reveal.dynamic_points);
      this.renderRevealed(choice);
    } catch (err) {
      const error = el(this.root, ".submit-error");
      if (err instanceof ApiError) {
        error.textContent = err.code === "round_already_answered"
          ? "This round was already answered."
          : `Something went wrong (${err.code}).`;
      } else {
        error.textContent = "Could not reach the server; pick a side again to retry.";
        for (const selector of [".choose-left", ".choose-right"]) {
          el<HTMLButtonElement>(this.root, selector).disabled = false;
        }
      }
      error.classList.remove("hidden");
    } finally {
      this.submitting = false;
    }
  }

  private renderRevealed(choice: TimelineSide): void {
    const reveal = this.state.outcome!;
    this.root.innerHTML = `
      <div class="reveal ${reveal.correct ? "correct" : "incorrect"}">
        <p class="verdict">${reveal.correct ? "Correct!" : "Wrong side."}
          <span class="chosen">You picked ${choice}.</span></p>
        <p class="feedback">${escapeHtml(reveal.feedback)}</p>
        <dl class="outcome">
          <dt>Left year</dt><dd class="left-year">${reveal.left_year}</dd>
          <dt>Right year</dt><dd class="right-year">${reveal.right_year}</dd>
          <dt>Static points</dt><dd class="static-points">${reveal.static_points}</dd>
          <dt>Dynamic points</dt><dd class="dynamic-points">${escapeHtml(reveal.dynamic_points)}</dd>
        </dl>
        <button class="next">Next pair</button>
      </div>`;
    el<HTMLButtonElement>(this.root, ".next").onclick = () => void this.start();
  }

  private renderLoadError(): void {
    this.root.innerHTML = `
      <p class="load-error">Could not load a round.
        <button class="retry">Retry</button></p>`;
    el<HTMLButtonElement>(this.root, ".retry").onclick = () => void this.start();
  }
}
