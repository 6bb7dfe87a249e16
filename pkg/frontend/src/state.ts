// Client round state machine and the running score tally.
//
// While a round is in the "guessing" phase the state holds only the round
// payload (ids and image urls, no years); outcome data exists only after
// reveal. Transitions are locked to guessing -> revealed -> (new) guessing.

import { dynamicToCents, centsToDisplay } from "./format.js";

export type Phase = "idle" | "guessing" | "revealed";

export class RoundState<TRound, TOutcome> {
  private _phase: Phase = "idle";
  private _round: TRound | null = null;
  private _outcome: TOutcome | null = null;

  get phase(): Phase {
    return this._phase;
  }

  get round(): TRound | null {
    return this._round;
  }

  get outcome(): TOutcome | null {
    return this._outcome;
  }

  startRound(round: TRound): void {
    if (this._phase === "guessing") {
      throw new Error("cannot start a round while one is being guessed");
    }
    this._round = round;
    this._outcome = null;
    this._phase = "guessing";
  }

  reveal(outcome: TOutcome): void {
    if (this._phase !== "guessing") {
      throw new Error(`cannot reveal from phase ${this._phase}`);
    }
    this._outcome = outcome;
    this._phase = "revealed";
  }
}

export class ScoreTally {
  private staticTotal = 0;
  private dynamicCents = 0;
  private listeners: Array<() => void> = [];

  add(staticPoints: number, dynamicPoints: string): void {
    this.staticTotal += staticPoints;
    this.dynamicCents += dynamicToCents(dynamicPoints);
    for (const listener of this.listeners) listener();
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  get staticDisplay(): string {
    return String(this.staticTotal);
  }

  get dynamicDisplay(): string {
    return centsToDisplay(this.dynamicCents);
  }
}
