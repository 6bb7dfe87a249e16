import { beforeEach, describe, expect, it, vi } from "vitest";

import type { YearReveal, YearRound } from "../src/api.js";
import { ScoreTally } from "../src/state.js";
import { YearGameView } from "../src/views/year-game.js";
import { fakeApi, flush, mount, waitFor } from "./helpers.js";

const ROUND: YearRound = { round_id: "round-a", image_url: "/images/pic-aa" };
const REVEAL: YearReveal = {
  correct: true,
  correct_year: 1944,
  title: "Harbor at dawn",
  static_points: 10,
  dynamic_points: "10.00",
  feedback: "This image was taken in 1944: Harbor at dawn",
};

function submitForm(root: HTMLElement): void {
  const form = root.querySelector("form.guess-form");
  form!.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

function typeGuess(root: HTMLElement, value: string): void {
  (root.querySelector(".year-input") as HTMLInputElement).value = value;
}

describe("YearGameView", () => {
  let root: HTMLElement;

  beforeEach(() => {
    root = mount();
  });

  it("renders a round with the photo and constrained input", async () => {
    const api = fakeApi({ newYearRound: vi.fn().mockResolvedValue(ROUND) });
    await new YearGameView(api, new ScoreTally(), root).start();
    const input = root.querySelector(".year-input") as HTMLInputElement;
    expect(input.min).toBe("1930");
    expect(input.max).toBe("1999");
    expect((root.querySelector(".round-photo") as HTMLImageElement).src)
      .toContain("/images/pic-aa");
  });

  it("rejects out-of-range input before any request", async () => {
    const submit = vi.fn();
    const api = fakeApi({
      newYearRound: vi.fn().mockResolvedValue(ROUND),
      submitYearGuess: submit,
    });
    await new YearGameView(api, new ScoreTally(), root).start();
    for (const bad of ["2005", "1893", "", "194x"]) {
      typeGuess(root, bad);
      submitForm(root);
      await flush();
    }
    expect(submit).not.toHaveBeenCalled();
    expect(root.querySelector(".input-error")!.classList.contains("hidden")).toBe(false);
  });

  it("reveals year, title, and both point values after a guess", async () => {
    const tally = new ScoreTally();
    const api = fakeApi({
      newYearRound: vi.fn().mockResolvedValue(ROUND),
      submitYearGuess: vi.fn().mockResolvedValue(REVEAL),
    });
    await new YearGameView(api, tally, root).start();
    typeGuess(root, "1944");
    submitForm(root);
    await waitFor(() => root.querySelector(".reveal") !== null);

    expect(root.querySelector(".correct-year")!.textContent).toBe("1944");
    expect(root.querySelector(".photo-title")!.textContent).toBe("Harbor at dawn");
    expect(root.querySelector(".static-points")!.textContent).toBe("10");
    expect(root.querySelector(".dynamic-points")!.textContent).toMatch(/^\d+\.\d{2}$/);
    expect(tally.dynamicDisplay).toBe("10.00");
    expect(root.querySelector(".next")).not.toBeNull();
  });

  it("issues exactly one scoring request on double submit", async () => {
    let release: (value: YearReveal) => void = () => {};
    const submit = vi.fn(() => new Promise<YearReveal>((resolve) => { release = resolve; }));
    const api = fakeApi({
      newYearRound: vi.fn().mockResolvedValue(ROUND),
      submitYearGuess: submit,
    });
    await new YearGameView(api, new ScoreTally(), root).start();
    typeGuess(root, "1950");
    submitForm(root);
    submitForm(root);   // double click while the first is in flight
    release(REVEAL);
    await waitFor(() => root.querySelector(".reveal") !== null);
    expect(submit).toHaveBeenCalledTimes(1);
  });

  it("offers a retry that reuses the same round id after a network failure", async () => {
    const submit = vi.fn()
      .mockRejectedValueOnce(new TypeError("fetch failed"))
      .mockResolvedValueOnce(REVEAL);
    const api = fakeApi({
      newYearRound: vi.fn().mockResolvedValue(ROUND),
      submitYearGuess: submit,
    });
    await new YearGameView(api, new ScoreTally(), root).start();
    typeGuess(root, "1951");
    submitForm(root);
    await waitFor(() => root.querySelector(".retry") !== null);

    (root.querySelector(".retry") as HTMLButtonElement).click();
    await waitFor(() => root.querySelector(".reveal") !== null);
    expect(submit).toHaveBeenCalledTimes(2);
    expect(submit.mock.calls[0][0]).toBe("round-a");
    expect(submit.mock.calls[1][0]).toBe("round-a");
  });

  it("shows a placeholder with a skip control when the photo 404s", async () => {
    const start = vi.fn().mockResolvedValue(ROUND);
    const api = fakeApi({ newYearRound: start });
    await new YearGameView(api, new ScoreTally(), root).start();
    const photo = root.querySelector(".round-photo") as HTMLImageElement;
    photo.dispatchEvent(new Event("error"));
    expect(root.querySelector(".photo-missing")!.classList.contains("hidden")).toBe(false);
    (root.querySelector(".skip") as HTMLButtonElement).click();
    await waitFor(() => start.mock.calls.length === 2);
  });
});
