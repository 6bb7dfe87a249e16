import { vi } from "vitest";
import type { ApiClient } from "../src/api.js";

export async function waitFor(predicate: () => boolean, ms = 5_000): Promise<void> {
  const deadline = Date.now() + ms;
  while (!predicate()) {
    if (Date.now() > deadline) throw new Error("waitFor timed out");
    await new Promise((resolve) => setTimeout(resolve, 10));
  }
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

export function mount(): HTMLElement {
  document.body.innerHTML = `<div id="root"></div>`;
  return document.getElementById("root") as HTMLElement;
}

/** Minimal stub standing in for ApiClient in view unit tests. */
export function fakeApi(overrides: Partial<Record<keyof ApiClient, unknown>> = {}): ApiClient {
  const base = {
    imageUrl: (path: string) => path,
    newYearRound: vi.fn(),
    submitYearGuess: vi.fn(),
    newTimelineRound: vi.fn(),
    submitTimelineChoice: vi.fn(),
    leaderboard: vi.fn(),
    performance: vi.fn(),
    register: vi.fn(),
    login: vi.fn(),
    demo: vi.fn(),
    setToken: vi.fn(),
    sessionToken: null,
  };
  return Object.assign(base, overrides) as unknown as ApiClient;
}
