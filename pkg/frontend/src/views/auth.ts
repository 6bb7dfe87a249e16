// Login / register screen, with one-click demo entry.

import { ApiClient, ApiError, SessionInfo } from "../api.js";
import { el } from "../dom.js";

const AGE_BRACKETS = ["14-18", "19-25", "26-40", "41+"];

export class AuthView {
  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly onSession: (session: SessionInfo) => void,
  ) {}

  start(): void {
    const options = AGE_BRACKETS
      .map((b) => `<option value="${b}">${b}</option>`)
      .join("");
    this.root.innerHTML = `
      <div class="auth">
        <h2>Sign in</h2>
        <form class="auth-form">
          <label>Username <input class="username" autocomplete="username" /></label>
          <label>Password <input class="password" type="password"
                 autocomplete="current-password" /></label>
          <label>Age group (optional, for new accounts)
            <select class="age-bracket">
              <option value="">prefer not to say</option>
              ${options}
            </select>
          </label>
          <div class="auth-actions">
            <button type="submit" class="login">Log in</button>
            <button type="button" class="register">Create account</button>
          </div>
          <p class="auth-error hidden"></p>
        </form>
        <p class="demo-entry">Just looking?
          <button class="demo">Play as guest</button></p>
      </div>`;

    el<HTMLFormElement>(this.root, ".auth-form").onsubmit = (event) => {
      event.preventDefault();
      void this.login();
    };
    el<HTMLButtonElement>(this.root, ".register").onclick = () => void this.register();
    el<HTMLButtonElement>(this.root, ".demo").onclick = () => void this.demo();
  }

  private value(selector: string): string {
    return el<HTMLInputElement>(this.root, selector).value.trim();
  }

  private showError(message: string): void {
    const error = el(this.root, ".auth-error");
    error.textContent = message;
    error.classList.remove("hidden");
  }

  private async login(): Promise<void> {
    try {
      this.onSession(await this.api.login(this.value(".username"), this.value(".password")));
    } catch (err) {
      this.showError(err instanceof ApiError && err.status === 401
        ? "Wrong username or password."
        : "Login failed; try again.");
    }
  }

  private async register(): Promise<void> {
    const username = this.value(".username");
    const password = this.value(".password");
    const bracket = el<HTMLSelectElement>(this.root, ".age-bracket").value || undefined;
    try {
      await this.api.register(username, password, bracket);
      this.onSession(await this.api.login(username, password));
    } catch (err) {
      if (err instanceof ApiError && err.code === "username_taken") {
        this.showError("That username is taken.");
      } else if (err instanceof ApiError && err.code === "weak_password") {
        this.showError("Password must be at least 8 characters.");
      } else {
        this.showError("Could not create the account.");
      }
    }
  }

  private async demo(): Promise<void> {
    try {
      this.onSession(await this.api.demo());
    } catch {
      this.showError("Demo mode is unavailable.");
    }
  }
}
