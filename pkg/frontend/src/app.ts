/**
 * App shell: navigation, identity/session state, error banners, and the
 * one-time rubric/taxonomy load every view shares. All state that matters
 * lives on the server; this object only remembers who the user says they
 * are and which session they are looking at.
 */

import type { Api, RubricView, TaxonomyView } from "./api.js";
import { DashboardView } from "./dashboardView.js";
import { DisputesView } from "./disputesView.js";
import { el, escapeHtml, query } from "./html.js";
import { LabelFlowView } from "./labelView.js";
import { SessionsView } from "./sessionsView.js";

export type ViewName = "sessions" | "label" | "disputes" | "dashboard";

export class App {
  me = "";
  sessionId: string | null = null;
  private rubric: RubricView | null = null;
  private taxonomy: TaxonomyView | null = null;
  private banner: HTMLElement;
  private view: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: Api,
  ) {
    root.replaceChildren(
      el(`<div class="app">
        <nav class="nav">
          <button type="button" data-view="sessions">Sessions</button>
          <button type="button" data-view="label">Label</button>
          <button type="button" data-view="disputes">Disputes</button>
          <button type="button" data-view="dashboard">Dashboard</button>
        </nav>
        <div class="banner hidden" role="alert"></div>
        <main class="view"></main>
      </div>`),
    );
    this.banner = query(root, ".banner");
    this.view = query(root, ".view");
    for (const button of Array.from(
      root.querySelectorAll<HTMLButtonElement>(".nav button"),
    )) {
      button.addEventListener("click", () =>
        void this.navigate(button.dataset["view"] as ViewName),
      );
    }
  }

  /** Load the shared rubric and taxonomy, then open the sessions view. */
  async boot(): Promise<void> {
    try {
      this.rubric = await this.api.rubric();
      this.taxonomy = await this.api.taxonomy();
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      this.showBanner(`Cannot reach the service: ${message}`, () =>
        void this.boot(),
      );
      return;
    }
    await this.navigate("sessions");
  }

  showBanner(message: string, retry?: () => void): void {
    const retryButton = retry
      ? `<button type="button" class="retry">Retry</button>`
      : "";
    this.banner.innerHTML = `<span class="banner-text">${escapeHtml(message)}</span>
      ${retryButton}
      <button type="button" class="dismiss">Dismiss</button>`;
    this.banner.classList.remove("hidden");
    this.banner
      .querySelector(".dismiss")
      ?.addEventListener("click", () => this.clearBanner());
    if (retry) {
      this.banner.querySelector(".retry")?.addEventListener("click", () => {
        this.clearBanner();
        retry();
      });
    }
  }

  clearBanner(): void {
    this.banner.classList.add("hidden");
    this.banner.innerHTML = "";
  }

  private needs(what: "identity" | "session"): boolean {
    if (what === "identity" && this.me === "") {
      this.view.replaceChildren(
        el(`<p class="needs-identity">Set who you are on the Sessions tab first.</p>`),
      );
      return true;
    }
    if (what === "session" && this.sessionId === null) {
      this.view.replaceChildren(
        el(`<p class="needs-session">Pick a session on the Sessions tab first.</p>`),
      );
      return true;
    }
    return false;
  }

  async navigate(name: ViewName): Promise<void> {
    this.clearBanner();
    const onNetworkError = (message: string, retry: () => void) =>
      this.showBanner(message, retry);

    if (name === "sessions") {
      await new SessionsView(this.view, {
        api: this.api,
        me: this.me,
        sessionId: this.sessionId,
        onIdentity: (me) => {
          this.me = me;
        },
        onSelect: (sessionId) => {
          this.sessionId = sessionId;
          void this.navigate("label");
        },
        onNetworkError,
      }).render();
      return;
    }

    if (name === "label") {
      if (this.needs("identity") || this.needs("session")) return;
      await new LabelFlowView(this.view, {
        api: this.api,
        rubric: this.rubric!,
        taxonomy: this.taxonomy!,
        sessionId: this.sessionId!,
        annotator: this.me,
        onNetworkError,
      }).start();
      return;
    }

    if (name === "disputes") {
      if (this.needs("identity") || this.needs("session")) return;
      await new DisputesView(this.view, {
        api: this.api,
        rubric: this.rubric!,
        sessionId: this.sessionId!,
        me: this.me,
        onNetworkError,
      }).render();
      return;
    }

    await new DashboardView(this.view, {
      api: this.api,
      sessionId: this.sessionId,
    }).render();
  }
}
