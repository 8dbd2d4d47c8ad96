/**
 * Session picker: who am I, which session, plus session creation.
 */

import type { Api } from "./api.js";
import { ApiError } from "./api.js";
import { el, escapeHtml, query, queryAll } from "./html.js";

export interface SessionsViewDeps {
  api: Api;
  me: string;
  sessionId: string | null;
  onIdentity: (me: string) => void;
  onSelect: (sessionId: string) => void;
  onNetworkError: (message: string, retry: () => void) => void;
}

export class SessionsView {
  constructor(
    private readonly container: HTMLElement,
    private readonly deps: SessionsViewDeps,
  ) {}

  async render(): Promise<void> {
    let sessions;
    try {
      sessions = (await this.deps.api.sessions()).sessions;
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      this.deps.onNetworkError(message, () => void this.render());
      return;
    }

    const rows = sessions.length
      ? sessions
          .map(
            (s) => `<tr class="session-row" data-session="${escapeHtml(s.id)}">
        <td><button type="button" class="pick">${escapeHtml(s.id)}</button></td>
        <td>${escapeHtml(s.project)}</td>
        <td>${s.annotators.map(escapeHtml).join(", ")}</td>
        <td>${s.defect_count}</td>
        <td class="progress">${s.progress.percent_complete}%</td>
      </tr>`,
          )
          .join("")
      : `<tr><td colspan="5" class="empty-state">no sessions yet</td></tr>`;

    const view = el(`<div class="sessions-view">
      <h2>Sessions</h2>
      <label class="identity">I am
        <input type="text" name="me" value="${escapeHtml(this.deps.me)}" placeholder="annotator id">
      </label>
      <p class="current">Active session:
        <strong class="active-session">${escapeHtml(this.deps.sessionId ?? "(none)")}</strong></p>
      <table class="session-table">
        <thead><tr><th>id</th><th>project</th><th>annotators</th><th>defects</th><th>progress</th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
      <details class="create-session">
        <summary>Create a session</summary>
        <form class="create-form">
          <label>Session id <input type="text" name="sid" placeholder="(generated if blank)"></label>
          <label>Project <input type="text" name="project"></label>
          <label>Defect ids <textarea name="defects" rows="2"
            placeholder="space or comma separated; blank = whole dataset"></textarea></label>
          <label>Annotators <input type="text" name="annotators" placeholder="ada, bea, cal"></label>
          <div class="form-error" role="alert"></div>
          <button type="submit">Create</button>
        </form>
      </details>
    </div>`);

    query<HTMLInputElement>(view, "input[name=me]").addEventListener("change", (e) =>
      this.deps.onIdentity((e.target as HTMLInputElement).value.trim()),
    );
    for (const button of queryAll<HTMLButtonElement>(view, ".pick")) {
      button.addEventListener("click", () => {
        const row = button.closest(".session-row") as HTMLElement;
        this.deps.onSelect(row.dataset["session"] ?? "");
      });
    }
    query<HTMLFormElement>(view, ".create-form").addEventListener("submit", (e) => {
      e.preventDefault();
      void this.create(e.target as HTMLFormElement);
    });

    this.container.replaceChildren(view);
  }

  private async create(form: HTMLFormElement): Promise<void> {
    const value = (name: string) =>
      (form.querySelector(`[name=${name}]`) as HTMLInputElement).value.trim();
    const errorEl = query(form, ".form-error");
    errorEl.textContent = "";
    const defectText = value("defects");
    const annotators = value("annotators")
      .split(/[\s,]+/)
      .filter(Boolean);
    const request = {
      ...(value("sid") ? { id: value("sid") } : {}),
      ...(value("project") ? { project: value("project") } : {}),
      ...(defectText
        ? { defects: defectText.split(/[\s,]+/).filter(Boolean) }
        : {}),
      annotators,
    };
    try {
      const created = await this.deps.api.createSession(request);
      this.deps.onSelect(created.id);
    } catch (err) {
      if (err instanceof ApiError) {
        errorEl.textContent = `${err.type}: ${err.detail}`;
      } else {
        const message = err instanceof Error ? err.message : String(err);
        this.deps.onNetworkError(message, () => void this.create(form));
      }
    }
  }
}
