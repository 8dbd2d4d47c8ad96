/**
 * Session picker: who am I, which session, plus session creation.
 */
import { ApiError } from "./api.js";
import { el, escapeHtml, query, queryAll } from "./html.js";
export class SessionsView {
    container;
    deps;
    constructor(container, deps) {
        this.container = container;
        this.deps = deps;
    }
    async render() {
        let sessions;
        try {
            sessions = (await this.deps.api.sessions()).sessions;
        }
        catch (err) {
            const message = err instanceof Error ? err.message : String(err);
            this.deps.onNetworkError(message, () => void this.render());
            return;
        }
        const rows = sessions.length
            ? sessions
                .map((s) => `<tr class="session-row" data-session="${escapeHtml(s.id)}">
        <td><button type="button" class="pick">${escapeHtml(s.id)}</button></td>
        <td>${escapeHtml(s.project)}</td>
        <td>${s.annotators.map(escapeHtml).join(", ")}</td>
        <td>${s.defect_count}</td>
        <td class="progress">${s.progress.percent_complete}%</td>
      </tr>`)
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
        query(view, "input[name=me]").addEventListener("change", (e) => this.deps.onIdentity(e.target.value.trim()));
        for (const button of queryAll(view, ".pick")) {
            button.addEventListener("click", () => {
                const row = button.closest(".session-row");
                this.deps.onSelect(row.dataset["session"] ?? "");
            });
        }
        query(view, ".create-form").addEventListener("submit", (e) => {
            e.preventDefault();
            void this.create(e.target);
        });
        this.container.replaceChildren(view);
    }
    async create(form) {
        const value = (name) => form.querySelector(`[name=${name}]`).value.trim();
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
        }
        catch (err) {
            if (err instanceof ApiError) {
                errorEl.textContent = `${err.type}: ${err.detail}`;
            }
            else {
                const message = err instanceof Error ? err.message : String(err);
                this.deps.onNetworkError(message, () => void this.create(form));
            }
        }
    }
}
