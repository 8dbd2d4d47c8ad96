/**
 * Labeling flow: fetch next task, render the form, submit, repeat.
 *
 * Blindness: the only data rendered here is the defect record itself plus
 * the rubric; co-annotator labels never reach this view (the server's next
 * endpoint does not serve them, and the view never asks for disputes or
 * stats while a task is on screen).
 */
import { ApiError } from "./api.js";
import { el, escapeHtml, option, query, queryAll } from "./html.js";
import { MAX_PATH_LENGTH, nextOptions, renderPath, startOptions } from "./paths.js";
import { previewSeverity } from "./severity.js";
export class LabelFlowView {
    container;
    deps;
    current = null;
    remaining = 0;
    impacts = [];
    pickerChain = [];
    pickerModel = "AI";
    constructor(container, deps) {
        this.container = container;
        this.deps = deps;
    }
    async start() {
        await this.loadNext();
    }
    async loadNext() {
        try {
            const task = await this.deps.api.nextTask(this.deps.sessionId, this.deps.annotator);
            this.current = task.defect;
            this.remaining = task.remaining;
        }
        catch (err) {
            this.failed(err, () => void this.loadNext());
            return;
        }
        this.impacts = [];
        this.pickerChain = [];
        if (this.current === null) {
            await this.renderDone();
        }
        else {
            this.renderForm(this.current);
        }
    }
    failed(err, retry) {
        const message = err instanceof Error ? err.message : String(err);
        this.deps.onNetworkError(message, retry);
    }
    /** Completed: show server-reported progress. */
    async renderDone() {
        let percent = "";
        try {
            const stats = await this.deps.api.stats(this.deps.sessionId);
            percent = `${stats.progress.percent_complete}`;
        }
        catch {
            percent = "?";
        }
        this.container.replaceChildren(el(`<div class="done-state">
        <h2>All defects labeled</h2>
        <p>No tasks left for <strong>${escapeHtml(this.deps.annotator)}</strong>
        in session <strong>${escapeHtml(this.deps.sessionId)}</strong>.</p>
        <p class="progress-line">Session progress:
          <span class="percent-complete">${escapeHtml(percent)}</span>% complete.</p>
      </div>`));
    }
    renderForm(defect) {
        const rubric = this.deps.rubric;
        const radios = rubric.ai_attributes
            .map((a) => `<label class="ai-option" title="${escapeHtml(a.description)}">
          <input type="radio" name="ai" value="${escapeHtml(a.value)}">
          ${escapeHtml(a.value)}
          <span class="hint">${escapeHtml(a.description)}</span>
        </label>`)
            .join("\n");
        const blank = `<option value="">(unset)</option>`;
        const ctxSelect = (name, values) => `<select name="${name}" class="ctx">${blank}${values.map((v) => option(v)).join("")}</select>`;
        const overrideOptions = rubric.severities
            .map((s) => option(s.value, `${s.value} (${s.rank})`))
            .join("");
        const links = defect.cross_refs.length
            ? `<p class="cross-refs">Related: ${defect.cross_refs
                .map((r) => `<a href="#defect-${escapeHtml(r)}">${escapeHtml(r)}</a>`)
                .join(", ")}</p>`
            : "";
        const view = el(`<div class="label-view">
      <div class="defect-card">
        <h2>${escapeHtml(defect.id)}: ${escapeHtml(defect.title)}</h2>
        <p class="meta">${escapeHtml(defect.platform)} / ${escapeHtml(defect.framework)}
          ${defect.defect_type_label ? `&middot; ${escapeHtml(defect.defect_type_label)}` : ""}</p>
        <p class="description">${escapeHtml(defect.description)}</p>
        ${links}
        <p class="remaining">Remaining for you: <span class="remaining-count">${this.remaining}</span></p>
      </div>
      <form class="label-form">
        <fieldset class="ai-select">
          <legend>AI attribute</legend>
          ${radios}
        </fieldset>
        <fieldset class="severity-select">
          <legend>Severity context</legend>
          <label>Criticality ${ctxSelect("criticality", rubric.criticality)}</label>
          <label>Reversibility ${ctxSelect("reversibility", rubric.reversibility)}</label>
          <label>Scope ${ctxSelect("scope", rubric.scope)}</label>
          <p class="severity-preview">Computed severity:
            <span class="severity-preview-value">(pick all three factors)</span></p>
          <label class="override">Override severity
            <select name="severity-override">${blank}${overrideOptions}</select>
          </label>
          <p class="override-note hidden">Overriding the computed severity requires a rationale.</p>
        </fieldset>
        <fieldset class="impact-select">
          <legend>Impact paths</legend>
          <div class="impact-picker">
            <select name="impact-model">
              <option value="AI">AI (model)</option>
              <option value="AIP">AIP (platform)</option>
            </select>
            <span class="chain"></span>
            <button type="button" class="add-impact" disabled>Add path</button>
          </div>
          <ul class="impact-list"></ul>
        </fieldset>
        <label class="rationale">Rationale
          <textarea name="rationale" rows="2"></textarea>
        </label>
        <div class="form-error" role="alert"></div>
        <button type="submit" class="submit-label" disabled>Submit label</button>
      </form>
    </div>`);
        const form = query(view, "form.label-form");
        form.addEventListener("input", () => this.syncForm(form));
        form.addEventListener("change", () => this.syncForm(form));
        form.addEventListener("submit", (event) => {
            event.preventDefault();
            void this.submit(form, defect);
        });
        query(view, ".add-impact").addEventListener("click", () => this.addImpact(form));
        query(view, "select[name=impact-model]").addEventListener("change", () => {
            this.pickerModel = this.readModel(form);
            this.pickerChain = [];
            this.renderChain(form);
        });
        this.container.replaceChildren(view);
        this.renderChain(form);
        this.syncForm(form);
    }
    // -- form state ----------------------------------------------------
    readModel(form) {
        const value = query(form, "select[name=impact-model]").value;
        return value === "AIP" ? "AIP" : "AI";
    }
    chosenAi(form) {
        const checked = form.querySelector("input[name=ai]:checked");
        return checked ? checked.value : null;
    }
    contextOf(form) {
        const get = (name) => query(form, `select[name=${name}]`).value;
        return [get("criticality"), get("reversibility"), get("scope")];
    }
    overrideOf(form) {
        return query(form, "select[name=severity-override]").value;
    }
    rationaleOf(form) {
        return query(form, "textarea[name=rationale]").value.trim();
    }
    /** Recompute preview text and the submit/override gates. */
    syncForm(form) {
        const [crit, rev, scope] = this.contextOf(form);
        const previewEl = query(form, ".severity-preview-value");
        if (crit && rev && scope) {
            const severity = previewSeverity(this.deps.rubric, crit, rev, scope);
            previewEl.textContent = severity ?? "(not in served matrix)";
        }
        else {
            previewEl.textContent = "(pick all three factors)";
        }
        const override = this.overrideOf(form);
        const needsRationale = override !== "" && this.rationaleOf(form) === "";
        query(form, ".override-note").classList.toggle("hidden", !needsRationale);
        const ready = this.chosenAi(form) !== null && !needsRationale;
        query(form, ".submit-label").disabled = !ready;
    }
    // -- impact picker -------------------------------------------------
    renderChain(form) {
        const tax = this.deps.taxonomy;
        const chainEl = query(form, ".chain");
        const parts = [];
        for (let i = 0; i <= this.pickerChain.length; i++) {
            if (i >= MAX_PATH_LENGTH)
                break;
            const prev = i === 0 ? null : this.pickerChain[i - 1];
            const options = prev
                ? nextOptions(tax, this.pickerModel, prev)
                : startOptions(tax, this.pickerModel);
            if (options.length === 0)
                break;
            const selected = this.pickerChain[i]?.name ?? "";
            parts.push(`<select class="chain-step" data-step="${i}">
          <option value="">${i === 0 ? "(characteristic)" : "(stop here)"}</option>
          ${options
                .map((c) => `<option value="${escapeHtml(c.name)}"${c.name === selected ? " selected" : ""}>
                  ${escapeHtml(c.name)}</option>`)
                .join("")}
        </select>`);
        }
        chainEl.innerHTML = parts.join(" / ");
        for (const select of queryAll(chainEl, ".chain-step")) {
            select.addEventListener("change", () => {
                const step = Number(select.dataset["step"]);
                const name = select.value;
                this.pickerChain = this.pickerChain.slice(0, step);
                if (name) {
                    const char = this.deps.taxonomy.characteristics.find((c) => c.name === name);
                    if (char)
                        this.pickerChain.push(char);
                }
                this.renderChain(form);
            });
        }
        query(form, ".add-impact").disabled =
            this.pickerChain.length === 0;
    }
    addImpact(form) {
        if (this.pickerChain.length === 0)
            return;
        const path = renderPath(this.pickerModel, this.pickerChain.map((c) => c.name));
        if (!this.impacts.includes(path))
            this.impacts.push(path);
        this.pickerChain = [];
        this.renderChain(form);
        this.renderImpactList(form);
    }
    renderImpactList(form) {
        const list = query(form, ".impact-list");
        list.innerHTML = this.impacts
            .map((p, i) => `<li class="impact-item">${escapeHtml(p)}
          <button type="button" class="remove-impact" data-index="${i}">remove</button></li>`)
            .join("");
        for (const button of queryAll(list, ".remove-impact")) {
            button.addEventListener("click", () => {
                this.impacts.splice(Number(button.dataset["index"]), 1);
                this.renderImpactList(form);
            });
        }
    }
    // -- submission ----------------------------------------------------
    buildSubmission(form, defect) {
        const ai = this.chosenAi(form);
        if (ai === null)
            return null;
        const [crit, rev, scope] = this.contextOf(form);
        const override = this.overrideOf(form);
        let severity = null;
        if (override) {
            severity = override;
        }
        else if (crit && rev && scope) {
            severity = previewSeverity(this.deps.rubric, crit, rev, scope);
        }
        const rationale = this.rationaleOf(form);
        return {
            defect_id: defect.id,
            ai,
            severity,
            impacts: [...this.impacts],
            rationale: rationale === "" ? null : rationale,
        };
    }
    async submit(form, defect) {
        const submission = this.buildSubmission(form, defect);
        if (submission === null)
            return;
        const errorEl = query(form, ".form-error");
        errorEl.textContent = "";
        try {
            await this.deps.api.submitLabel(this.deps.sessionId, this.deps.annotator, submission);
        }
        catch (err) {
            if (err instanceof ApiError && err.status >= 400 && err.status < 500) {
                errorEl.textContent = `${err.type}: ${err.detail}`;
            }
            else {
                this.failed(err, () => void this.submit(form, defect));
            }
            return;
        }
        await this.loadNext();
    }
}
