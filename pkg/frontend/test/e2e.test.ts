/**
 * Live end-to-end flow against a real service process:
 *
 * Two annotators label a 5-defect session through the browser flow, blind
 * to each other. One dispute surfaces, a third user resolves it, and the
 * dashboard heatmap marginals match the analysis endpoints exactly. The
 * service is killed and restarted mid-session, and no submitted label is
 * lost.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { existsSync, mkdtempSync } from "node:fs";
import * as http from "node:http";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import type { Api, FetchLike } from "../src/api.js";
import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { fire, waitFor } from "./fixtures.js";

// vitest runs with cwd at the frontend directory; the service package
// lives one level up
const REPO_ROOT = existsSync(resolve(process.cwd(), "pyproject.toml"))
  ? process.cwd()
  : resolve(process.cwd(), "..");
const HOST = "127.0.0.1";

// -- plain node:http fetch shim (the DOM environment's fetch is unused) ---

class HttpResponse {
  constructor(
    readonly status: number,
    readonly statusText: string,
    private readonly body: string,
  ) {}
  get ok(): boolean {
    return this.status >= 200 && this.status < 300;
  }
  json(): Promise<unknown> {
    return Promise.resolve(JSON.parse(this.body));
  }
}

const nodeFetch: FetchLike = (input, init) =>
  new Promise((resolvePromise, rejectPromise) => {
    const request = http.request(
      input,
      {
        method: init?.method ?? "GET",
        headers: (init?.headers as Record<string, string>) ?? {},
      },
      (response) => {
        let data = "";
        response.setEncoding("utf8");
        response.on("data", (chunk) => (data += chunk));
        response.on("end", () =>
          resolvePromise(
            new HttpResponse(
              response.statusCode ?? 0,
              response.statusMessage ?? "",
              data,
            ) as unknown as Response,
          ),
        );
      },
    );
    request.on("error", rejectPromise);
    if (init?.body) request.write(init.body);
    request.end();
  });

// -- service process management --------------------------------------------

let child: ChildProcess | null = null;
let port = 0;
let base = "";
let persistence = "";
let rawApi: Api;

function freePort(): Promise<number> {
  return new Promise((resolvePromise, rejectPromise) => {
    const server = http.createServer();
    server.listen(0, HOST, () => {
      const address = server.address();
      const found = typeof address === "object" && address ? address.port : 0;
      server.close(() => resolvePromise(found));
    });
    server.on("error", rejectPromise);
  });
}

async function healthy(): Promise<boolean> {
  try {
    const response = (await nodeFetch(
      `${base}/health`,
    )) as unknown as HttpResponse;
    return response.ok;
  } catch {
    return false;
  }
}

async function startServer(): Promise<void> {
  child = spawn(
    "python3",
    [
      "-m",
      "aiodc.cli",
      "serve",
      "--host",
      HOST,
      "--port",
      String(port),
      "--persistence",
      persistence,
    ],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  const start = Date.now();
  while (!(await healthy())) {
    if (Date.now() - start > 30_000) throw new Error("service never came up");
    await new Promise((r) => setTimeout(r, 150));
  }
}

async function stopServer(): Promise<void> {
  if (!child) return;
  const exited = new Promise((r) => child?.once("exit", r));
  child.kill("SIGTERM");
  await exited;
  child = null;
}

// -- DOM driving helpers ----------------------------------------------------

let app: App;
let root: HTMLElement;

function view(): HTMLElement {
  return root.querySelector(".view") as HTMLElement;
}

function setInput(selector: string, value: string): void {
  const input = view().querySelector<HTMLInputElement>(selector);
  if (!input) throw new Error(`no input ${selector}`);
  input.value = value;
  fire(input, "input");
  fire(input, "change");
}

function setSelect(name: string, value: string): void {
  const select = view().querySelector<HTMLSelectElement>(
    `select[name=${name}]`,
  );
  if (!select) throw new Error(`no select ${name}`);
  select.value = value;
  fire(select, "change");
}

function click(selector: string, scope: ParentNode = view()): void {
  const button = scope.querySelector<HTMLButtonElement>(selector);
  if (!button) throw new Error(`no button ${selector}`);
  button.click();
}

function currentDefectId(): string {
  const heading = view().querySelector(".defect-card h2");
  return heading?.textContent?.split(":")[0]?.trim() ?? "";
}

async function waitForDefect(id: string): Promise<void> {
  await waitFor(
    () => currentDefectId() === id,
    15_000,
    `defect ${id} on screen`,
  );
}

/** Become `who` via the sessions tab, then open `next`. */
async function actAs(who: string, next: "label" | "disputes"): Promise<void> {
  await app.navigate("sessions");
  await waitFor(
    () => view().querySelector("input[name=me]") !== null,
    10_000,
    "sessions view",
  );
  setInput("input[name=me]", who);
  await app.navigate(next);
}

const FIVE = ["KG-001", "KG-002", "KG-003", "KG-004", "KG-005"] as const;

interface Choice {
  ai: string;
  criticality: string;
  reversibility: string;
  scope: string;
  impact?: string;
}

// ada and bea agree everywhere except KG-002 (NotRelated vs Data), the
// one dispute. KG-005 varies the severity context and carries an impact
// path so the heatmap gets a second column and the union picker has work.
function choiceFor(who: string, id: string): Choice {
  const base: Choice = {
    ai: "NotRelated",
    criticality: "Enterprise",
    reversibility: "Transient",
    scope: "Localized",
  };
  if (id === "KG-002" && who === "bea") return { ...base, ai: "Data" };
  if (id === "KG-005") {
    return {
      ai: "Thinking",
      criticality: "Enterprise",
      reversibility: "Irreversible",
      scope: "Systemic",
      impact: "Trustworthiness",
    };
  }
  return base;
}

/** Fill the label form for the defect on screen without submitting. */
function fillForm(who: string): void {
  const choice = choiceFor(who, currentDefectId());
  const radio = view().querySelector<HTMLInputElement>(
    `input[name=ai][value=${choice.ai}]`,
  );
  if (!radio) throw new Error(`no AI option ${choice.ai}`);
  radio.checked = true;
  fire(radio, "change");
  setSelect("criticality", choice.criticality);
  setSelect("reversibility", choice.reversibility);
  setSelect("scope", choice.scope);
  if (choice.impact) {
    const chain0 = view().querySelector<HTMLSelectElement>(
      ".chain-step[data-step='0']",
    );
    if (!chain0) throw new Error("no impact chain select");
    chain0.value = choice.impact;
    fire(chain0, "change");
    click(".add-impact");
  }
}

async function labelCurrentDefect(who: string): Promise<void> {
  const before = currentDefectId();
  fillForm(who);
  click(".submit-label");
  await waitFor(
    () =>
      currentDefectId() !== before ||
      view().querySelector(".done-state") !== null,
    15_000,
    `advance past ${before}`,
  );
}

beforeAll(async () => {
  port = await freePort();
  base = `http://${HOST}:${port}`;
  persistence = join(mkdtempSync(join(tmpdir(), "aiodc-ui-")), "log.jsonl");
  await startServer();
  rawApi = new ApiClient(base, nodeFetch);
  root = document.createElement("div");
  document.body.replaceChildren(root);
  app = new App(root, new ApiClient(base, nodeFetch));
  await app.boot();
}, 120_000);

afterAll(async () => {
  await stopServer();
});

describe("browser flow against a live service", () => {
  it("runs a blind two-annotator session with a restart, a dispute, a third-party resolution, and exact dashboard numbers", async () => {
    // -- create the session through the form ---------------------------
    await waitFor(
      () => view().querySelector(".create-form") !== null,
      10_000,
      "sessions view",
    );
    setInput("input[name=me]", "ada");
    setInput("input[name=sid]", "e2e1");
    setInput("input[name=project]", "ui walkthrough");
    const defectsBox = view().querySelector<HTMLTextAreaElement>(
      "textarea[name=defects]",
    );
    if (!defectsBox) throw new Error("no defects box");
    defectsBox.value = FIVE.join(" ");
    setInput("input[name=annotators]", "ada, bea, cal");
    click(".create-form button[type=submit]");
    await waitFor(
      () => view().querySelector(".defect-card") !== null,
      15_000,
      "labeling view after create",
    );

    // -- ada labels, with a service restart in the middle --------------
    await waitForDefect("KG-001");
    await labelCurrentDefect("ada");
    await waitForDefect("KG-002");
    await labelCurrentDefect("ada");
    await waitForDefect("KG-003");

    // fill the form, kill the service, submit into the outage
    fillForm("ada");
    await stopServer();
    click(".submit-label");
    const banner = root.querySelector(".banner") as HTMLElement;
    await waitFor(
      () => !banner.classList.contains("hidden"),
      15_000,
      "outage banner",
    );
    await startServer();
    click(".retry", banner);
    await waitForDefect("KG-004");
    await labelCurrentDefect("ada");
    await waitForDefect("KG-005");
    await labelCurrentDefect("ada");
    await waitFor(
      () => view().querySelector(".done-state") !== null,
      15_000,
      "ada done",
    );

    // the restart lost nothing: the service has all five of ada's labels
    const afterAda = await rawApi.nextTask("e2e1", "ada");
    expect(afterAda.defect).toBeNull();
    expect(afterAda.remaining).toBe(0);
    const statsAfterAda = await rawApi.stats("e2e1");
    expect(statsAfterAda.progress.pending).toBe(5); // bea still owes all 5

    // -- bea labels blind -----------------------------------------------
    await actAs("bea", "label");
    for (const id of FIVE) {
      await waitForDefect(id);
      // blindness: nothing of ada's work is in the rendered DOM
      expect(view().textContent ?? "").not.toMatch(/\bada\b/);
      expect(view().querySelector(".label-card")).toBeNull();
      await labelCurrentDefect("bea");
    }
    await waitFor(
      () => view().querySelector(".done-state") !== null,
      15_000,
      "bea done",
    );

    // -- exactly one dispute, resolved by the third person --------------
    await actAs("cal", "disputes");
    await waitFor(
      () => view().querySelectorAll(".dispute").length === 1,
      15_000,
      "one dispute listed",
    );
    const dispute = view().querySelector(".dispute") as HTMLElement;
    expect(dispute.dataset["defect"]).toBe("KG-002");
    const cards = Array.from(dispute.querySelectorAll(".label-card"));
    const ais = cards.map((c) => c.querySelector(".ai")?.textContent?.trim());
    expect([...ais].sort()).toEqual(["Data", "NotRelated"]);
    // cal has resolve controls (not a party) and adopts the NotRelated side
    expect(dispute.querySelector(".party-note")).toBeNull();
    const side = ais.indexOf("NotRelated");
    click(`[data-adopt='${side}']`, dispute);
    await waitFor(
      () => view().querySelector(".empty-state") !== null,
      15_000,
      "disputes drained",
    );

    // -- dashboard equals the analysis endpoints exactly -----------------
    await app.navigate("dashboard");
    await waitFor(
      () => view().querySelector(".heatmap") !== null,
      15_000,
      "dashboard",
    );
    const raw = await rawApi.twoWay("e2e1");
    raw.row_categories.forEach((rowCat, i) => {
      raw.col_categories.forEach((colCat, j) => {
        const cell = view().querySelector(
          `.heat-cell[data-row=${rowCat}][data-col=${colCat}]`,
        );
        expect(cell, `cell ${rowCat}/${colCat}`).not.toBeNull();
        expect(cell?.textContent?.trim()).toBe(String(raw.counts[i]?.[j]));
      });
      const marginal = view().querySelector(
        `.row-marginal[data-row=${rowCat}]`,
      );
      expect(marginal?.textContent).toBe(String(raw.row_marginals[i]));
    });
    raw.col_categories.forEach((colCat, j) => {
      const marginal = view().querySelector(
        `.col-marginal[data-col=${colCat}]`,
      );
      expect(marginal?.textContent).toBe(String(raw.col_marginals[j]));
    });
    expect(view().querySelector(".grand-total")?.textContent).toBe(
      String(raw.total),
    );
    expect(raw.total).toBe(5); // 4 agreed + 1 resolved, nothing dropped

    // one-way bars show the served distribution verbatim
    const oneWay = await rawApi.oneWay("ai", "e2e1");
    for (const row of oneWay.rows) {
      const bar = view().querySelector(
        `.one-way[data-attribute=ai] .bar-row[data-category=${row.category}]`,
      );
      expect(bar, `bar ${row.category}`).not.toBeNull();
      expect(bar?.querySelector(".bar-count")?.textContent).toBe(
        String(row.count),
      );
      expect(bar?.querySelector(".bar-percent")?.textContent).toBe(
        `${row.percent}%`,
      );
    }

    // the agreement gauge shows the served kappa verbatim
    const stats = await rawApi.stats("e2e1");
    const served = stats.agreement["ai"];
    const gauge = view().querySelector(".kappa-gauge[data-attribute=ai]");
    expect(gauge).not.toBeNull();
    if (served && "kappa" in served) {
      expect(gauge?.querySelector(".kappa-value")?.textContent).toBe(
        String(served.kappa),
      );
    } else {
      throw new Error("expected numeric ai agreement after a full session");
    }
  }, 180_000);
});
