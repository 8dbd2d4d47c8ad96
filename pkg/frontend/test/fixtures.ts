/** Shared wire-shaped fixtures and a stub Api for the view tests. */

import type {
  Api,
  DefectView,
  DisputesView,
  DistributionView,
  NextTask,
  RubricView,
  StatsView,
  SubmitResponse,
  TaxonomyView,
  TwoWayView,
} from "../src/api.js";

export const RUBRIC: RubricView = {
  ai_attributes: [
    { value: "Data", description: "Defects in the training or testing data." },
    { value: "Learning", description: "Defects in the model training process." },
    {
      value: "Thinking",
      description: "Defects in inference, logic, or decision making.",
    },
    {
      value: "NotRelated",
      description: "Defects unrelated to AI logic or behavior.",
    },
  ],
  severities: [
    { value: "Catastrophic", rank: 5, description: "worst" },
    { value: "Critical", rank: 4, description: "bad" },
    { value: "High", rank: 3, description: "serious" },
    { value: "Medium", rank: 2, description: "routine" },
    { value: "Low", rank: 1, description: "minor" },
  ],
  criticality: ["SafetyCritical", "Enterprise", "NonCritical"],
  reversibility: ["Irreversible", "Reversible", "Transient"],
  scope: ["Systemic", "Localized"],
  severity_preview: [
    // Deliberately NOT the real matrix: the preview must be displayed as
    // served, which is how the tests prove nothing is computed locally.
    {
      criticality: "Enterprise",
      reversibility: "Irreversible",
      scope: "Systemic",
      severity: "Low",
    },
    {
      criticality: "Enterprise",
      reversibility: "Transient",
      scope: "Localized",
      severity: "Catastrophic",
    },
    {
      criticality: "SafetyCritical",
      reversibility: "Reversible",
      scope: "Systemic",
      severity: "High",
    },
  ],
};

export const TAXONOMY: TaxonomyView = {
  version: "1.0",
  characteristics: [
    { name: "Effectiveness", model: "Shared", layer: 1 },
    { name: "Explainability", model: "AI", layer: 1 },
    { name: "Maintainability", model: "AIP", layer: 1 },
    { name: "Reliability", model: "AIP", layer: 1 },
    { name: "Security", model: "AI", layer: 1 },
    { name: "Trustworthiness", model: "AI", layer: 1 },
    { name: "Accuracy", model: "Shared", layer: 2 },
    { name: "Completeness", model: "AI", layer: 2 },
    { name: "Integrity", model: "AI", layer: 2 },
    { name: "Robustness", model: "Shared", layer: 2 },
  ],
};

export function defect(id: string, title = `defect ${id}`): DefectView {
  return {
    id,
    platform: "GitHub",
    framework: "keras",
    title,
    description: `${title}. Something is wrong.`,
    defect_type_label: "wrong layer type",
    cross_refs: [],
    odc: null,
    created_at: "2021-01-01",
  };
}

/**
 * Minimal scriptable Api. Methods reject unless a handler is installed.
 */
export class StubApi implements Api {
  calls: string[] = [];
  nextTaskHandler: (annotator: string) => Promise<NextTask> = () =>
    Promise.reject(new Error("nextTask not scripted"));
  submitLabelHandler: (
    annotator: string,
    label: unknown,
  ) => Promise<SubmitResponse> = () =>
    Promise.reject(new Error("submitLabel not scripted"));
  disputesHandler: (attribute: string) => Promise<DisputesView> = () =>
    Promise.reject(new Error("disputes not scripted"));
  resolveHandler: (resolver: string, label: unknown) => Promise<SubmitResponse> =
    () => Promise.reject(new Error("resolve not scripted"));
  statsHandler: () => Promise<StatsView> = () =>
    Promise.reject(new Error("stats not scripted"));
  oneWayHandler: (attr: string, session?: string) => Promise<DistributionView> =
    () => Promise.reject(new Error("oneWay not scripted"));
  twoWayHandler: (session?: string) => Promise<TwoWayView> = () =>
    Promise.reject(new Error("twoWay not scripted"));

  health() {
    this.calls.push("health");
    return Promise.resolve({ status: "ok", sessions: 0 });
  }
  taxonomy() {
    this.calls.push("taxonomy");
    return Promise.resolve(TAXONOMY);
  }
  rubric() {
    this.calls.push("rubric");
    return Promise.resolve(RUBRIC);
  }
  sessions() {
    this.calls.push("sessions");
    return Promise.resolve({ sessions: [] });
  }
  createSession(): Promise<never> {
    this.calls.push("createSession");
    return Promise.reject(new Error("createSession not scripted"));
  }
  nextTask(_sid: string, annotator: string) {
    this.calls.push(`nextTask:${annotator}`);
    return this.nextTaskHandler(annotator);
  }
  submitLabel(_sid: string, annotator: string, label: unknown) {
    this.calls.push(`submitLabel:${annotator}`);
    return this.submitLabelHandler(annotator, label);
  }
  disputes(_sid: string, attribute = "combined") {
    this.calls.push(`disputes:${attribute}`);
    return this.disputesHandler(attribute);
  }
  resolve(_sid: string, resolver: string, label: unknown) {
    this.calls.push(`resolve:${resolver}`);
    return this.resolveHandler(resolver, label);
  }
  stats() {
    this.calls.push("stats");
    return this.statsHandler();
  }
  oneWay(attr: string, session?: string) {
    this.calls.push(`oneWay:${attr}`);
    return this.oneWayHandler(attr, session);
  }
  twoWay(session?: string) {
    this.calls.push("twoWay");
    return this.twoWayHandler(session);
  }
}

/** Poll until the predicate holds or time runs out. */
export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 5000,
  what = "condition",
): Promise<void> {
  const start = Date.now();
  while (!predicate()) {
    if (Date.now() - start > timeoutMs) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((r) => setTimeout(r, 10));
  }
}

export function fire(target: EventTarget, type: string): void {
  target.dispatchEvent(new Event(type, { bubbles: true }));
}
