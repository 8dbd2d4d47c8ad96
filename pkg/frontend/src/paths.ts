/**
 * Impact-path picker constraints, derived from the served taxonomy.
 *
 * A path is a chain of characteristics whose layers ascend by exactly one.
 * AI-model paths must start at layer 1; platform (AIP) paths may start at
 * any layer. Shared characteristics are usable in either model. These are
 * the same structural rules the server enforces, derived from the flat
 * characteristic list GET /taxonomy serves.
 */

import type { Characteristic, TaxonomyView } from "./api.js";

export type PathModel = "AI" | "AIP";

export const MAX_PATH_LENGTH = 3;

function usableIn(char: Characteristic, model: PathModel): boolean {
  return char.model === model || char.model === "Shared";
}

/** Characteristics that may start a path for the given model. */
export function startOptions(
  tax: TaxonomyView,
  model: PathModel,
): Characteristic[] {
  return tax.characteristics.filter(
    (c) => usableIn(c, model) && (model === "AIP" || c.layer === 1),
  );
}

/** Characteristics that may follow `prev` in a path for the given model. */
export function nextOptions(
  tax: TaxonomyView,
  model: PathModel,
  prev: Characteristic,
): Characteristic[] {
  return tax.characteristics.filter(
    (c) => usableIn(c, model) && c.layer === prev.layer + 1,
  );
}

/** Wire form of a path, e.g. "AI:Trustworthiness/Accuracy". */
export function renderPath(model: PathModel, names: string[]): string {
  return `${model}:${names.join("/")}`;
}
