/**
 * Severity preview lookup.
 *
 * The preview shown while picking context factors is a pure lookup into the
 * severity_preview table served by GET /rubric. The matrix itself lives on
 * the server; recomputing it here would let the two drift.
 */

import type { RubricView } from "./api.js";

export function previewSeverity(
  rubric: RubricView,
  criticality: string,
  reversibility: string,
  scope: string,
): string | null {
  for (const entry of rubric.severity_preview) {
    if (
      entry.criticality === criticality &&
      entry.reversibility === reversibility &&
      entry.scope === scope
    ) {
      return entry.severity;
    }
  }
  return null;
}
