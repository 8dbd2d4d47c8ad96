import { describe, expect, it } from "vitest";

import { previewSeverity } from "../src/severity.js";
import { RUBRIC } from "./fixtures.js";

describe("severity preview lookup", () => {
  it("returns exactly what the served table says, even when implausible", () => {
    // The fixture maps Enterprise/Irreversible/Systemic to Low on purpose:
    // a client that computed the matrix itself would say Catastrophic.
    expect(
      previewSeverity(RUBRIC, "Enterprise", "Irreversible", "Systemic"),
    ).toBe("Low");
    expect(
      previewSeverity(RUBRIC, "Enterprise", "Transient", "Localized"),
    ).toBe("Catastrophic");
    expect(
      previewSeverity(RUBRIC, "SafetyCritical", "Reversible", "Systemic"),
    ).toBe("High");
  });

  it("returns null for combinations the server did not serve", () => {
    expect(
      previewSeverity(RUBRIC, "NonCritical", "Transient", "Localized"),
    ).toBeNull();
    expect(previewSeverity(RUBRIC, "", "", "")).toBeNull();
  });
});
