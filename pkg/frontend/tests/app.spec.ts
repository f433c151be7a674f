// Console behavior against a mocked API: every displayed verdict must be
// traceable to one recorded API response, incomplete forms never fire
// requests, and the sweep-adopt round trip reproduces the adopted verdict.

import { beforeEach, describe, expect, it } from "vitest";

import type { Assessment, FieldKey, Prediction, RatingToken } from "../src/api.js";
import { ApiError } from "../src/api.js";
import { Console } from "../src/app.js";

class FakeApi {
  predictCalls: Assessment[] = [];
  whatIfCalls: Array<{ base: Assessment; feature: FieldKey }> = [];
  batchCalls: string[] = [];
  failNext: Error | null = null;
  responses = new Map<string, Prediction>();

  private verdictFor(a: Assessment): Prediction {
    const key = JSON.stringify(a);
    if (!this.responses.has(key)) {
      const risky = a.co === "N" || (a.co === "A" && a.ff === "N");
      this.responses.set(key, {
        label: risky ? "B" : "NB",
        score: risky ? 1.5 : -1.5,
        model_id: "fake00000001",
        algorithm: "svm",
      });
    }
    return this.responses.get(key)!;
  }

  async predict(assessment: Assessment): Promise<Prediction> {
    if (this.failNext) throw this.popFailure();
    this.predictCalls.push(assessment);
    return this.verdictFor(assessment);
  }

  async whatIf(base: Assessment, feature: FieldKey) {
    if (this.failNext) throw this.popFailure();
    this.whatIfCalls.push({ base, feature });
    const results = (["P", "A", "N"] as RatingToken[]).map((rating) => ({
      rating,
      prediction: this.verdictFor({ ...base, [feature]: rating }),
    }));
    return { feature, results };
  }

  async batch(csvBody: string) {
    if (this.failNext) throw this.popFailure();
    this.batchCalls.push(csvBody);
    return {
      csv:
        "IR,MR,FF,CR,CO,OR,Predicted,Score,Actual\n" +
        "N,N,N,N,N,N,B,0.950000,B\n" +
        "P,P,P,P,P,P,NB,0.050000,NB\n",
      errorPercent: 1.25,
    };
  }

  private popFailure(): Error {
    const failure = this.failNext!;
    this.failNext = null;
    return failure;
  }
}

const COMPLETE: Assessment = { ir: "P", mr: "A", ff: "P", cr: "P", co: "P", opr: "A" };

let root: HTMLElement;
let api: FakeApi;
let console_: Console;

function fillForm(assessment: Assessment): void {
  for (const [field, rating] of Object.entries(assessment)) {
    const button = root.querySelector<HTMLButtonElement>(
      `button[data-field="${field}"][data-rating="${rating}"]`,
    );
    button!.click();
  }
}

function submitButton(): HTMLButtonElement {
  return root.querySelector<HTMLButtonElement>("button.primary")!;
}

beforeEach(() => {
  document.body.innerHTML = "<main id='app'></main>";
  root = document.getElementById("app")!;
  api = new FakeApi();
  console_ = new Console(root, api);
});

describe("assessment form", () => {
  it("keeps submit disabled until all six ratings are chosen", () => {
    expect(submitButton().disabled).toBe(true);
    const partial = { ...COMPLETE } as Record<string, string>;
    delete partial.opr;
    for (const [field, rating] of Object.entries(partial)) {
      root
        .querySelector<HTMLButtonElement>(
          `button[data-field="${field}"][data-rating="${rating}"]`,
        )!
        .click();
    }
    expect(submitButton().disabled).toBe(true);
    root.querySelector<HTMLButtonElement>('button[data-field="opr"][data-rating="A"]')!.click();
    expect(submitButton().disabled).toBe(false);
  });

  it("never fires a request for an incomplete form", async () => {
    submitButton().click();
    await console_.submit();
    await console_.sweep();
    expect(api.predictCalls).toHaveLength(0);
    expect(api.whatIfCalls).toHaveLength(0);
  });

  it("renders exactly the API verdict on submit", async () => {
    fillForm(COMPLETE);
    await console_.submit();
    expect(api.predictCalls).toEqual([COMPLETE]);
    const recorded = await api.predict(COMPLETE); // same canned response
    const badge = root.querySelector<HTMLElement>(".verdict .badge")!;
    expect(badge.dataset.label).toBe(recorded.label);
    expect(root.querySelector(".verdict .score")!.textContent).toContain(
      recorded.score.toFixed(3),
    );
    expect(root.querySelector(".verdict .model-id")!.textContent).toContain(
      recorded.model_id,
    );
  });

  it("shows a banner on failure and preserves the form", async () => {
    fillForm(COMPLETE);
    api.failNext = new ApiError(503, "no model loaded");
    await console_.submit();
    const banner = root.querySelector<HTMLElement>(".banner")!;
    expect(banner.classList.contains("hidden")).toBe(false);
    expect(banner.textContent).toContain("503");
    expect(console_.getFormState()).toEqual(COMPLETE);
    expect(submitButton().disabled).toBe(false);
  });
});

describe("what-if sweep", () => {
  it("renders the three ratings in P, A, N order with API labels", async () => {
    fillForm(COMPLETE);
    const select = root.querySelector<HTMLSelectElement>("select")!;
    select.value = "co";
    await console_.sweep();
    const rows = [...root.querySelectorAll<HTMLElement>(".sweep-table tr[data-rating]")];
    expect(rows.map((r) => r.dataset.rating)).toEqual(["P", "A", "N"]);
    const sweep = await api.whatIf(COMPLETE, "co");
    rows.forEach((row, i) => {
      const verdictCell = row.querySelector<HTMLElement>("td[data-label]")!;
      expect(verdictCell.dataset.label).toBe(sweep.results[i].prediction.label);
    });
  });

  it("highlights the row matching the current form value", async () => {
    fillForm(COMPLETE); // co = P
    root.querySelector<HTMLSelectElement>("select")!.value = "co";
    await console_.sweep();
    const current = root.querySelector<HTMLElement>(".sweep-table tr.current")!;
    expect(current.dataset.rating).toBe("P");
  });

  it("adopting a row updates the form and round-trips the verdict", async () => {
    fillForm(COMPLETE);
    root.querySelector<HTMLSelectElement>("select")!.value = "co";
    await console_.sweep();
    const sweep = await api.whatIf(COMPLETE, "co");
    const nRow = root.querySelector<HTMLElement>('.sweep-table tr[data-rating="N"]')!;
    nRow.click();
    expect(console_.getFormState().co).toBe("N");
    expect(
      root.querySelector<HTMLElement>(".sweep-table tr.current")!.dataset.rating,
    ).toBe("N");

    await console_.submit();
    const badge = root.querySelector<HTMLElement>(".verdict .badge")!;
    const adopted = sweep.results.find((r) => r.rating === "N")!;
    expect(badge.dataset.label).toBe(adopted.prediction.label);
    expect(root.querySelector(".verdict .score")!.textContent).toContain(
      adopted.prediction.score.toFixed(3),
    );
  });
});

describe("batch scoring", () => {
  // jsdom has no createObjectURL; the download link only needs a URL string
  if (typeof URL.createObjectURL !== "function") {
    (URL as any).createObjectURL = () => "blob:fake";
  }

  function attachFile(content: string) {
    const input = root.querySelector<HTMLInputElement>('input[type="file"]')!;
    const file = new File([content], "batch.csv", { type: "text/csv" });
    Object.defineProperty(input, "files", { value: [file], configurable: true });
  }

  it("blocks empty files client-side", async () => {
    attachFile("");
    await console_.uploadBatch();
    expect(api.batchCalls).toHaveLength(0);
    expect(root.querySelector(".banner")!.textContent).toContain("non-empty");
  });

  it("renders the returned grid and error percentage", async () => {
    attachFile("N,N,N,N,N,N,B\nP,P,P,P,P,P,NB\n");
    await console_.uploadBatch();
    expect(api.batchCalls).toHaveLength(1);
    const cells = [...root.querySelectorAll<HTMLElement>(".batch-results td[data-label]")];
    expect(cells.map((c) => c.textContent)).toEqual(["B", "NB"]);
    expect(root.querySelector(".error-percent")!.textContent).toContain("1.2500%");
    const download = root.querySelector<HTMLAnchorElement>("a.download")!;
    expect(download.download).toBe("predictions.csv");
  });
});
