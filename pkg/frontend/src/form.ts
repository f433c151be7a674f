// Six three-state segmented selectors; the form is submittable only once
// every rating has a value.

import type { Assessment, FieldKey, RatingToken } from "./api.js";
import { FIELD_KEYS } from "./api.js";

export const FIELD_LABELS: Record<FieldKey, string> = {
  ir: "Industrial Risk",
  mr: "Management Risk",
  ff: "Financial Flexibility",
  cr: "Credibility",
  co: "Competitiveness",
  opr: "Operating Risk",
};

export const RATING_TOKENS: RatingToken[] = ["P", "A", "N"];

export const RATING_LABELS: Record<RatingToken, string> = {
  P: "Positive",
  A: "Average",
  N: "Negative",
};

export type FormState = Partial<Record<FieldKey, RatingToken>>;

export function isComplete(state: FormState): state is Assessment {
  return FIELD_KEYS.every((key) => state[key] !== undefined);
}

export interface FormHandle {
  element: HTMLElement;
  getState(): FormState;
  setRating(field: FieldKey, rating: RatingToken): void;
}

/** Render the selector grid; onChange fires after every rating change. */
export function createAssessmentForm(onChange: (state: FormState) => void): FormHandle {
  const state: FormState = {};
  const element = document.createElement("div");
  element.className = "assessment-form";

  const buttons = new Map<string, HTMLButtonElement>();

  for (const field of FIELD_KEYS) {
    const row = document.createElement("div");
    row.className = "form-row";

    const label = document.createElement("label");
    label.textContent = FIELD_LABELS[field];
    row.appendChild(label);

    const group = document.createElement("div");
    group.className = "segmented";
    group.dataset.field = field;
    for (const token of RATING_TOKENS) {
      const button = document.createElement("button");
      button.type = "button";
      button.textContent = token;
      button.title = RATING_LABELS[token];
      button.dataset.field = field;
      button.dataset.rating = token;
      button.addEventListener("click", () => setRating(field, token));
      buttons.set(`${field}:${token}`, button);
      group.appendChild(button);
    }
    row.appendChild(group);
    element.appendChild(row);
  }

  function setRating(field: FieldKey, rating: RatingToken): void {
    state[field] = rating;
    for (const token of RATING_TOKENS) {
      buttons.get(`${field}:${token}`)!.classList.toggle("selected", token === rating);
    }
    onChange({ ...state });
  }

  return {
    element,
    getState: () => ({ ...state }),
    setRating,
  };
}
