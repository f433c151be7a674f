// Typed client for the bankrisk prediction service. Every verdict shown in
// the console comes from one of these calls; nothing is predicted locally.

export type RatingToken = "P" | "A" | "N";
export type FieldKey = "ir" | "mr" | "ff" | "cr" | "co" | "opr";

export const FIELD_KEYS: FieldKey[] = ["ir", "mr", "ff", "cr", "co", "opr"];

export interface Assessment {
  ir: RatingToken;
  mr: RatingToken;
  ff: RatingToken;
  cr: RatingToken;
  co: RatingToken;
  opr: RatingToken;
}

export interface Prediction {
  label: "B" | "NB";
  score: number;
  model_id: string;
  algorithm: string;
}

export interface WhatIfEntry {
  rating: RatingToken;
  prediction: Prediction;
}

export interface WhatIfResponse {
  feature: FieldKey;
  results: WhatIfEntry[];
}

export interface BatchResult {
  csv: string;
  errorPercent: number | null;
}

export interface ModelInfo {
  algorithm: string;
  model_id: string;
  format_version: number;
  hyperparameters: Record<string, unknown>;
}

/** Service-reported failure; fieldErrors carries the per-field messages of a 400. */
export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public fieldErrors: Record<string, string> = {},
  ) {
    super(message);
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let fields: Record<string, string> = {};
  let message = `request failed with status ${response.status}`;
  try {
    const doc = await response.json();
    if (doc && typeof doc === "object" && doc.errors) {
      fields = doc.errors;
      message = Object.entries(doc.errors)
        .map(([key, value]) => `${key}: ${value}`)
        .join("; ");
    } else if (doc && doc.error) {
      message = String(doc.error);
    }
  } catch {
    // non-JSON body; keep the status message
  }
  throw new ApiError(response.status, message, fields);
}

export class PredictionApi {
  constructor(private baseUrl: string = "") {}

  async predict(assessment: Assessment, signal?: AbortSignal): Promise<Prediction> {
    const response = await fetch(`${this.baseUrl}/api/predict`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(assessment),
      signal,
    });
    await raiseForStatus(response);
    return response.json();
  }

  async whatIf(
    base: Assessment,
    feature: FieldKey,
    signal?: AbortSignal,
  ): Promise<WhatIfResponse> {
    const response = await fetch(`${this.baseUrl}/api/whatif`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ base, feature }),
      signal,
    });
    await raiseForStatus(response);
    return response.json();
  }

  async batch(csvBody: string, signal?: AbortSignal): Promise<BatchResult> {
    const response = await fetch(`${this.baseUrl}/api/batch`, {
      method: "POST",
      headers: { "Content-Type": "text/csv" },
      body: csvBody,
      signal,
    });
    await raiseForStatus(response);
    const text = await response.text();
    return parseBatchResponse(text);
  }

  async modelInfo(signal?: AbortSignal): Promise<ModelInfo> {
    const response = await fetch(`${this.baseUrl}/api/model`, { signal });
    await raiseForStatus(response);
    return response.json();
  }
}

/** Split the service's optional `# error_percent:` comment off the CSV. */
export function parseBatchResponse(text: string): BatchResult {
  let errorPercent: number | null = null;
  let csv = text;
  if (text.startsWith("#")) {
    const newline = text.indexOf("\n");
    const comment = newline === -1 ? text : text.slice(0, newline);
    csv = newline === -1 ? "" : text.slice(newline + 1);
    const match = comment.match(/error_percent:\s*([\d.]+)/);
    if (match) errorPercent = Number(match[1]);
  }
  return { csv, errorPercent };
}

export interface BatchRow {
  ratings: RatingToken[];
  predicted: "B" | "NB";
  score: number;
  actual: "B" | "NB" | null;
}

/** Parse the prediction CSV the service returns into grid rows. */
export function parsePredictionCsv(csv: string): BatchRow[] {
  const lines = csv.split("\n").filter((line) => line.trim().length > 0);
  if (lines.length <= 1) return [];
  const header = lines[0].split(",");
  const hasActual = header[header.length - 1] === "Actual";
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    return {
      ratings: cells.slice(0, 6) as RatingToken[],
      predicted: cells[6] as "B" | "NB",
      score: Number(cells[7]),
      actual: hasActual && cells[8] ? (cells[8] as "B" | "NB") : null,
    };
  });
}
