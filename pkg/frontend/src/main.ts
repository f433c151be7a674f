import { PredictionApi } from "./api.js";
import { mountConsole } from "./app.js";

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  // same-origin by default; set window.BANKRISK_API for a remote service
  const base = (window as any).BANKRISK_API ?? "";
  mountConsole(root, new PredictionApi(base));
});
