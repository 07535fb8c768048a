/** DOM wiring for the dispatcher console: render state, forward events. */

import { ApiClient } from "./api.js";
import { SessionController, type ControllerState } from "./controller.js";
import { formatDuration, formatMoney, toMinutes } from "./format.js";
import {
  buildTimeline,
  buildTotals,
  buildTrend,
  ghostBlock,
  type Block,
  type Lane,
  type TimelineViewModel,
} from "./viewmodel.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function blockHtml(block: Block): string {
  const style = `left:${block.x}px;width:${Math.max(block.width, 2)}px`;
  const title = `${block.id} [${block.startMinute}, ${block.endMinute}) ${
    block.resource ?? ""
  }`;
  return `<div class="block ${block.kind}" style="${style}" title="${escapeHtml(
    title,
  )}">${escapeHtml(block.label)}</div>`;
}

function laneHtml(lane: Lane, widthPx: number, extra = ""): string {
  const blocks = lane.blocks.map(blockHtml).join("");
  return `<div class="lane"><span class="lane-label">${escapeHtml(
    lane.label,
  )}</span><div class="lane-track" style="width:${widthPx}px">${blocks}${extra}</div></div>`;
}

function gapsHtml(vm: TimelineViewModel): string {
  const segments = vm.gaps
    .map(
      (gap) =>
        `<div class="gap${gap.highlighted ? " fits" : ""}" style="left:${gap.x}px;width:${Math.max(
          gap.width,
          2,
        )}px" title="window ${gap.index}">${escapeHtml(gap.label)}</div>`,
    )
    .join("");
  return `<div class="lane"><span class="lane-label">windows</span><div class="lane-track" style="width:${vm.widthPx}px">${segments}</div></div>`;
}

function trendSvg(state: ControllerState): string {
  if (!state.costs) return "";
  const trend = buildTrend(state.costs);
  if (trend.points.length === 0) return "";
  const width = 420;
  const height = 120;
  const pad = 10;
  const maxY = Math.max(...trend.points.map((p) => p.y), 1);
  const stepX =
    trend.points.length > 1 ? (width - 2 * pad) / (trend.points.length - 1) : 0;
  const coords = trend.points.map((p, i) => {
    const x = pad + i * stepX;
    const y = height - pad - (p.y / maxY) * (height - 2 * pad);
    return { x, y, label: p.label };
  });
  const polyline = coords.map((c) => `${c.x},${c.y}`).join(" ");
  const labels = coords
    .map(
      (c) =>
        `<text x="${c.x}" y="${c.y - 4}" class="trend-label">${escapeHtml(
          c.label,
        )}</text>`,
    )
    .join("");
  const dots = coords
    .map((c) => `<circle cx="${c.x}" cy="${c.y}" r="2.5"></circle>`)
    .join("");
  return (
    `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">` +
    `<polyline points="${polyline}" fill="none"></polyline>${dots}${labels}</svg>` +
    `<div id="trend-end">${escapeHtml(trend.endLabel)}${
      trend.monotoneNonIncreasing ? "" : " (not monotone)"
    }</div>`
  );
}

function render(state: ControllerState): void {
  el("banner").textContent = state.banner ?? "";
  el("form-error").textContent = state.formError ?? "";
  el<HTMLButtonElement>("commit").disabled = state.preview === null;
  el("revision").textContent = state.sessionId
    ? `session ${state.sessionId} · revision ${state.revision}`
    : "no session";
  if (!state.schedule || !state.costs) {
    el("timeline").innerHTML = "";
    el("totals").innerHTML = "";
    el("trend").innerHTML = "";
    el("preview-panel").textContent = "";
    return;
  }
  const pending = state.pendingForm?.duration_minutes;
  const vm = buildTimeline(state.schedule, {
    pendingDurationMinutes: pending,
  });
  const ghost = state.preview ? blockHtml(ghostBlock(state.preview, vm)) : "";
  const lanes = [
    laneHtml(vm.machineLane, vm.widthPx, ghost),
    gapsHtml(vm),
    ...vm.resourceLanes.map((lane) => laneHtml(lane, vm.widthPx)),
  ];
  el("timeline").innerHTML = lanes.join("");
  const totals = buildTotals(state.costs.totals, state.costs.gain);
  el("totals").innerHTML =
    `<span>lost <b id="lost">${escapeHtml(totals.lost)}</b></span>` +
    `<span>tasks <b id="task">${escapeHtml(totals.task)}</b></span>` +
    `<span>global <b id="global">${escapeHtml(totals.global)}</b></span>` +
    `<span>gain <b id="gain">${escapeHtml(totals.gain)}</b></span>`;
  el("trend").innerHTML = trendSvg(state);
  const preview = state.preview;
  if (preview) {
    const where = preview.appended
      ? "appended after the last task"
      : `window ${preview.window_index}`;
    el("preview-panel").textContent =
      `${preview.task_id} → ${where}, ` +
      `[${preview.start_minute}, ${preview.end_minute}) ` +
      `t1=${formatDuration(preview.t1)} t2=${formatDuration(preview.t2)}, ` +
      `resource ${preview.resource ?? "—"}, ` +
      `projected gain ${formatMoney(preview.gain, preview.totals.currency_label)}`;
  } else {
    el("preview-panel").textContent = "";
  }
}

export function start(): void {
  const controller = new SessionController(
    new ApiClient(el<HTMLInputElement>("base-url").value),
    render,
  );
  let active = controller;

  const rewire = (): SessionController => {
    active = new SessionController(
      new ApiClient(el<HTMLInputElement>("base-url").value),
      render,
    );
    return active;
  };

  el<HTMLButtonElement>("create").addEventListener("click", () => {
    void rewire().createSessionFromText(
      el<HTMLTextAreaElement>("scenario").value,
    );
  });
  el<HTMLButtonElement>("load-demo").addEventListener("click", async () => {
    const resp = await fetch("../fixtures/tableau1.json");
    el<HTMLTextAreaElement>("scenario").value = await resp.text();
  });

  const readForm = () => ({
    title: el<HTMLInputElement>("task-title").value || undefined,
    duration_minutes: toMinutes(
      el<HTMLInputElement>("task-hours").value,
      el<HTMLInputElement>("task-minutes").value,
    ),
  });
  el<HTMLButtonElement>("preview").addEventListener("click", () => {
    void active.preview(readForm());
  });
  el<HTMLButtonElement>("commit").addEventListener("click", () => {
    void active.commit();
  });
  el<HTMLButtonElement>("undo").addEventListener("click", () => {
    void active.undo();
  });
  el<HTMLButtonElement>("refresh").addEventListener("click", () => {
    void active.refresh();
  });
}

if (typeof document !== "undefined" && document.getElementById("base-url")) {
  start();
}
