/** Pure view-model builders: service responses in, layout out.
 *
 * Nothing here derives schedule or cost facts; it only positions the
 * numbers the service already computed.
 */

import type {
  CostsResponse,
  GapView,
  InsertionResponse,
  Money,
  ScheduleSnapshot,
  Totals,
} from "./api.js";
import { formatDuration, formatMoney, moneyAsNumber } from "./format.js";

export interface Block {
  id: string;
  title: string;
  kind: "preventive" | "dynamic" | "ghost";
  startMinute: number;
  endMinute: number;
  x: number;
  width: number;
  label: string;
  resource: string | null;
}

export interface GapSegment {
  index: number;
  startMinute: number;
  endMinute: number;
  x: number;
  width: number;
  label: string;
  highlighted: boolean;
}

export interface Lane {
  id: string;
  label: string;
  blocks: Block[];
}

export interface TotalsView {
  lost: string;
  task: string;
  global: string;
  gain: string;
}

export interface TimelineViewModel {
  pxPerMinute: number;
  widthPx: number;
  horizonStartMinute: number;
  horizonEndMinute: number;
  machineLane: Lane;
  resourceLanes: Lane[];
  gaps: GapSegment[];
}

const DEFAULT_PX_PER_HOUR = 6;

/** Natural sort for resource ids: R2 before R10. */
export function compareResourceIds(a: string, b: string): number {
  const pattern = /^([^0-9]*)(\d+)$/;
  const ma = pattern.exec(a);
  const mb = pattern.exec(b);
  if (ma && mb && ma[1] === mb[1]) return Number(ma[2]) - Number(mb[2]);
  return a < b ? -1 : a > b ? 1 : 0;
}

function toBlock(
  placement: ScheduleSnapshot["placements"][number],
  pxPerMinute: number,
  origin: number,
): Block {
  return {
    id: placement.task_id,
    title: placement.title,
    kind: placement.kind,
    startMinute: placement.start_minute,
    endMinute: placement.end_minute,
    x: (placement.start_minute - origin) * pxPerMinute,
    width: placement.duration_minutes * pxPerMinute,
    label: `${placement.task_id} ${formatDuration(placement.duration_minutes)}`,
    resource: placement.resource,
  };
}

export function buildTimeline(
  snapshot: ScheduleSnapshot,
  options: { pendingDurationMinutes?: number; pxPerHour?: number } = {},
): TimelineViewModel {
  const pxPerMinute = (options.pxPerHour ?? DEFAULT_PX_PER_HOUR) / 60;
  const placements = snapshot.placements;
  const origin = Math.min(
    0,
    ...placements.map((p) => p.start_minute),
  );
  const end = Math.max(
    0,
    ...placements.map((p) => p.end_minute),
    ...snapshot.windows.map((w) => w.end_minute),
  );
  const machineLane: Lane = {
    id: "machine",
    label: "machine",
    blocks: placements.map((p) => toBlock(p, pxPerMinute, origin)),
  };
  const byResource = new Map<string, Block[]>();
  for (const p of placements) {
    if (p.resource === null) continue;
    const blocks = byResource.get(p.resource) ?? [];
    blocks.push(toBlock(p, pxPerMinute, origin));
    byResource.set(p.resource, blocks);
  }
  const resourceLanes = [...byResource.keys()]
    .sort(compareResourceIds)
    .map((id) => ({ id, label: id, blocks: byResource.get(id)! }));
  const pending = options.pendingDurationMinutes;
  const gaps: GapSegment[] = snapshot.windows.map((w: GapView) => ({
    index: w.index,
    startMinute: w.start_minute,
    endMinute: w.end_minute,
    x: (w.start_minute - origin) * pxPerMinute,
    width: w.minutes * pxPerMinute,
    label: formatDuration(w.minutes),
    highlighted: pending !== undefined && pending > 0 && w.minutes >= pending,
  }));
  return {
    pxPerMinute,
    widthPx: (end - origin) * pxPerMinute,
    horizonStartMinute: origin,
    horizonEndMinute: end,
    machineLane,
    resourceLanes,
    gaps,
  };
}

/** The candidate placement of a preview, drawn in ghost style. */
export function ghostBlock(
  preview: InsertionResponse,
  vm: TimelineViewModel,
): Block {
  return {
    id: preview.task_id,
    title: preview.task_id,
    kind: "ghost",
    startMinute: preview.start_minute,
    endMinute: preview.end_minute,
    x: (preview.start_minute - vm.horizonStartMinute) * vm.pxPerMinute,
    width: (preview.end_minute - preview.start_minute) * vm.pxPerMinute,
    label: `${preview.task_id} (preview)`,
    resource: preview.resource,
  };
}

/** Totals bar text, verbatim from one service Totals object. */
export function buildTotals(totals: Totals, gain: Money): TotalsView {
  return {
    lost: formatMoney(totals.lost_cost, totals.currency_label),
    task: formatMoney(totals.task_cost, totals.currency_label),
    global: formatMoney(totals.global_cost, totals.currency_label),
    gain: formatMoney(gain, totals.currency_label),
  };
}

export interface TrendPoint {
  index: number;
  lost: Money;
  label: string;
  /** Chart ordinate only; labels always show the exact service value. */
  y: number;
}

export interface TrendViewModel {
  points: TrendPoint[];
  endLabel: string;
  monotoneNonIncreasing: boolean;
}

export function buildTrend(costs: CostsResponse): TrendViewModel {
  const points = costs.trend.map((lost, index) => ({
    index,
    lost,
    label: formatMoney(lost),
    y: moneyAsNumber(lost),
  }));
  const monotone = points.every(
    (p, i) => i === 0 || points[i - 1]!.y >= p.y,
  );
  return {
    points,
    endLabel: `gain ${formatMoney(costs.gain, costs.totals.currency_label)}`,
    monotoneNonIncreasing: monotone,
  };
}

/** Lane blocks sorted by start must not overlap; true when clean. */
export function laneIsOverlapFree(lane: Lane): boolean {
  const sorted = [...lane.blocks].sort((a, b) => a.startMinute - b.startMinute);
  return sorted.every(
    (block, i) => i === 0 || sorted[i - 1]!.endMinute <= block.startMinute,
  );
}
