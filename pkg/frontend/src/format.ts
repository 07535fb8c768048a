import type { Money } from "./api.js";

/** Render service money verbatim: integers plainly, exact "p/q" as sent. */
export function formatMoney(value: Money, currency?: string): string {
  const text = typeof value === "number" ? String(value) : value;
  return currency ? `${text} ${currency}` : text;
}

/** Numeric view of money for chart scaling only — never displayed. */
export function moneyAsNumber(value: Money): number {
  if (typeof value === "number") return value;
  const parts = value.split("/");
  if (parts.length === 2) {
    const p = Number(parts[0]);
    const q = Number(parts[1]);
    if (Number.isFinite(p) && Number.isFinite(q) && q !== 0) return p / q;
  }
  const direct = Number(value);
  return Number.isFinite(direct) ? direct : 0;
}

/** Minutes on the hour grid as "2h", off-grid as "2h30". */
export function formatDuration(minutes: number): string {
  const h = Math.floor(minutes / 60);
  const m = minutes % 60;
  return m === 0 ? `${h}h` : `${h}h${String(m).padStart(2, "0")}`;
}

/** Hours+minutes form fields to the engine's minute grid. */
export function toMinutes(hoursText: string, minutesText: string): number {
  const hours = hoursText.trim() === "" ? 0 : Number(hoursText);
  const minutes = minutesText.trim() === "" ? 0 : Number(minutesText);
  if (!Number.isInteger(hours) || !Number.isInteger(minutes)) return NaN;
  return hours * 60 + minutes;
}
