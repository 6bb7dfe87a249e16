// Point formatting. Dynamic points travel as strings with exactly two
// decimals; we total them in integer hundredths so sums never drift.

const TWO_DECIMALS = /^\d+\.\d{2}$/;

export function dynamicToCents(value: string): number {
  if (!TWO_DECIMALS.test(value)) {
    throw new Error(`malformed dynamic points value: ${JSON.stringify(value)}`);
  }
  return Number(value.replace(".", ""));
}

export function centsToDisplay(cents: number): string {
  const whole = Math.floor(cents / 100);
  const frac = cents % 100;
  return `${whole}.${String(frac).padStart(2, "0")}`;
}

export function staticToDisplay(points: number): string {
  if (!Number.isInteger(points)) {
    throw new Error(`static points must be an integer, got ${points}`);
  }
  return String(points);
}

export function pctToNumber(pct: string | null): number | null {
  if (pct === null) return null;
  const value = Number(pct);
  if (Number.isNaN(value)) {
    throw new Error(`malformed percentage: ${JSON.stringify(pct)}`);
  }
  return value;
}
