/** Formatting helpers. Percent cells show exactly two decimals so a rendered
 * cell is the service value and nothing else; the heat scale is fixed to
 * 0..100 percent for comparability across reruns. */

export function percent(value: number): string {
  return value.toFixed(2);
}

export function mobius(value: number): string {
  return value.toFixed(4);
}

export function epsilon(value: number | null): string {
  return value === null ? "n/a" : value.toFixed(4);
}

/** Background color for a 0..100 percent cell on the fixed heat scale. */
export function heatColor(value: number): string {
  const t = Math.max(0, Math.min(1, value / 100));
  // white -> deep blue, perceptually monotone enough for a table
  const level = Math.round(255 - t * 160);
  const blue = Math.round(255 - t * 40);
  return `rgb(${level}, ${level}, ${blue})`;
}

export function heatTextColor(value: number): string {
  return value > 55 ? "#ffffff" : "#1a1a2e";
}
