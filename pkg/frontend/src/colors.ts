/** Emotion color scale; must match the server's palette exactly. */

export const EMOTIONS = [
  "sadness",
  "joy",
  "fear",
  "erotic",
  "anger",
  "tenderness",
] as const;

const EMOTION_HUES: Record<string, number> = {
  sadness: 215,
  joy: 48,
  fear: 275,
  erotic: 330,
  anger: 5,
  tenderness: 130,
};

const ONE_THIRD = 1 / 3;
const ONE_SIXTH = 1 / 6;
const TWO_THIRD = 2 / 3;

function hlsComponent(m1: number, m2: number, hue: number): number {
  hue = ((hue % 1) + 1) % 1;
  if (hue < ONE_SIXTH) return m1 + (m2 - m1) * hue * 6;
  if (hue < 0.5) return m2;
  if (hue < TWO_THIRD) return m1 + (m2 - m1) * (TWO_THIRD - hue) * 6;
  return m1;
}

function hlsToRgb(h: number, l: number, s: number): [number, number, number] {
  if (s === 0) return [l, l, l];
  const m2 = l <= 0.5 ? l * (1 + s) : l + s - l * s;
  const m1 = 2 * l - m2;
  return [
    hlsComponent(m1, m2, h + ONE_THIRD),
    hlsComponent(m1, m2, h),
    hlsComponent(m1, m2, h - ONE_THIRD),
  ];
}

/** Round-half-to-even, matching the server's channel quantization. */
function roundHalfEven(x: number): number {
  const floor = Math.floor(x);
  const diff = x - floor;
  if (diff > 0.5) return floor + 1;
  if (diff < 0.5) return floor;
  return floor % 2 === 0 ? floor : floor + 1;
}

export function emotionColor(emotion: string, value: number): string {
  const hue = EMOTION_HUES[emotion];
  if (hue === undefined) throw new Error(`unknown emotion ${emotion}`);
  if (!(value >= 0 && value <= 1)) {
    throw new Error(`emotion value ${value} outside [0, 1]`);
  }
  const lightness = 0.88 - 0.62 * value;
  const [r, g, b] = hlsToRgb(hue / 360, lightness, 0.72);
  const hex = (c: number) => roundHalfEven(c * 255).toString(16).padStart(2, "0");
  return `#${hex(r)}${hex(g)}${hex(b)}`;
}
