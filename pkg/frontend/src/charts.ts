/**
 * Scrolling 12-series charts and the trigger indicator.
 *
 * Chart storage is bit-exact: each pushed sample is copied into a
 * Float32Array ring without any smoothing or rescaling, so what the chart
 * holds is exactly what the packet carried. Scaling happens only at draw
 * time, in pixel space.
 */

export const N_SERIES = 12;

/** One hue per analysis group, low bins warm, high bins cool. */
export const GROUP_COLORS: readonly string[] = Array.from(
  { length: N_SERIES },
  (_, i) => `hsl(${Math.round((i * 300) / (N_SERIES - 1))}, 85%, 60%)`,
);

export class SeriesRing {
  readonly capacity: number;
  private data: Float32Array;
  private head = 0; // next write slot
  private filled = 0;

  constructor(capacity = 256) {
    if (capacity < 2) throw new Error('ring capacity must be at least 2');
    this.capacity = capacity;
    this.data = new Float32Array(capacity * N_SERIES);
  }

  get length(): number {
    return this.filled;
  }

  push(values: ArrayLike<number>): void {
    if (values.length !== N_SERIES) {
      throw new Error(`expected ${N_SERIES} values, got ${values.length}`);
    }
    this.data.set(values as Float32Array, this.head * N_SERIES);
    this.head = (this.head + 1) % this.capacity;
    if (this.filled < this.capacity) this.filled++;
  }

  /** Sample at position i, oldest first. Returned view is read-only use. */
  at(i: number): Float32Array {
    if (i < 0 || i >= this.filled) throw new RangeError(`index ${i}`);
    const slot = (this.head - this.filled + i + this.capacity * 2) % this.capacity;
    return this.data.subarray(slot * N_SERIES, (slot + 1) * N_SERIES);
  }

  latest(): Float32Array | null {
    return this.filled ? this.at(this.filled - 1) : null;
  }
}

export interface ChartOptions {
  min?: number;
  max?: number;
  capacity?: number;
  label?: string;
}

interface Ctx2dLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
}

export class ScrollingChart {
  readonly ring: SeriesRing;
  private readonly min: number;
  private readonly max: number;
  private readonly label: string;

  constructor(options: ChartOptions = {}) {
    this.ring = new SeriesRing(options.capacity ?? 256);
    this.min = options.min ?? 0;
    this.max = options.max ?? 1;
    this.label = options.label ?? '';
  }

  push(values: ArrayLike<number>): void {
    this.ring.push(values);
  }

  draw(ctx: Ctx2dLike, width: number, height: number): void {
    ctx.clearRect(0, 0, width, height);
    const n = this.ring.length;
    const span = this.max - this.min || 1;
    const xStep = width / Math.max(1, this.ring.capacity - 1);
    ctx.lineWidth = 1;
    for (let s = 0; s < N_SERIES; s++) {
      ctx.strokeStyle = GROUP_COLORS[s];
      ctx.beginPath();
      for (let i = 0; i < n; i++) {
        const v = this.ring.at(i)[s];
        const x = i * xStep;
        const y = height - ((v - this.min) / span) * (height - 2) - 1;
        if (i === 0) ctx.moveTo(x, y);
        else ctx.lineTo(x, y);
      }
      ctx.stroke();
    }
    if (this.label) {
      ctx.fillStyle = '#9aa4b0';
      ctx.font = '11px sans-serif';
      ctx.fillText(this.label, 6, 13);
    }
  }
}

/** Minimal element contract so the matrix is testable without a DOM. */
export interface CellLike {
  classList: { toggle(name: string, force?: boolean): unknown };
}

/**
 * Twelve-cell trigger indicator. Cell i is lit exactly when bit i of the
 * packet's trigger mask is set for the frame being shown.
 */
export class TriggerMatrix {
  private readonly cells: CellLike[];

  constructor(cells: CellLike[]) {
    if (cells.length !== N_SERIES) {
      throw new Error(`expected ${N_SERIES} cells, got ${cells.length}`);
    }
    this.cells = cells;
  }

  update(triggers: readonly boolean[]): void {
    for (let i = 0; i < N_SERIES; i++) {
      this.cells[i].classList.toggle('lit', triggers[i] === true);
    }
  }
}
