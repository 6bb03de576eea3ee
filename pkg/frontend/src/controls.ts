/**
 * Ack-gated control state.
 *
 * The console never trusts its own edits: a control message goes out, the
 * slider or picker may preview the new value while it is in flight, but the
 * committed view only changes when the server acknowledges. An error reply
 * snaps the control back to the last-acked value. Replies are matched to
 * requests in FIFO order, which is the order the engine answers them.
 */

export const PARAM_NAMES = [
  'num-points-to-average',
  'num-points-to-average-vol',
  'trigger-val',
  'max-average',
  'max-trigger',
  'color-sensitivity',
  'range_max',
] as const;

export type ParamName = (typeof PARAM_NAMES)[number];

export type ControlRequest =
  | { type: 'set_param'; name: string; value: number | string }
  | { type: 'set_preset'; name: string }
  | { type: 'load_song'; path: string }
  | { type: 'play' }
  | { type: 'pause' }
  | { type: 'reset_sim' };

export interface AckReply {
  type: 'ack';
  action: string;
  name?: string;
  value?: number | string;
  colors?: string[];
  color_sensitivity?: number;
  path?: string;
}

export interface ErrorReply {
  type: 'error';
  message: string;
}

export type Reply = AckReply | ErrorReply;

export interface ViewState {
  params: Record<ParamName, number>;
  colors: string[]; // 12 hex strings
  presetName: string;
  playing: boolean;
  songPath: string | null;
}

export interface ReplyOutcome {
  kind: 'ack' | 'error' | 'unmatched';
  request?: ControlRequest;
  message?: string;
}

export const DEFAULT_PARAMS: Record<ParamName, number> = {
  'num-points-to-average': 4,
  'num-points-to-average-vol': 8,
  'trigger-val': 70,
  'max-average': 0.3,
  'max-trigger': 0.15,
  'color-sensitivity': 2,
  'range_max': 0.3,
};

const PLACEHOLDER_COLOR = '#808080'; // until a preset ack reports real colors

export class AckGate {
  private committed: ViewState;
  private pending: ControlRequest[] = [];

  constructor(initial?: Partial<ViewState>) {
    this.committed = {
      params: { ...DEFAULT_PARAMS, ...(initial?.params ?? {}) },
      colors: initial?.colors
        ? [...initial.colors]
        : new Array(12).fill(PLACEHOLDER_COLOR),
      presetName: initial?.presetName ?? 'default',
      playing: initial?.playing ?? true,
      songPath: initial?.songPath ?? null,
    };
  }

  /** Last-acknowledged state; the only values the UI may display at rest. */
  view(): ViewState {
    return {
      params: { ...this.committed.params },
      colors: [...this.committed.colors],
      presetName: this.committed.presetName,
      playing: this.committed.playing,
      songPath: this.committed.songPath,
    };
  }

  pendingCount(): number {
    return this.pending.length;
  }

  /** Record an outbound request so the next reply can be matched to it. */
  track(req: ControlRequest): void {
    this.pending.push(req);
  }

  /** Drop all in-flight requests (socket closed); view stays committed. */
  abandonPending(): ControlRequest[] {
    const dropped = this.pending;
    this.pending = [];
    return dropped;
  }

  handleReply(reply: Reply): ReplyOutcome {
    const request = this.pending.shift();
    if (!request) {
      return { kind: 'unmatched', message: 'reply with no pending request' };
    }
    if (reply.type === 'error') {
      return { kind: 'error', request, message: reply.message };
    }
    this.commit(reply);
    return { kind: 'ack', request };
  }

  private commit(ack: AckReply): void {
    const c = this.committed;
    switch (ack.action) {
      case 'set_param': {
        const name = ack.name ?? '';
        if (name.startsWith('bin-color-')) {
          const index = Number(name.slice('bin-color-'.length));
          if (index >= 0 && index < 12 && typeof ack.value === 'string') {
            c.colors[index] = ack.value;
          }
        } else if ((PARAM_NAMES as readonly string[]).includes(name)
                   && typeof ack.value === 'number') {
          c.params[name as ParamName] = ack.value;
        }
        break;
      }
      case 'set_preset':
        if (ack.name) c.presetName = ack.name;
        if (ack.colors && ack.colors.length === 12) c.colors = [...ack.colors];
        if (typeof ack.color_sensitivity === 'number') {
          c.params['color-sensitivity'] = ack.color_sensitivity;
        }
        break;
      case 'play':
        c.playing = true;
        break;
      case 'pause':
        c.playing = false;
        break;
      case 'load_song':
        c.songPath = ack.path ?? c.songPath;
        break;
      default:
        break; // reset_sim and friends carry no view state
    }
  }
}
