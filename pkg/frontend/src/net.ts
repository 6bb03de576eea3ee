/**
 * Session transport: one WebSocket carrying binary frames downstream and
 * JSON control traffic both ways.
 *
 * Frames are mirrored with the server's own drop policy: keep only the
 * newest packet, render it when the paint loop asks, and discard anything
 * whose frame index does not advance (stale or duplicate delivery).
 */

import { FramePacket, PacketError, decodeFrame } from './packet.js';
import { ControlRequest, Reply } from './controls.js';

export class FrameBuffer {
  private latest: FramePacket | null = null;
  private lastIndex = -1;

  /** Accept a packet unless its index regresses; newest wins. */
  offer(packet: FramePacket): boolean {
    if (packet.frameIndex <= this.lastIndex) return false;
    this.lastIndex = packet.frameIndex;
    this.latest = packet;
    return true;
  }

  /** Pop the newest undrawn packet, or null when nothing new arrived. */
  takeLatest(): FramePacket | null {
    const packet = this.latest;
    this.latest = null;
    return packet;
  }

  /** Forget ordering history (server restart / new connection). */
  resetOrdering(): void {
    this.lastIndex = -1;
    this.latest = null;
  }
}

export type SocketStatus = 'connecting' | 'open' | 'closed';

export interface SocketHooks {
  onStatus?(status: SocketStatus): void;
  onReply?(reply: Reply): void;
  onWarning?(message: string): void;
}

const RECONNECT_DELAY_MS = 1000;

export class SessionSocket {
  readonly frames = new FrameBuffer();
  private ws: WebSocket | null = null;
  private closedByUser = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(private readonly url: string,
              private readonly hooks: SocketHooks = {}) {}

  connect(): void {
    this.closedByUser = false;
    this.openSocket();
  }

  get isOpen(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  send(request: ControlRequest): boolean {
    if (!this.isOpen) return false;
    this.ws!.send(JSON.stringify(request));
    return true;
  }

  close(): void {
    this.closedByUser = true;
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    this.retryTimer = null;
    this.ws?.close();
    this.ws = null;
  }

  private openSocket(): void {
    this.hooks.onStatus?.('connecting');
    const ws = new WebSocket(this.url);
    ws.binaryType = 'arraybuffer';
    this.ws = ws;

    ws.onopen = () => {
      this.frames.resetOrdering();
      this.hooks.onStatus?.('open');
    };
    ws.onmessage = (event: MessageEvent) => this.handleMessage(event.data);
    ws.onclose = () => {
      this.hooks.onStatus?.('closed');
      if (!this.closedByUser) {
        this.retryTimer = setTimeout(() => this.openSocket(),
                                     RECONNECT_DELAY_MS);
      }
    };
    ws.onerror = () => {
      // onclose follows and owns the retry; nothing to do here.
    };
  }

  private handleMessage(data: unknown): void {
    if (data instanceof ArrayBuffer) {
      try {
        this.frames.offer(decodeFrame(data));
      } catch (exc) {
        if (exc instanceof PacketError) {
          this.hooks.onWarning?.(`bad frame: ${exc.message}`);
        } else {
          throw exc;
        }
      }
      return;
    }
    if (typeof data === 'string') {
      let reply: Reply;
      try {
        reply = JSON.parse(data) as Reply;
      } catch {
        this.hooks.onWarning?.('unparseable server reply');
        return;
      }
      this.hooks.onReply?.(reply);
    }
  }
}
