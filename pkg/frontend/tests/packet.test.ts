import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { describe, expect, it } from 'vitest';

import {
  FIXED_SIZE,
  PARTICLE_STRIDE,
  PacketError,
  decodeFrame,
} from '../src/packet.js';

const here = dirname(fileURLToPath(import.meta.url));

interface GoldenFrame {
  frame_index: number;
  timestamp: number;
  bins: number[];
  avg_bins: number[];
  volatility: number[];
  avg_volatility: number[];
  trigger_mask: number;
  triggers: boolean[];
  dynamics: number;
  group_params: number[];
  color_sensitivity: number;
  count: number;
  particles: number[];
}

function fixtureBytes(): ArrayBuffer {
  const buf = readFileSync(join(here, 'fixtures', 'golden.synframes'));
  return buf.buffer.slice(buf.byteOffset, buf.byteOffset + buf.byteLength);
}

function goldenFrames(): GoldenFrame[] {
  return JSON.parse(
    readFileSync(join(here, 'fixtures', 'golden.json'), 'utf8'));
}

/** Split a .synframes byte stream into per-frame ArrayBuffers. */
function splitFrames(stream: ArrayBuffer): ArrayBuffer[] {
  const view = new DataView(stream);
  const frames: ArrayBuffer[] = [];
  let offset = 0;
  while (offset < stream.byteLength) {
    const count = view.getUint32(offset + FIXED_SIZE - 4, true);
    const size = FIXED_SIZE + count * PARTICLE_STRIDE;
    frames.push(stream.slice(offset, offset + size));
    offset += size;
  }
  return frames;
}

function expectBitEqual(actual: ArrayLike<number>, expected: number[],
                        label: string): void {
  expect(actual.length, label).toBe(expected.length);
  for (let i = 0; i < expected.length; i++) {
    if (!Object.is(actual[i], expected[i])) {
      throw new Error(
        `${label}[${i}]: decoded ${actual[i]} != expected ${expected[i]}`);
    }
  }
}

describe('golden fixture from the engine', () => {
  const frames = splitFrames(fixtureBytes());
  const golden = goldenFrames();

  it('contains the full 12-frame clip', () => {
    expect(frames.length).toBe(12);
    expect(golden.length).toBe(12);
  });

  it('decodes every field of every frame bit-for-bit', () => {
    for (let i = 0; i < frames.length; i++) {
      const packet = decodeFrame(frames[i]);
      const want = golden[i];
      expect(packet.frameIndex).toBe(want.frame_index);
      expect(Object.is(packet.timestamp, want.timestamp)).toBe(true);
      expectBitEqual(packet.bins, want.bins, `frame ${i} bins`);
      expectBitEqual(packet.avgBins, want.avg_bins, `frame ${i} avg_bins`);
      expectBitEqual(packet.volatility, want.volatility,
                     `frame ${i} volatility`);
      expectBitEqual(packet.avgVolatility, want.avg_volatility,
                     `frame ${i} avg_volatility`);
      expect(packet.triggerMask).toBe(want.trigger_mask);
      expect(packet.triggers).toEqual(want.triggers);
      expect(Object.is(packet.dynamics, want.dynamics)).toBe(true);
      expectBitEqual(packet.groupParams, want.group_params,
                     `frame ${i} group_params`);
      expect(Object.is(packet.colorSensitivity,
                       want.color_sensitivity)).toBe(true);
      expect(packet.count).toBe(want.count);
      expectBitEqual(packet.particles, want.particles,
                     `frame ${i} particles`);
    }
  });

  it('sees the tone step fire bin 4 and the steady tone clear it', () => {
    const masks = frames.map((f) => decodeFrame(f).triggerMask);
    expect(masks.slice(0, 6)).toEqual([0, 0, 0, 0, 0, 0]);
    expect(masks[6]).toBe(1 << 4);
    expect(masks[11]).toBe(0);
  });

  it('exposes particles as one aligned interleaved block', () => {
    const packet = decodeFrame(frames[7]);
    expect(packet.particles.byteOffset % 4).toBe(0);
    expect(packet.particles.length).toBe(packet.count * 10);
  });
});

describe('decode errors', () => {
  const good = splitFrames(fixtureBytes())[0];

  it('rejects a packet that is too short', () => {
    expect(() => decodeFrame(good.slice(0, 10))).toThrow(PacketError);
  });

  it('rejects bad magic', () => {
    const bad = good.slice(0);
    new Uint8Array(bad)[0] = 0x58;
    expect(() => decodeFrame(bad)).toThrow(/magic/);
  });

  it('rejects truncated particle payload', () => {
    expect(() => decodeFrame(good.slice(0, good.byteLength - 8)))
      .toThrow(PacketError);
  });

  it('rejects trailing bytes', () => {
    const padded = new Uint8Array(good.byteLength + 4);
    padded.set(new Uint8Array(good), 0);
    expect(() => decodeFrame(padded.buffer)).toThrow(/size/);
  });
});
