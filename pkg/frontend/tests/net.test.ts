import { describe, expect, it } from 'vitest';

import { FrameBuffer } from '../src/net.js';
import { FramePacket } from '../src/packet.js';

function fakePacket(frameIndex: number): FramePacket {
  return {
    frameIndex,
    timestamp: frameIndex * 0.0232,
    bins: new Float32Array(12),
    avgBins: new Float32Array(12),
    volatility: new Float32Array(12),
    avgVolatility: new Float32Array(12),
    triggerMask: 0,
    triggers: new Array(12).fill(false),
    dynamics: 0,
    groupParams: new Float32Array(120),
    colorSensitivity: 2,
    count: 0,
    particles: new Float32Array(0),
  };
}

describe('latest-wins frame buffer', () => {
  it('hands out the newest packet once', () => {
    const buffer = new FrameBuffer();
    expect(buffer.offer(fakePacket(0))).toBe(true);
    expect(buffer.offer(fakePacket(1))).toBe(true);
    expect(buffer.takeLatest()!.frameIndex).toBe(1);
    expect(buffer.takeLatest()).toBeNull();
  });

  it('discards frame index regressions and duplicates', () => {
    const buffer = new FrameBuffer();
    buffer.offer(fakePacket(5));
    expect(buffer.takeLatest()!.frameIndex).toBe(5);
    expect(buffer.offer(fakePacket(4))).toBe(false);
    expect(buffer.offer(fakePacket(5))).toBe(false);
    expect(buffer.takeLatest()).toBeNull();
    expect(buffer.offer(fakePacket(6))).toBe(true);
  });

  it('resetOrdering accepts a restarted stream', () => {
    const buffer = new FrameBuffer();
    buffer.offer(fakePacket(100));
    buffer.resetOrdering();
    expect(buffer.takeLatest()).toBeNull();
    expect(buffer.offer(fakePacket(0))).toBe(true);
    expect(buffer.takeLatest()!.frameIndex).toBe(0);
  });
});
