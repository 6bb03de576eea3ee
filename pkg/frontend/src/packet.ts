/**
 * Frame packet decoder for the engine's binary stream.
 *
 * Layout (little-endian; f32 unless noted):
 *
 *   offset   0  "SYN1" magic (4 bytes)
 *   offset   4  frame index (u64)
 *   offset  12  timestamp seconds (f64)
 *   offset  20  bins, avg bins, volatility, avg volatility (4 x 12 x f32)
 *   offset 212  trigger bitmask (u16, bit i = bin i)
 *   offset 214  dynamics percent (f32)
 *   offset 218  group params, 12 rows x 10 f32:
 *               r g b tx ty tz force_amt color_mag emphasis y_center
 *   offset 698  color sensitivity (f32)
 *   offset 702  particle count (u32)
 *   offset 706  count x 10 f32 rows: px py pz vx vy vz r g b a
 *
 * The fixed prefix is 706 bytes. Because 218 and 706 are not multiples of
 * four, the float blocks after the u16 mask are not 4-byte aligned within
 * the message; those regions are copied once into aligned buffers so they
 * can be viewed (and uploaded to the GPU) as Float32Array without per-value
 * DataView reads.
 */

export const MAGIC = 0x53594e31; // "SYN1" read as a big-endian u32
export const FIXED_SIZE = 706;
export const PARTICLE_STRIDE = 40; // bytes per particle row
export const N_BINS = 12;

const OFF_BINS = 20;
const OFF_MASK = 212;
const OFF_DYNAMICS = 214;
const OFF_PARAMS = 218;
const OFF_SENSITIVITY = 698;
const OFF_COUNT = 702;

export class PacketError extends Error {}

export interface FramePacket {
  frameIndex: number;
  timestamp: number;
  bins: Float32Array;
  avgBins: Float32Array;
  volatility: Float32Array;
  avgVolatility: Float32Array;
  triggerMask: number;
  triggers: boolean[];
  dynamics: number;
  /** 12 x 10 row-major group parameter matrix. */
  groupParams: Float32Array;
  colorSensitivity: number;
  count: number;
  /** count x 10 interleaved particle rows, aligned for direct GPU upload. */
  particles: Float32Array;
}

function alignedFloats(buffer: ArrayBuffer, byteOffset: number,
                       byteLength: number): Float32Array {
  return new Float32Array(buffer.slice(byteOffset, byteOffset + byteLength));
}

export function decodeFrame(buffer: ArrayBuffer): FramePacket {
  if (buffer.byteLength < FIXED_SIZE) {
    throw new PacketError(
      `packet too short: ${buffer.byteLength} < ${FIXED_SIZE} bytes`);
  }
  const view = new DataView(buffer);
  if (view.getUint32(0, false) !== MAGIC) {
    throw new PacketError('bad magic; not a frame packet');
  }

  const frameIndexBig = view.getBigUint64(4, true);
  if (frameIndexBig > BigInt(Number.MAX_SAFE_INTEGER)) {
    throw new PacketError('frame index exceeds safe integer range');
  }

  const count = view.getUint32(OFF_COUNT, true);
  const expected = FIXED_SIZE + count * PARTICLE_STRIDE;
  if (buffer.byteLength !== expected) {
    throw new PacketError(
      `packet size ${buffer.byteLength} != ${expected} for ${count} particles`);
  }

  const analysis = alignedFloats(buffer, OFF_BINS, 4 * N_BINS * 4);
  const mask = view.getUint16(OFF_MASK, true);
  const triggers: boolean[] = [];
  for (let i = 0; i < N_BINS; i++) triggers.push((mask & (1 << i)) !== 0);

  return {
    frameIndex: Number(frameIndexBig),
    timestamp: view.getFloat64(12, true),
    bins: analysis.subarray(0, 12),
    avgBins: analysis.subarray(12, 24),
    volatility: analysis.subarray(24, 36),
    avgVolatility: analysis.subarray(36, 48),
    triggerMask: mask,
    triggers,
    dynamics: view.getFloat32(OFF_DYNAMICS, true),
    groupParams: alignedFloats(buffer, OFF_PARAMS, 12 * 10 * 4),
    colorSensitivity: view.getFloat32(OFF_SENSITIVITY, true),
    count,
    particles: alignedFloats(buffer, FIXED_SIZE, count * PARTICLE_STRIDE),
  };
}
