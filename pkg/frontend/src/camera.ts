/**
 * Orbit camera for the particle view.
 *
 * The twelve gravity groups sit on a vertical line from y = -12 to y = +10,
 * so the camera orbits the midpoint (0, -1, 0). Controls are held keys:
 *
 *   A / D  orbit left / right
 *   W      zoom in (distance strictly decreases, floored)
 *   S      zoom out (distance strictly increases)
 *   Q      pitch back toward the side-on view
 *   Z      pitch up toward the top-down limit
 */

export type Vec3 = [number, number, number];

export const ORBIT_CENTER: Vec3 = [0, -1, 0];
const DEFAULT_DISTANCE = 42;
const DEFAULT_PITCH = 0.22;
const DEFAULT_YAW = 0;
const MIN_DISTANCE = 4;
const MAX_PITCH = Math.PI / 2 - 0.02; // top-down limit; keeps up-vector sane
const MIN_PITCH = 0;
const ORBIT_RATE = 1.6; // rad/s
const PITCH_RATE = 1.2; // rad/s
const ZOOM_RATE = 0.9; // log-units/s

export class OrbitCamera {
  yaw = DEFAULT_YAW;
  pitch = DEFAULT_PITCH;
  distance = DEFAULT_DISTANCE;

  reset(): void {
    this.yaw = DEFAULT_YAW;
    this.pitch = DEFAULT_PITCH;
    this.distance = DEFAULT_DISTANCE;
  }

  /** Advance the camera given the set of currently held keys. */
  update(keys: ReadonlySet<string>, dt: number): void {
    if (keys.has('a')) this.yaw -= ORBIT_RATE * dt;
    if (keys.has('d')) this.yaw += ORBIT_RATE * dt;
    if (keys.has('w')) {
      this.distance = Math.max(MIN_DISTANCE, this.distance * Math.exp(-ZOOM_RATE * dt));
    }
    if (keys.has('s')) this.distance *= Math.exp(ZOOM_RATE * dt);
    if (keys.has('q')) this.pitch = Math.max(MIN_PITCH, this.pitch - PITCH_RATE * dt);
    if (keys.has('z')) this.pitch = Math.min(MAX_PITCH, this.pitch + PITCH_RATE * dt);
  }

  eye(): Vec3 {
    const cp = Math.cos(this.pitch);
    return [
      ORBIT_CENTER[0] + this.distance * cp * Math.sin(this.yaw),
      ORBIT_CENTER[1] + this.distance * Math.sin(this.pitch),
      ORBIT_CENTER[2] + this.distance * cp * Math.cos(this.yaw),
    ];
  }

  /** Column-major projection * view matrix for WebGL. */
  viewProjection(aspect: number): Float32Array {
    const proj = perspective(Math.PI / 3, aspect, 0.1, 500);
    const view = lookAt(this.eye(), ORBIT_CENTER, [0, 1, 0]);
    return mat4Multiply(proj, view);
  }
}

export function perspective(fovY: number, aspect: number,
                            near: number, far: number): Float32Array {
  const f = 1 / Math.tan(fovY / 2);
  const out = new Float32Array(16);
  out[0] = f / aspect;
  out[5] = f;
  out[10] = (far + near) / (near - far);
  out[11] = -1;
  out[14] = (2 * far * near) / (near - far);
  return out;
}

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function normalize(v: Vec3): Vec3 {
  const n = Math.hypot(v[0], v[1], v[2]) || 1;
  return [v[0] / n, v[1] / n, v[2] / n];
}

function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

export function lookAt(eye: Vec3, center: Vec3, up: Vec3): Float32Array {
  const z = normalize(sub(eye, center));
  const x = normalize(cross(up, z));
  const y = cross(z, x);
  // Column-major: rotation rows in the upper 3x3, translation in column 3.
  return new Float32Array([
    x[0], y[0], z[0], 0,
    x[1], y[1], z[1], 0,
    x[2], y[2], z[2], 0,
    -dot(x, eye), -dot(y, eye), -dot(z, eye), 1,
  ]);
}

export function mat4Multiply(a: Float32Array, b: Float32Array): Float32Array {
  const out = new Float32Array(16);
  for (let col = 0; col < 4; col++) {
    for (let row = 0; row < 4; row++) {
      let acc = 0;
      for (let k = 0; k < 4; k++) acc += a[k * 4 + row] * b[col * 4 + k];
      out[col * 4 + row] = acc;
    }
  }
  return out;
}
