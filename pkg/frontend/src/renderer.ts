/**
 * WebGL2 point renderer.
 *
 * Each frame's particle block is already laid out GPU-ready: rows of ten
 * f32 [px py pz vx vy vz r g b a], 40 bytes apart. The whole block is
 * uploaded into one vertex buffer; position reads at byte offset 0 and
 * color at byte offset 24, both with stride 40. Velocity and alpha are
 * skipped — alpha is drawn opaque.
 */

import { FramePacket } from './packet.js';
import { PARTICLE_STRIDE } from './packet.js';

const VERTEX_SHADER = `#version 300 es
layout(location = 0) in vec3 a_position;
layout(location = 1) in vec3 a_color;
uniform mat4 u_view_projection;
out vec3 v_color;
void main() {
  gl_Position = u_view_projection * vec4(a_position, 1.0);
  gl_PointSize = clamp(60.0 / gl_Position.w, 1.0, 5.0);
  v_color = a_color;
}
`;

const FRAGMENT_SHADER = `#version 300 es
precision mediump float;
in vec3 v_color;
out vec4 frag_color;
void main() {
  frag_color = vec4(v_color, 1.0);
}
`;

/** Frames rendered in the last rolling second. */
export class FpsCounter {
  private stamps: number[] = [];

  tick(nowMs: number): void {
    this.stamps.push(nowMs);
    const cutoff = nowMs - 1000;
    while (this.stamps.length && this.stamps[0] <= cutoff) this.stamps.shift();
  }

  fps(): number {
    return this.stamps.length;
  }
}

function compile(gl: WebGL2RenderingContext, kind: number,
                 source: string): WebGLShader {
  const shader = gl.createShader(kind);
  if (!shader) throw new Error('shader allocation failed');
  gl.shaderSource(shader, source);
  gl.compileShader(shader);
  if (!gl.getShaderParameter(shader, gl.COMPILE_STATUS)) {
    throw new Error(`shader compile: ${gl.getShaderInfoLog(shader)}`);
  }
  return shader;
}

export class PointRenderer {
  private readonly gl: WebGL2RenderingContext;
  private readonly program: WebGLProgram;
  private readonly vpLocation: WebGLUniformLocation;
  private readonly vao: WebGLVertexArrayObject;
  private readonly vbo: WebGLBuffer;

  constructor(gl: WebGL2RenderingContext) {
    this.gl = gl;
    const program = gl.createProgram();
    if (!program) throw new Error('program allocation failed');
    gl.attachShader(program, compile(gl, gl.VERTEX_SHADER, VERTEX_SHADER));
    gl.attachShader(program, compile(gl, gl.FRAGMENT_SHADER, FRAGMENT_SHADER));
    gl.linkProgram(program);
    if (!gl.getProgramParameter(program, gl.LINK_STATUS)) {
      throw new Error(`program link: ${gl.getProgramInfoLog(program)}`);
    }
    this.program = program;
    const loc = gl.getUniformLocation(program, 'u_view_projection');
    if (!loc) throw new Error('missing view-projection uniform');
    this.vpLocation = loc;

    const vao = gl.createVertexArray();
    const vbo = gl.createBuffer();
    if (!vao || !vbo) throw new Error('buffer allocation failed');
    this.vao = vao;
    this.vbo = vbo;

    gl.bindVertexArray(vao);
    gl.bindBuffer(gl.ARRAY_BUFFER, vbo);
    gl.enableVertexAttribArray(0);
    gl.vertexAttribPointer(0, 3, gl.FLOAT, false, PARTICLE_STRIDE, 0);
    gl.enableVertexAttribArray(1);
    gl.vertexAttribPointer(1, 3, gl.FLOAT, false, PARTICLE_STRIDE, 24);
    gl.bindVertexArray(null);

    gl.enable(gl.DEPTH_TEST);
    gl.clearColor(0.02, 0.02, 0.04, 1);
  }

  draw(packet: FramePacket, viewProjection: Float32Array,
       width: number, height: number): void {
    const gl = this.gl;
    gl.viewport(0, 0, width, height);
    gl.clear(gl.COLOR_BUFFER_BIT | gl.DEPTH_BUFFER_BIT);
    if (packet.count === 0) return;

    gl.useProgram(this.program);
    gl.uniformMatrix4fv(this.vpLocation, false, viewProjection);
    gl.bindVertexArray(this.vao);
    gl.bindBuffer(gl.ARRAY_BUFFER, this.vbo);
    gl.bufferData(gl.ARRAY_BUFFER, packet.particles, gl.DYNAMIC_DRAW);
    gl.drawArrays(gl.POINTS, 0, packet.count);
    gl.bindVertexArray(null);
  }
}
