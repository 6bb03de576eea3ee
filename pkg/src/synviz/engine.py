"""Gravity-point particle simulation driven by analysis frames.

Twelve particle groups, one per frequency bin, each attracted toward its own
moving gravity point. Group i's gravity point wanders (seeded random walk,
step size scaled by that bin's averaged volatility) inside a cube of side 3
centered at (0, y_center(i), 0), with y_center running linearly from -12
(lowest bin) to 10 (highest).

Per group, six inputs feed the simulation each hop:

  u_color_rgb   base color (from the active preset)
  u_target      gravity point position
  u_force_amt   attraction magnitude; doubled while the bin's trigger is on
  u_color_mag   brightness scalar in [0, 1] from the averaged bin value
  u_emphasis    the trigger flag itself
  u_y_center    vertical center of the group's cube

plus one global input, u_color_sensitivity, and three per-particle state
streams (position, velocity, RGBA color) that feed back through each step.
The color alpha channel stores the particle's group index and is never used
for rendering transparency.

Integration is semi-implicit Euler with velocity drag:

  a = u_force_amt * normalize(u_target - p)   (zero within 1e-6 of target)
  v' = drag * (v + a*dt)
  p' = p + v'*dt

which keeps speeds bounded by force*dt*drag/(1 - drag) for drag < 1. One
step corresponds to exactly one hop (dt = 1024/44100 s), so simulation time
tracks audio time. Everything is deterministic given (seed, frame stream,
config); there are no inter-particle forces, so the update is a pure
vectorized map over particles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import AnalysisConfig, AnalysisFrame
from .audio import HOP_SIZE, SAMPLE_RATE
from .palette import Preset, Rgb, default_bin_palette
from .wire import FramePacket

N_GROUPS = 12
Y_BOTTOM = -12.0   # gravity-point center of the lowest-frequency group
Y_TOP = 10.0       # and of the highest
CUBE_HALF = 1.5    # gravity points roam a cube of side 3
EPS_DIST = 1e-6

HOP_DT = HOP_SIZE / SAMPLE_RATE

# Declared input surface: 6 inputs per group, 1 global, 3 state streams.
GROUP_INPUT_NAMES = ("u_color_rgb", "u_target", "u_force_amt",
                     "u_color_mag", "u_emphasis", "u_y_center")
GLOBAL_INPUT_NAMES = ("u_color_sensitivity",)
STATE_STREAM_NAMES = ("position", "velocity", "color")


def parameter_inventory() -> dict[str, int]:
    """Count of named simulation inputs: 12*6 group + 1 global + 3 streams."""
    group = N_GROUPS * len(GROUP_INPUT_NAMES)
    return {
        "group_inputs": group,
        "global_inputs": len(GLOBAL_INPUT_NAMES),
        "state_streams": len(STATE_STREAM_NAMES),
        "total": group + len(GLOBAL_INPUT_NAMES) + len(STATE_STREAM_NAMES),
    }


def y_center(group: int) -> float:
    """Vertical center of a group's cube, linear from -12 to 10."""
    if not 0 <= group < N_GROUPS:
        raise ValueError(f"group must be 0..{N_GROUPS - 1}, got {group}")
    return Y_BOTTOM + group * (Y_TOP - Y_BOTTOM) / (N_GROUPS - 1)


Y_CENTERS = np.array([y_center(g) for g in range(N_GROUPS)], dtype=np.float32)


@dataclass(frozen=True)
class SimConfig:
    n_particles: int = 100_000
    seed: int = 0
    dt: float = HOP_DT
    drag: float = 0.98          # velocity retention per step
    base_force: float = 1.0
    target_walk_scale: float = 1.0

    def __post_init__(self):
        if self.n_particles < N_GROUPS:
            raise ValueError(f"need at least {N_GROUPS} particles")
        if not 0.0 < self.drag <= 1.0:
            raise ValueError("drag must be in (0, 1]")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.base_force < 0.0 or self.target_walk_scale < 0.0:
            raise ValueError("force and walk scales must be >= 0")


@dataclass(frozen=True)
class GroupParams:
    """The six per-group inputs for one hop."""

    u_color_rgb: Rgb
    u_target: np.ndarray        # (3,) float32
    u_force_amt: float
    u_color_mag: float
    u_emphasis: bool
    u_y_center: float

    def __post_init__(self):
        self.u_target.setflags(write=False)
        if not 0.0 <= self.u_color_mag <= 1.0:
            raise ValueError("u_color_mag must be in [0, 1]")
        if self.u_force_amt < 0.0:
            raise ValueError("u_force_amt must be >= 0")
        lo = np.array([-CUBE_HALF, self.u_y_center - CUBE_HALF, -CUBE_HALF])
        hi = np.array([CUBE_HALF, self.u_y_center + CUBE_HALF, CUBE_HALF])
        if np.any(self.u_target < lo - 1e-5) or np.any(self.u_target > hi + 1e-5):
            raise ValueError("u_target outside the group's side-3 cube")


@dataclass(frozen=True)
class EngineParams:
    groups: tuple[GroupParams, ...]
    u_color_sensitivity: float

    def __post_init__(self):
        if len(self.groups) != N_GROUPS:
            raise ValueError(f"need exactly {N_GROUPS} groups")
        if self.u_color_sensitivity <= 0.0:
            raise ValueError("u_color_sensitivity must be positive")


@dataclass
class ParticleState:
    """Positions (N,3), velocities (N,3), RGBA colors (N,4), all float32.
    colors[:, 3] carries the particle's group index as an exact small int."""

    positions: np.ndarray
    velocities: np.ndarray
    colors: np.ndarray

    def __post_init__(self):
        n = len(self.positions)
        if len(self.velocities) != n or len(self.colors) != n:
            raise ValueError("state buffers must have identical length")

    @property
    def n_particles(self) -> int:
        return len(self.positions)

    @property
    def groups(self) -> np.ndarray:
        return self.colors[:, 3].astype(np.int32)


def init_particles(cfg: SimConfig,
                   base_colors: list[Rgb] | tuple[Rgb, ...] | None = None
                   ) -> ParticleState:
    """Seeded initial state: particle i joins group i mod 12, placed
    uniformly in its group's cube with zero velocity."""
    base = list(base_colors) if base_colors is not None else default_bin_palette()
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_particles
    groups = np.arange(n, dtype=np.int32) % N_GROUPS

    positions = rng.uniform(-CUBE_HALF, CUBE_HALF, (n, 3)).astype(np.float32)
    positions[:, 1] += Y_CENTERS[groups]
    velocities = np.zeros((n, 3), dtype=np.float32)

    base_rgb = np.array([[c.r, c.g, c.b] for c in base], dtype=np.float32)
    colors = np.empty((n, 4), dtype=np.float32)
    colors[:, :3] = base_rgb[groups]
    colors[:, 3] = groups
    return ParticleState(positions=positions, velocities=velocities, colors=colors)


def initial_targets() -> np.ndarray:
    """Gravity points start at their cube centers."""
    t = np.zeros((N_GROUPS, 3), dtype=np.float32)
    t[:, 1] = Y_CENTERS
    return t


def derive_group_params(frame: AnalysisFrame, preset: Preset, cfg: SimConfig,
                        tuning: AnalysisConfig, prev_targets: np.ndarray,
                        rng: np.random.Generator) -> EngineParams:
    """Map one analysis frame onto the 12 per-group parameter sets.

    Color magnitude follows the averaged bins (relative to max_average);
    force is affine in the averaged bins so idle groups keep drifting, and
    doubles while the bin's trigger is on; each gravity point takes one
    random-walk step whose length scales with the bin's averaged volatility,
    clamped back into its cube. prev_targets is not mutated.
    """
    directions = rng.normal(size=(N_GROUPS, 3))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    np.divide(directions, norms, out=directions, where=norms > 0)

    groups = []
    for i in range(N_GROUPS):
        avg = float(frame.avg_bins[i])
        emphasis = bool(frame.triggers[i])
        force = cfg.base_force * (0.5 + avg)
        if emphasis:
            force *= 2.0
        mag = min(max(avg / tuning.max_average, 0.0), 1.0)

        step_len = (cfg.target_walk_scale
                    * (float(frame.avg_volatility[i]) / tuning.max_trigger)
                    * cfg.dt)
        yc = float(Y_CENTERS[i])
        lo = np.array([-CUBE_HALF, yc - CUBE_HALF, -CUBE_HALF], dtype=np.float32)
        hi = np.array([CUBE_HALF, yc + CUBE_HALF, CUBE_HALF], dtype=np.float32)
        target = prev_targets[i] + (directions[i] * step_len).astype(np.float32)
        target = np.clip(target, lo, hi)

        groups.append(GroupParams(
            u_color_rgb=preset.base_colors[i],
            u_target=target,
            u_force_amt=force,
            u_color_mag=mag,
            u_emphasis=emphasis,
            u_y_center=yc,
        ))
    return EngineParams(groups=tuple(groups),
                        u_color_sensitivity=preset.color_sensitivity)


def step(state: ParticleState, params: EngineParams,
         cfg: SimConfig) -> ParticleState:
    """Advance every particle one hop. Pure: returns a new state."""
    groups = state.groups
    force = np.array([g.u_force_amt for g in params.groups], dtype=np.float32)
    targets = np.stack([g.u_target for g in params.groups]).astype(np.float32)
    base_rgb = np.array([[g.u_color_rgb.r, g.u_color_rgb.g, g.u_color_rgb.b]
                         for g in params.groups], dtype=np.float32)
    mags = np.array([g.u_color_mag for g in params.groups], dtype=np.float32)

    delta = targets[groups] - state.positions
    dist = np.linalg.norm(delta, axis=1)
    accel = np.zeros_like(delta)
    moving = dist >= EPS_DIST
    accel[moving] = delta[moving] * (force[groups][moving] / dist[moving])[:, None]

    velocities = (cfg.drag * (state.velocities + accel * cfg.dt)).astype(np.float32)
    positions = state.positions + velocities * cfg.dt

    group_rgb = np.clip(base_rgb * mags[:, None] * params.u_color_sensitivity,
                        0.0, 1.0)
    colors = state.colors.copy()
    colors[:, :3] = group_rgb[groups]

    return ParticleState(positions=positions, velocities=velocities, colors=colors)


def params_matrix(params: EngineParams) -> np.ndarray:
    """Wire layout of the group parameters: one row per group,
    [r, g, b, tx, ty, tz, force_amt, color_mag, emphasis, y_center]."""
    rows = np.empty((N_GROUPS, 10), dtype=np.float32)
    for i, g in enumerate(params.groups):
        rows[i, 0:3] = (g.u_color_rgb.r, g.u_color_rgb.g, g.u_color_rgb.b)
        rows[i, 3:6] = g.u_target
        rows[i, 6] = g.u_force_amt
        rows[i, 7] = g.u_color_mag
        rows[i, 8] = 1.0 if g.u_emphasis else 0.0
        rows[i, 9] = g.u_y_center
    return rows


def snapshot(state: ParticleState, frame: AnalysisFrame, params: EngineParams,
             frame_index: int | None = None,
             timestamp_s: float | None = None) -> FramePacket:
    """Immutable wire frame of the current simulation moment."""
    idx = frame.hop_index if frame_index is None else frame_index
    ts = idx * HOP_DT if timestamp_s is None else timestamp_s
    return FramePacket(
        frame_index=idx,
        timestamp_s=ts,
        bins=frame.bins,
        avg_bins=frame.avg_bins,
        volatility=frame.volatility,
        avg_volatility=frame.avg_volatility,
        triggers=frame.triggers,
        dynamics_percent=frame.dynamics_percent,
        group_params=params_matrix(params),
        color_sensitivity=params.u_color_sensitivity,
        positions=state.positions,
        velocities=state.velocities,
        colors=state.colors,
    )


class Engine:
    """Owns particle state, gravity-point positions, and the walk RNG.

    Placement and walk use separate seeded generators so reset_sim restores
    the exact initial particle layout without rewinding the target walk.
    """

    def __init__(self, cfg: SimConfig, preset: Preset):
        self.cfg = cfg
        self.state = init_particles(cfg, preset.base_colors)
        self.targets = initial_targets()
        self._walk_rng = np.random.default_rng(cfg.seed + 1)

    def advance(self, frame: AnalysisFrame, preset: Preset,
                tuning: AnalysisConfig) -> EngineParams:
        params = derive_group_params(frame, preset, self.cfg, tuning,
                                     self.targets, self._walk_rng)
        self.targets = np.stack([g.u_target for g in params.groups])
        self.state = step(self.state, params, self.cfg)
        return params

    def reset(self, preset: Preset) -> None:
        """Re-roll the initial particle layout from the configured seed."""
        self.state = init_particles(self.cfg, preset.base_colors)
        self.targets = initial_targets()
