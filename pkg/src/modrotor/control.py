"""Rank-specific geometric controllers with minimum-norm thrust allocation.

Position tracking uses a PD law with gravity and acceleration feed-forward.
Attitude errors are measured on the thrust frame rather than the body frame,
so the controller always spends thrust along the structure's strongest force
direction. The allocation stage depends on how many force directions the
structure can span:

* one direction (4 controllable DOF): thrust magnitude along the strong
  axis plus full torque, like a conventional quadrotor but tilted;
* two directions (5 DOF): force components in the strong plane plus full
  torque, which frees the pitch angle to be commanded independently;
* three directions (6 DOF): full wrench, position and attitude decoupled.

Each mode solves its reduced thrust map with a Moore-Penrose pseudoinverse,
giving the exact minimum-norm thrusts, then clamps to the motor range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import GRAVITY, RigidState
from .errors import AllocationError, ControlDegeneracyError
from .module_design import Wrench
from .so3 import E1, E3, cross3, rot_y, rot_z, vee
from .structure import StructureModel, numerical_rank
from .trajectory import TrajectorySample

# Relative singular-value cutoff when forming pseudoinverses.
_PINV_RCOND = 1e-10
# Commanded accelerations below this cannot define a thrust direction.
_EPS_THRUST = 1e-6
_EPS_CROSS = 1e-6


@dataclass(frozen=True, eq=False)
class Gains:
    """Diagonal PD gains: k_pos/k_vel on position, k_rot/k_ang on attitude."""

    k_pos: np.ndarray
    k_vel: np.ndarray
    k_rot: np.ndarray
    k_ang: np.ndarray

    def __post_init__(self):
        for name in ("k_pos", "k_vel", "k_rot", "k_ang"):
            mat = np.asarray(getattr(self, name), dtype=float)
            if np.isscalar(getattr(self, name)) or mat.ndim == 0:
                mat = float(mat) * np.eye(3)
            elif mat.shape == (3,):
                mat = np.diag(mat)
            if mat.shape != (3, 3) or np.any(mat != np.diag(np.diag(mat))):
                raise ValueError(f"{name} must be a diagonal 3x3 matrix")
            if np.any(np.diag(mat) <= 0.0):
                raise ValueError(f"{name} diagonal entries must be positive")
            object.__setattr__(self, name, mat)


def default_gains() -> Gains:
    """Gains tuned so every supported structure converges well inside the
    underactuated position-through-attitude cascade."""
    return Gains(k_pos=12.0, k_vel=6.0, k_rot=200.0, k_ang=20.0)


@dataclass(frozen=True, eq=False)
class AttitudeError:
    """Rotation error e_rot and angular-velocity error e_omega (rad, rad/s)."""

    e_rot: np.ndarray
    e_omega: np.ndarray


@dataclass(frozen=True, eq=False)
class ControlOutput:
    """Result of one controller evaluation.

    u: clamped rotor thrusts, N
    u_raw: minimum-norm thrusts before clamping
    desired_wrench: the commanded body wrench that ``u_raw`` realizes
    saturated: True when any rotor had to be clamped
    desired_attitude: the commanded world attitude of the thrust frame
    mode: "4dof", "5dof" or "6dof"
    """

    u: np.ndarray
    u_raw: np.ndarray
    desired_wrench: Wrench
    saturated: bool
    desired_attitude: np.ndarray
    mode: str


def position_accel(
    state: RigidState,
    sample: TrajectorySample,
    gains: Gains,
    gravity: float = GRAVITY,
) -> np.ndarray:
    """Desired acceleration: PD on position/velocity error plus gravity and
    trajectory acceleration feed-forward."""
    e_r = sample.r_d - state.r
    e_v = sample.v_d - state.v
    return gains.k_pos @ e_r + gains.k_vel @ e_v + gravity * E3 + sample.a_d


def attitude_error(
    r_ws: np.ndarray,
    r_sf: np.ndarray,
    r_wf_d: np.ndarray,
    omega: np.ndarray,
    omega_d: np.ndarray,
) -> AttitudeError:
    """Rotation and rate error of the thrust frame against its target.

    The rotation error is the vee of the antisymmetric part of the relative
    rotation; the rate error transports the desired angular velocity into
    the current frame before comparing.
    """
    r_wf = r_ws @ r_sf
    e_rot = 0.5 * vee(r_wf_d.T @ r_wf - r_wf.T @ r_wf_d)
    e_omega = omega - r_wf.T @ r_wf_d @ omega_d
    return AttitudeError(e_rot=e_rot, e_omega=e_omega)


def attitude_accel(err: AttitudeError, gains: Gains) -> np.ndarray:
    """Angular acceleration command from the attitude error."""
    return -gains.k_rot @ err.e_rot - gains.k_ang @ err.e_omega


def attitude_torque(
    err: AttitudeError,
    gains: Gains,
    inertia: np.ndarray,
    omega: np.ndarray,
) -> np.ndarray:
    """Body torque tracking the attitude error, with gyroscopic feed-forward."""
    return inertia @ attitude_accel(err, gains) + cross3(omega, inertia @ omega)


def desired_attitude_4dof(a_r: np.ndarray, yaw_d: float, eps_thrust: float = _EPS_THRUST) -> np.ndarray:
    """Thrust-frame target whose z-axis carries the desired acceleration.

    The x-axis is the yaw heading projected onto the plane normal to the
    thrust direction, as in the usual geometric quadrotor controller.
    """
    norm = np.linalg.norm(a_r)
    if norm <= eps_thrust:
        raise ControlDegeneracyError("desired acceleration too small to define a thrust direction")
    z_d = a_r / norm
    x_c = np.array([np.cos(yaw_d), np.sin(yaw_d), 0.0])
    cross = cross3(z_d, x_c)
    cross_norm = np.linalg.norm(cross)
    if cross_norm <= _EPS_CROSS:
        raise ControlDegeneracyError("thrust direction aligned with the yaw heading")
    y_d = cross / cross_norm
    x_d = cross3(y_d, z_d)
    return np.column_stack([x_d, y_d, z_d])


def thrust_4dof(
    a_r: np.ndarray,
    r_ws: np.ndarray,
    r_sf: np.ndarray,
    total_mass: float,
) -> float:
    """Scalar thrust: desired force projected on the current strong axis."""
    return float(total_mass * a_r @ (r_ws @ r_sf @ E3))


def desired_attitude_5dof(
    a_r: np.ndarray,
    yaw_d: float,
    pitch_d: float,
    eps_thrust: float = _EPS_THRUST,
) -> np.ndarray:
    """Thrust-frame target that pins the commanded yaw and pitch exactly.

    The x-axis is set directly from the yaw and pitch commands; the thrust
    direction is then projected into the remaining free plane. The first
    column of the result equals rot_z(yaw) @ rot_y(pitch) @ e1 bit-exact,
    which is what makes the pitch angle independently commandable.
    """
    norm = np.linalg.norm(a_r)
    if norm <= eps_thrust:
        raise ControlDegeneracyError("desired acceleration too small to define a thrust direction")
    z_c = a_r / norm
    x_d = rot_z(yaw_d) @ rot_y(pitch_d) @ E1
    cross = cross3(z_c, x_d)
    cross_norm = np.linalg.norm(cross)
    if cross_norm <= _EPS_CROSS:
        raise ControlDegeneracyError("thrust direction aligned with the commanded x-axis")
    y_d = cross / cross_norm
    z_d = cross3(x_d, y_d)
    return np.column_stack([x_d, y_d, z_d])


def _pinv(m: np.ndarray) -> np.ndarray:
    return np.linalg.pinv(m, rcond=_PINV_RCOND)


def _clamp(u_raw: np.ndarray, f_max: np.ndarray) -> tuple[np.ndarray, bool]:
    u = np.clip(u_raw, 0.0, f_max)
    return u, bool(np.any(np.abs(u - u_raw) > 1e-12))


def reduced_map_4dof(structure: StructureModel) -> tuple[np.ndarray, np.ndarray]:
    """Reduced 4 x 4n map for single-force-direction structures.

    The first row holds +-1 per rotor depending on whether its force axis
    points along or against the strong axis; the remaining rows are the
    torque block.
    """
    if structure.rank_f != 1:
        raise AllocationError(f"4-DOF allocation needs a rank-1 force block, got {structure.rank_f}")
    z_f = structure.r_sf @ E3
    dots = structure.force_map.T @ z_f
    if np.any(np.abs(dots) < _EPS_CROSS):
        raise AllocationError("a rotor force axis is orthogonal to the strong axis")
    axis_signs = np.sign(dots)
    a4 = np.vstack([axis_signs, structure.torque_map])
    if numerical_rank(a4) < 4:
        raise AllocationError("reduced 4-DOF map is row-rank-deficient")
    return a4, axis_signs


def reduced_map_5dof(structure: StructureModel) -> tuple[np.ndarray, bool]:
    """Reduced 5 x 4n map for planar-force structures.

    Force rows are expressed in thrust-frame coordinates with the unusable
    lateral row removed: normally the y-row, leaving (z, x) force rows over
    the torque block. When that variant is rank-deficient the x-row is
    dropped instead, leaving (z, y); the second return value reports this
    fallback so callers command the matching force component.
    """
    if structure.rank_f != 2:
        raise AllocationError(f"5-DOF allocation needs a rank-2 force block, got {structure.rank_f}")
    rows_f = structure.r_sf.T @ structure.force_map
    a5 = np.vstack([rows_f[2], rows_f[0], structure.torque_map])
    if numerical_rank(a5) == 5:
        return a5, False
    a5_fallback = np.vstack([rows_f[2], rows_f[1], structure.torque_map])
    if numerical_rank(a5_fallback) == 5:
        return a5_fallback, True
    raise AllocationError("both 5-DOF row-removal variants are rank-deficient")


def allocate_4dof(
    f: float,
    torque: np.ndarray,
    structure: StructureModel,
    desired_attitude: np.ndarray | None = None,
    _cache: tuple[np.ndarray, np.ndarray] | None = None,
) -> ControlOutput:
    """Minimum-norm thrusts realizing scalar thrust ``f`` and body torque."""
    a4, _ = reduced_map_4dof(structure) if _cache is None else (_cache[0], None)
    pinv = _pinv(a4) if _cache is None else _cache[1]
    u_raw = pinv @ np.concatenate([[f], torque])
    u, saturated = _clamp(u_raw, structure.f_max)
    wrench = Wrench(force=f * (structure.r_sf @ E3), torque=torque)
    return ControlOutput(
        u=u,
        u_raw=u_raw,
        desired_wrench=wrench,
        saturated=saturated,
        desired_attitude=np.eye(3) if desired_attitude is None else desired_attitude,
        mode="4dof",
    )


def allocate_5dof(
    f_z: float,
    f_x: float,
    torque: np.ndarray,
    structure: StructureModel,
    f_y: float = 0.0,
    desired_attitude: np.ndarray | None = None,
    _cache: tuple[np.ndarray, bool, np.ndarray] | None = None,
) -> ControlOutput:
    """Minimum-norm thrusts for force components in the strong plane plus torque.

    ``f_z`` and ``f_x`` are the force commands along the thrust frame's z-
    and x-axes. ``f_y`` is only consumed when the fallback row removal is in
    effect (degenerate designs whose second force direction is the y-axis).
    """
    if _cache is None:
        a5, fallback = reduced_map_5dof(structure)
        pinv = _pinv(a5)
    else:
        a5, fallback, pinv = _cache
    lateral = f_y if fallback else f_x
    u_raw = pinv @ np.concatenate([[f_z, lateral], torque])
    u, saturated = _clamp(u_raw, structure.f_max)
    lateral_axis = structure.r_sf @ (E1 if not fallback else np.array([0.0, 1.0, 0.0]))
    wrench = Wrench(force=f_z * (structure.r_sf @ E3) + lateral * lateral_axis, torque=torque)
    return ControlOutput(
        u=u,
        u_raw=u_raw,
        desired_wrench=wrench,
        saturated=saturated,
        desired_attitude=np.eye(3) if desired_attitude is None else desired_attitude,
        mode="5dof",
    )


def allocate_6dof(
    a_r: np.ndarray,
    a_rot: np.ndarray,
    state: RigidState,
    structure: StructureModel,
    desired_attitude: np.ndarray | None = None,
    _cache: np.ndarray | None = None,
) -> ControlOutput:
    """Minimum-norm thrusts for a fully actuated structure.

    ``a_r`` must already include the gravity feed-forward; it is rotated
    into the body frame and scaled by mass, while ``a_rot`` is scaled by the
    inertia tensor with the gyroscopic term added back.
    """
    if numerical_rank(structure.thrust_map) < 6:
        raise AllocationError("6-DOF allocation needs a full-rank thrust map")
    pinv = _pinv(structure.thrust_map) if _cache is None else _cache
    force = structure.total_mass * (state.r_ws.T @ a_r)
    torque = structure.inertia @ a_rot + cross3(state.omega, structure.inertia @ state.omega)
    u_raw = pinv @ np.concatenate([force, torque])
    u, saturated = _clamp(u_raw, structure.f_max)
    return ControlOutput(
        u=u,
        u_raw=u_raw,
        desired_wrench=Wrench(force=force, torque=torque),
        saturated=saturated,
        desired_attitude=np.eye(3) if desired_attitude is None else desired_attitude,
        mode="6dof",
    )


class Controller:
    """Closed-loop controller bound to one structure.

    Holds only the gains and the structure's precomputed reduced maps, so an
    instance is cheap to call every step and safe to share read-only.
    """

    def __init__(self, structure: StructureModel, gains: Gains | None = None,
                 gravity: float = GRAVITY):
        self.structure = structure
        self.gains = gains if gains is not None else default_gains()
        self.gravity = gravity
        self.mode = {1: "4dof", 2: "5dof", 3: "6dof"}.get(structure.rank_f)
        if self.mode is None:
            raise AllocationError(f"unsupported force-block rank {structure.rank_f}")
        if self.mode == "4dof":
            a4, _ = reduced_map_4dof(structure)
            self._cache4 = (a4, _pinv(a4))
        elif self.mode == "5dof":
            a5, fallback = reduced_map_5dof(structure)
            self._cache5 = (a5, fallback, _pinv(a5))
        else:
            if numerical_rank(structure.thrust_map) < 6:
                raise AllocationError("6-DOF control needs a full-rank thrust map")
            self._cache6 = _pinv(structure.thrust_map)

    def step(self, state: RigidState, sample: TrajectorySample) -> ControlOutput:
        structure = self.structure
        a_r = position_accel(state, sample, self.gains, self.gravity)

        if self.mode == "4dof":
            r_wf_d = desired_attitude_4dof(a_r, sample.yaw_d)
            err = attitude_error(state.r_ws, structure.r_sf, r_wf_d, state.omega, sample.omega_d)
            torque = attitude_torque(err, self.gains, structure.inertia, state.omega)
            f = thrust_4dof(a_r, state.r_ws, structure.r_sf, structure.total_mass)
            # Rotors are unidirectional; a transiently negative command is cut.
            return allocate_4dof(max(f, 0.0), torque, structure,
                                 desired_attitude=r_wf_d, _cache=self._cache4)

        if self.mode == "5dof":
            r_wf_d = desired_attitude_5dof(a_r, sample.yaw_d, sample.pitch_d)
            err = attitude_error(state.r_ws, structure.r_sf, r_wf_d, state.omega, sample.omega_d)
            torque = attitude_torque(err, self.gains, structure.inertia, state.omega)
            axes_w = state.r_ws @ structure.r_sf
            f_z = structure.total_mass * float(a_r @ axes_w[:, 2])
            f_x = structure.total_mass * float(a_r @ axes_w[:, 0])
            f_y = structure.total_mass * float(a_r @ axes_w[:, 1])
            return allocate_5dof(f_z, f_x, torque, structure, f_y=f_y,
                                 desired_attitude=r_wf_d, _cache=self._cache5)

        r_wf_d = sample.r_wf_d
        err = attitude_error(state.r_ws, structure.r_sf, r_wf_d, state.omega, sample.omega_d)
        a_rot = attitude_accel(err, self.gains)
        return allocate_6dof(a_r, a_rot, state, structure,
                             desired_attitude=r_wf_d, _cache=self._cache6)


def controller_step(
    structure: StructureModel,
    state: RigidState,
    sample: TrajectorySample,
    gains: Gains | None = None,
    gravity: float = GRAVITY,
) -> ControlOutput:
    """One controller evaluation; dispatches on the structure's force rank."""
    return Controller(structure, gains, gravity).step(state, sample)
