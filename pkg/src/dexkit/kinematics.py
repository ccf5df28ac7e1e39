"""DH-chain forward kinematics, numeric Jacobians, and damped-least-squares IK.

A chain is an ordered list of DH rows.  Each row contributes the rigid
transform TransX(a) . TransZ(d) . RotX(alpha) . RotZ(theta), composed in
row order; actuated rows read theta from the joint vector plus a fixed
offset, passive rows use the offset alone.  The three non-thumb fingers
expose 3 actuated joints (their root joints are mechanically held at
zero), the thumb exposes 4.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import LengthMismatch

FD_STEP = 1e-6  # central-difference step for the numeric Jacobian, rad


@dataclass(frozen=True)
class DhRow:
    """One DH row: translations along x/z, rotation about x, z-rotation offset.

    ``joint_index`` selects the entry of the chain's joint vector added to
    ``rot_z_offset`` at evaluation time; None marks a fixed row.
    """

    trans_x: float
    trans_z: float
    rot_x: float
    rot_z_offset: float
    joint_index: int | None = None


@dataclass(frozen=True)
class DhChain:
    """DH rows plus the rigid placement of the chain root in the hand frame."""

    rows: tuple[DhRow, ...]
    base_rotation: tuple = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    base_position: tuple = (0.0, 0.0, 0.0)
    limits: tuple = ()  # (lo, hi) per actuated joint

    @property
    def dof(self) -> int:
        return sum(1 for r in self.rows if r.joint_index is not None)

    def mid_range(self) -> np.ndarray:
        return np.array([(lo + hi) / 2.0 for lo, hi in self.limits], dtype=float)

    def link_lengths(self) -> tuple[float, ...]:
        """Absolute TransX entries; used as robot link lengths for scaling."""
        return tuple(abs(r.trans_x) for r in self.rows)


@dataclass(frozen=True)
class IkResult:
    theta: tuple[float, ...]
    residual: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class IkParams:
    damping: float = 0.05       # DLS lambda
    step_clamp: float = 0.2     # max |dtheta_i| per iteration, rad
    max_iters: int = 50
    tol: float = 1e-4           # convergence tolerance on tip residual, m


def _check_theta(chain: DhChain, theta) -> list[float]:
    theta = [float(v) for v in theta]
    if len(theta) != chain.dof:
        raise LengthMismatch(f"chain has {chain.dof} joints, got {len(theta)} angles")
    return theta


def fk(chain: DhChain, theta) -> np.ndarray:
    """Tip position of the chain in the hand base frame.

    Composes per-row transforms in row order; the per-row transform is
    TransX(a) . TransZ(d) . RotX(alpha) . RotZ(theta).
    """
    th = _check_theta(chain, theta)
    # Plain-float composition: this sits inside the IK inner loop.
    br = chain.base_rotation
    r00, r01, r02 = br[0]
    r10, r11, r12 = br[1]
    r20, r21, r22 = br[2]
    px, py, pz = chain.base_position
    for row in chain.rows:
        a, d = row.trans_x, row.trans_z
        # translate (a, 0, d) in the current frame
        px += r00 * a + r02 * d
        py += r10 * a + r12 * d
        pz += r20 * a + r22 * d
        # rotate by RotX(alpha) . RotZ(theta)
        angle = row.rot_z_offset if row.joint_index is None else th[row.joint_index] + row.rot_z_offset
        ca, sa = math.cos(row.rot_x), math.sin(row.rot_x)
        ct, st = math.cos(angle), math.sin(angle)
        # m = RotX(alpha) @ RotZ(angle)
        m00, m01, m02 = ct, -st, 0.0
        m10, m11, m12 = ca * st, ca * ct, -sa
        m20, m21, m22 = sa * st, sa * ct, ca
        n00 = r00 * m00 + r01 * m10 + r02 * m20
        n01 = r00 * m01 + r01 * m11 + r02 * m21
        n02 = r00 * m02 + r01 * m12 + r02 * m22
        n10 = r10 * m00 + r11 * m10 + r12 * m20
        n11 = r10 * m01 + r11 * m11 + r12 * m21
        n12 = r10 * m02 + r11 * m12 + r12 * m22
        n20 = r20 * m00 + r21 * m10 + r22 * m20
        n21 = r20 * m01 + r21 * m11 + r22 * m21
        n22 = r20 * m02 + r21 * m12 + r22 * m22
        r00, r01, r02 = n00, n01, n02
        r10, r11, r12 = n10, n11, n12
        r20, r21, r22 = n20, n21, n22
    return np.array([px, py, pz])


def jacobian(chain: DhChain, theta, step: float = FD_STEP) -> np.ndarray:
    """3 x dof position Jacobian by central finite differences."""
    th = _check_theta(chain, theta)
    n = len(th)
    cols = []
    for j in range(n):
        plus = list(th)
        minus = list(th)
        plus[j] += step
        minus[j] -= step
        cols.append((fk(chain, plus) - fk(chain, minus)) / (2.0 * step))
    return np.stack(cols, axis=1) if n else np.zeros((3, 0))


def _clamp_limits(theta: np.ndarray, limits) -> np.ndarray:
    if not limits:
        return theta
    lo = np.array([l for l, _ in limits])
    hi = np.array([h for _, h in limits])
    return np.clip(theta, lo, hi)


# Restart schedule: a phase is abandoned after this many iterations without
# a relative residual improvement of RESTART_MIN_GAIN, and the solver jumps
# to the next unused lattice seed (nearest-first).  Boundary-pinned phases
# creep at roughly 2% per iteration, so the gain bar must sit well above that.
RESTART_PATIENCE = 3
RESTART_MIN_GAIN = 0.10
SEED_LATTICE_FRACTIONS = (0.05, 0.3, 0.5, 0.7, 0.95)


@lru_cache(maxsize=32)
def _seed_lattice(chain: DhChain):
    """Coarse in-limits joint lattice with precomputed tip positions."""
    axes = [[lo + f * (hi - lo) for f in SEED_LATTICE_FRACTIONS]
            for lo, hi in chain.limits]
    thetas, tips, seen = [], [], set()
    for combo in itertools.product(*axes):
        tip = fk(chain, combo)
        key = tuple(np.round(tip, 9))
        if key in seen:
            continue  # joints past the tip produce duplicate probe points
        seen.add(key)
        thetas.append(combo)
        tips.append(tip)
    return np.array(thetas), np.array(tips)


def solve_ik(chain: DhChain, target, theta0, params: IkParams = IkParams()) -> IkResult:
    """Damped-least-squares position IK.

    Iterates dtheta = J^T (J J^T + lambda^2 I)^-1 e with per-component step
    clamping and joint-limit clamping each iteration.  The damping constant
    caps an error-proportional lambda so the endgame is Newton-fast.  When a
    phase stagnates (typically pinned on a joint limit in the wrong basin)
    the solver restarts from coarse lattice seeds, nearest to the target
    first, all within the same iteration budget.  Non-convergence is
    reported through ``converged``, never raised.
    """
    target = np.asarray(target, dtype=float)
    theta = _clamp_limits(np.array(_check_theta(chain, theta0)), chain.limits)
    eye3 = np.eye(3)

    best_theta = theta
    best_residual = float(np.linalg.norm(target - fk(chain, theta)))
    if best_residual <= params.tol:
        return IkResult(tuple(theta), best_residual, 0, True)

    seed_thetas, seed_tips = _seed_lattice(chain)
    order = np.argsort(np.linalg.norm(seed_tips - target, axis=1), kind="stable")
    seeds = iter(seed_thetas[order])

    phase_best = best_residual
    stagnant = 0
    polishing = False
    iterations = 0
    for iterations in range(1, params.max_iters + 1):
        err = target - fk(chain, theta)
        lam = min(params.damping, float(np.linalg.norm(err)) / math.sqrt(2.0))
        jac = jacobian(chain, theta)
        core = jac @ jac.T + lam * lam * eye3
        dtheta = jac.T @ np.linalg.solve(core, err)
        dtheta = np.clip(dtheta, -params.step_clamp, params.step_clamp)
        theta = _clamp_limits(theta + dtheta, chain.limits)
        residual = float(np.linalg.norm(target - fk(chain, theta)))
        if residual < best_residual:
            best_residual = residual
            best_theta = theta
        if residual <= params.tol:
            return IkResult(tuple(theta), residual, iterations, True)
        if residual < phase_best * (1.0 - RESTART_MIN_GAIN):
            phase_best, stagnant = residual, 0
        else:
            stagnant += 1
        if stagnant >= RESTART_PATIENCE and not polishing:
            nxt = next(seeds, None)
            if nxt is None:
                theta, polishing = best_theta, True
            else:
                theta = np.array(nxt)
                phase_best = float(np.linalg.norm(target - fk(chain, theta)))
            stagnant = 0
    return IkResult(tuple(best_theta), best_residual, iterations, False)


# -- default chains ----------------------------------------------------------

PI = math.pi

# Non-thumb fingers: passive mounting row, then three actuated joints.  The
# root/abduction joint is not part of the chain; it is commanded to zero.
FINGER_DH_ROWS = (
    DhRow(0.0, 0.0166, -PI / 2, 0.0, None),
    DhRow(0.054, 0.0, 0.0, -PI / 2, 0),
    DhRow(0.0384, 0.0, 0.0, 0.0, 1),
    DhRow(0.0437, 0.0, 0.0, 0.0, 2),
)

# Thumb: all four rows actuated.
THUMB_DH_ROWS = (
    DhRow(0.0, 0.0, PI / 2, 0.0, 0),
    DhRow(0.0, 0.0554, -PI / 2, -PI / 2, 1),
    DhRow(0.0514, 0.0, 0.0, -PI / 2, 2),
    DhRow(0.0593, 0.0, 0.0, 0.0, 3),
)


def finger_chain(limits=None, base_rotation=None, base_position=(0.0, 0.0, 0.0)) -> DhChain:
    """Three-DoF finger chain with the default DH table."""
    if limits is None:
        limits = ((-PI / 2, PI / 2),) * 3
    if base_rotation is None:
        base_rotation = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    return DhChain(rows=FINGER_DH_ROWS, base_rotation=base_rotation,
                   base_position=tuple(base_position), limits=tuple(limits))


def thumb_chain(limits=None, base_rotation=None, base_position=(0.0, 0.0, 0.0)) -> DhChain:
    """Four-DoF thumb chain with the default DH table."""
    if limits is None:
        limits = ((-PI / 2, PI / 2),) * 4
    if base_rotation is None:
        base_rotation = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    return DhChain(rows=THUMB_DH_ROWS, base_rotation=base_rotation,
                   base_position=tuple(base_position), limits=tuple(limits))
