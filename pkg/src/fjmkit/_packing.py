"""Internal circle-packing engine.

Everything here works on the normalized problem: ``n`` unit circles inside a
container of radius ``C`` (the container-to-circle ratio). Public geometry
APIs rescale results to physical units.

The solver combines three ingredients:

* seeded initial placements (hexagonal lattice clips, concentric rings,
  uniform random),
* a repulsion/boundary-projection relaxation with a radius ramp (circles are
  grown from an easy loose state to full size, pushing overlaps apart each
  step),
* an SLSQP polish that minimizes the container radius subject to exact
  non-overlap and containment constraints.

All randomness flows through one ``numpy`` Generator, so a fixed seed gives
bit-identical layouts. Single-threaded on purpose: results must not depend
on worker count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

HEX_DENSITY = math.pi / math.sqrt(12.0)

# Proven optimal container/circle ratios, exact closed forms only.
# Used as hard floors: no valid layout can beat these.
PROVEN_RATIOS = {
    1: 1.0,
    2: 2.0,
    3: 1.0 + 2.0 / math.sqrt(3.0),
    4: 1.0 + math.sqrt(2.0),
    5: 1.0 + math.sqrt(2.0 + 2.0 / math.sqrt(5.0)),
    6: 3.0,
    7: 3.0,
    8: 1.0 + 1.0 / math.sin(math.pi / 7.0),
    9: 1.0 + math.sqrt(2.0 * (2.0 + math.sqrt(2.0))),
    11: 1.0 + 1.0 / math.sin(math.pi / 9.0),
    13: 2.0 + math.sqrt(5.0),
    19: 1.0 + math.sqrt(2.0) + math.sqrt(6.0),
}


@dataclass(frozen=True)
class Effort:
    """Search budget knobs for one min-ratio solve."""

    random_starts: int
    hex_starts: int
    ring_starts: int
    hop_rounds: int
    ramp_stages: int
    sweeps_per_stage: int
    final_sweeps: int

    def scaled(self, factor: float) -> "Effort":
        s = lambda v: max(1, int(round(v * factor)))
        return Effort(
            random_starts=s(self.random_starts),
            hex_starts=s(self.hex_starts),
            ring_starts=s(self.ring_starts),
            hop_rounds=s(self.hop_rounds),
            ramp_stages=self.ramp_stages,
            sweeps_per_stage=self.sweeps_per_stage,
            final_sweeps=self.final_sweeps,
        )


LIVE_EFFORT = Effort(
    random_starts=8,
    hex_starts=6,
    ring_starts=4,
    hop_rounds=6,
    ramp_stages=10,
    sweeps_per_stage=50,
    final_sweeps=300,
)

BUILD_EFFORT = Effort(
    random_starts=110,
    hex_starts=20,
    ring_starts=40,
    hop_rounds=80,
    ramp_stages=12,
    sweeps_per_stage=60,
    final_sweeps=500,
)


# ---------------------------------------------------------------------------
# Geometry helpers


def min_pair_distance(centers: np.ndarray) -> float:
    if len(centers) < 2:
        return math.inf
    diff = centers[:, None, :] - centers[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    return float(math.sqrt(d2.min()))

def max_center_norm(centers: np.ndarray) -> float:
    if len(centers) == 0:
        return 0.0
    return float(np.linalg.norm(centers, axis=1).max())


def violation(centers: np.ndarray, container: float) -> float:
    """Worst constraint violation for unit circles in ``container``."""
    pair = max(0.0, 2.0 - min_pair_distance(centers))
    wall = max(0.0, max_center_norm(centers) - (container - 1.0))
    return max(pair, wall)


def canonical(centers: np.ndarray) -> np.ndarray:
    """Stable ordering: by norm, then angle. Keeps outputs reproducible."""
    norms = np.linalg.norm(centers, axis=1)
    angles = np.arctan2(centers[:, 1], centers[:, 0])
    order = np.lexsort((angles, np.round(norms, 12)))
    return centers[order]


# ---------------------------------------------------------------------------
# Seeds


def _hex_points(limit: float, offset: np.ndarray, angle: float) -> np.ndarray:
    """Hexagonal lattice (spacing 2) points with |p| <= limit."""
    span = int(math.ceil(limit / 2.0)) + 2
    i = np.arange(-span, span + 1)
    jj, ii = np.meshgrid(i, i)
    x = 2.0 * ii + (jj % 2)
    y = math.sqrt(3.0) * jj
    pts = np.stack([x.ravel(), y.ravel()], axis=1).astype(float)
    rot = np.array(
        [[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]]
    )
    pts = pts @ rot.T + offset
    keep = np.linalg.norm(pts, axis=1) <= limit + 2.5
    return pts[keep]


def seed_hex(n: int, container: float, rng: np.random.Generator) -> np.ndarray:
    """n lattice points nearest the origin, randomly offset and rotated."""
    offset = rng.uniform(-1.0, 1.0, size=2)
    angle = rng.uniform(0.0, math.pi / 3.0)
    pts = _hex_points(container + 2.0, offset, angle)
    if len(pts) < n:
        extra = seed_random(n - len(pts), container, rng)
        pts = np.vstack([pts, extra])
    norms = np.linalg.norm(pts, axis=1)
    idx = np.argsort(norms, kind="stable")[:n]
    return pts[idx].copy()


def seed_random(n: int, container: float, rng: np.random.Generator) -> np.ndarray:
    radius = max(container - 1.0, 0.0)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    t = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return np.stack([r * np.cos(t), r * np.sin(t)], axis=1)


def seed_rings(n: int, container: float, rng: np.random.Generator) -> np.ndarray:
    """Concentric rings filled outward-in with jittered spacing."""
    pts: list[np.ndarray] = []
    remaining = n
    radius = container - 1.0
    phase_rng = rng
    while remaining > 0 and radius > 1.0:
        cap = max(1, int(math.pi / math.asin(min(1.0, 1.0 / radius))))
        k = min(remaining, cap)
        phase = phase_rng.uniform(0.0, 2.0 * math.pi)
        t = phase + 2.0 * math.pi * np.arange(k) / k
        pts.append(np.stack([radius * np.cos(t), radius * np.sin(t)], axis=1))
        remaining -= k
        radius -= math.sqrt(3.0) * phase_rng.uniform(0.95, 1.1)
    if remaining > 0:
        if remaining == 1:
            pts.append(np.zeros((1, 2)))
        else:
            pts.append(seed_random(remaining, max(radius + 1.0, 1.5), phase_rng))
    return np.vstack(pts)[:n]


# ---------------------------------------------------------------------------
# Relaxation


def _resolve(
    centers: np.ndarray,
    container: float,
    scale: float,
    sweeps: int,
    rng: np.random.Generator,
    tol: float = 1e-12,
    omega: float = 1.35,
    kick: float = 0.0,
    stall_limit: int = 80,
) -> tuple[np.ndarray, bool]:
    """Push overlaps apart / project into the wall at circle radius ``scale``.

    Returns the relaxed centers and whether all constraints were met.
    Bails out early when the worst violation stops improving.
    """
    c = centers.copy()
    n = len(c)
    if n == 0:
        return c, True
    target = 2.0 * scale
    limit = container - scale
    if limit < 0:
        return c, False
    best_viol = math.inf
    last_improve = 0
    for sweep in range(sweeps):
        diff = c[:, None, :] - c[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        np.fill_diagonal(d2, np.inf)
        d = np.sqrt(d2)
        overlap = target - d
        mask = overlap > 0.0
        worst_pair = float(overlap.max()) if n > 1 else 0.0
        if mask.any():
            coincident = mask & (d < 1e-9)
            if coincident.any():
                iu = np.where(np.triu(coincident, 1))
                for a, b in zip(*iu):
                    bump = rng.normal(scale=0.1 * scale, size=2)
                    c[a] += bump
                    c[b] -= bump
                continue
            inv = np.zeros_like(d)
            np.divide(1.0, d, out=inv, where=mask)
            factor = np.where(mask, overlap, 0.0) * (0.5 * omega) * inv
            c += np.einsum("ij,ijk->ik", factor, diff)
        norms = np.linalg.norm(c, axis=1)
        out = norms > limit
        worst_wall = float((norms - limit).max()) if out.any() else 0.0
        if out.any():
            c[out] *= (limit / norms[out])[:, None]
        viol = max(worst_pair, worst_wall)
        if viol <= tol:
            return c, True
        if viol < best_viol - 1e-15:
            best_viol = viol
            last_improve = sweep
        elif sweep - last_improve > stall_limit:
            break
        if kick > 0.0 and sweep and sweep % 40 == 0:
            amp = kick * scale * (1.0 - sweep / sweeps)
            c += rng.normal(scale=amp, size=c.shape)
            norms = np.linalg.norm(c, axis=1)
            out = norms > limit
            if out.any():
                c[out] *= (limit / norms[out])[:, None]
    return c, violation_at(c, container, scale) <= tol


def violation_at(centers: np.ndarray, container: float, scale: float) -> float:
    pair = max(0.0, 2.0 * scale - min_pair_distance(centers))
    wall = max(0.0, max_center_norm(centers) - (container - scale))
    return max(pair, wall)


def _ramp_settle(
    centers: np.ndarray,
    container: float,
    effort: Effort,
    rng: np.random.Generator,
) -> tuple[np.ndarray, bool]:
    """Grow circles from a loose radius up to 1.0, relaxing at each stage."""
    c = centers.copy()
    start = 0.3
    for stage in range(effort.ramp_stages):
        frac = (stage + 1) / effort.ramp_stages
        scale = start + (1.0 - start) * frac
        c, _ = _resolve(
            c, container, scale, effort.sweeps_per_stage, rng, tol=1e-9, kick=0.03
        )
    c, ok = _resolve(c, container, 1.0, effort.final_sweeps, rng, kick=0.02)
    return c, ok


# ---------------------------------------------------------------------------
# SLSQP polish


def _polish_min_ratio(
    centers: np.ndarray, container: float, rounds: int = 3
) -> tuple[np.ndarray, float]:
    """Minimize the container radius from a near-feasible layout.

    Works with an active subset of pair constraints, re-expanding until the
    full constraint set is satisfied.
    """
    n = len(centers)
    if n == 1:
        return np.zeros((1, 2)), 1.0
    c = centers.copy()
    best_c, best_ratio = c, container
    iu = np.triu_indices(n, 1)
    active = _active_pairs(c, iu, 2.6)
    for _ in range(rounds):
        res = _run_slsqp(c, container, active)
        if res is None:
            break
        c_new, ratio_new = res
        d = np.linalg.norm(c_new[iu[0]] - c_new[iu[1]], axis=1)
        violated = d < 2.0 - 1e-9
        if violated.any():
            bad = set(map(tuple, np.stack([iu[0][violated], iu[1][violated]], 1)))
            active = np.array(sorted(set(map(tuple, active)) | bad))
            c = c_new
            container = max(ratio_new, max_center_norm(c_new) + 1.0)
            continue
        if ratio_new < best_ratio:
            best_c, best_ratio = c_new, ratio_new
        active = _active_pairs(c_new, iu, 2.6)
        c, container = c_new, ratio_new
        break
    return best_c, best_ratio


def _active_pairs(centers: np.ndarray, iu, cutoff: float) -> np.ndarray:
    d = np.linalg.norm(centers[iu[0]] - centers[iu[1]], axis=1)
    keep = d < cutoff
    return np.stack([iu[0][keep], iu[1][keep]], axis=1)


def _run_slsqp(
    centers: np.ndarray, container: float, pairs: np.ndarray
) -> tuple[np.ndarray, float] | None:
    n = len(centers)
    x0 = np.concatenate([centers.ravel(), [container]])
    pi_, pj_ = (pairs[:, 0], pairs[:, 1]) if len(pairs) else (np.array([], int),) * 2

    def objective(x):
        return x[-1]

    def objective_jac(x):
        g = np.zeros_like(x)
        g[-1] = 1.0
        return g

    def cons_fun(x):
        pts = x[:-1].reshape(n, 2)
        big_r = x[-1]
        out = np.empty(len(pi_) + n)
        if len(pi_):
            delta = pts[pi_] - pts[pj_]
            out[: len(pi_)] = np.einsum("ij,ij->i", delta, delta) - 4.0
        out[len(pi_):] = (big_r - 1.0) ** 2 - np.einsum("ij,ij->i", pts, pts)
        return out

    def cons_jac(x):
        pts = x[:-1].reshape(n, 2)
        big_r = x[-1]
        jac = np.zeros((len(pi_) + n, 2 * n + 1))
        if len(pi_):
            delta = pts[pi_] - pts[pj_]
            for row, (a, b) in enumerate(zip(pi_, pj_)):
                jac[row, 2 * a : 2 * a + 2] = 2.0 * delta[row]
                jac[row, 2 * b : 2 * b + 2] = -2.0 * delta[row]
        for i in range(n):
            row = len(pi_) + i
            jac[row, 2 * i : 2 * i + 2] = -2.0 * pts[i]
            jac[row, -1] = 2.0 * (big_r - 1.0)
        return jac

    span = container + 2.0
    bounds = [(-span, span)] * (2 * n) + [(1.0, span)]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = minimize(
                objective,
                x0,
                jac=objective_jac,
                bounds=bounds,
                constraints=[{"type": "ineq", "fun": cons_fun, "jac": cons_jac}],
                method="SLSQP",
                options={"maxiter": 250, "ftol": 1e-14},
            )
    except (ValueError, OverflowError):
        return None
    if not np.isfinite(res.x).all():
        return None
    pts = res.x[:-1].reshape(n, 2)
    return pts, float(res.x[-1])


# ---------------------------------------------------------------------------
# Certification-oriented normalization


def _enclosing_center(points: np.ndarray) -> np.ndarray:
    """Approximate center of the minimum enclosing circle of ``points``.

    Iteratively steps toward the farthest point with a shrinking step; ample
    for recentering (the result is only accepted if it helps).
    """
    c = points.mean(axis=0)
    for k in range(1, 120):
        d = points - c
        norms = np.einsum("ij,ij->i", d, d)
        far = int(np.argmax(norms))
        c = c + d[far] / (k + 1.0)
    return c


def normalize_layout(centers: np.ndarray, pad: float = 1e-7) -> tuple[float, np.ndarray]:
    """Rescale a near-feasible layout into a strictly valid one.

    Centers are shifted to the best available container center and scaled so
    the minimum pair distance is exactly 2; the container is then the max
    center norm plus one, padded by ``pad`` relative. Returns
    ``(ratio, centers)`` for unit circles.
    """
    c = np.asarray(centers, dtype=float)
    if len(c) == 1:
        return 1.0, np.zeros((1, 2))
    shifted = c - _enclosing_center(c)
    if max_center_norm(shifted) < max_center_norm(c):
        c = shifted
    dmin = min_pair_distance(c)
    if dmin <= 0.0:
        raise ValueError("coincident centers cannot be normalized")
    c = c * (2.0 / dmin)
    ratio = (max_center_norm(c) + 1.0) * (1.0 + pad)
    return float(ratio), canonical(c)


def _move_rattlers(
    centers: np.ndarray, container: float, rng: np.random.Generator, gap: float = 0.03
) -> np.ndarray:
    """Teleport circles that touch nothing; they mark wasted space."""
    c = centers.copy()
    n = len(c)
    diff = c[:, None, :] - c[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    nearest = np.sqrt(d2.min(axis=1))
    wall = (container - 1.0) - np.linalg.norm(c, axis=1)
    rattler = (nearest > 2.0 + gap) & (wall > gap)
    idx = np.where(rattler)[0]
    if len(idx) == 0:
        idx = np.array([rng.integers(n)])
    for i in idx:
        c[i] = seed_random(1, container, rng)[0]
    return c


# ---------------------------------------------------------------------------
# Min-ratio search (the solver proper)


def _shrink(
    centers: np.ndarray,
    container: float,
    effort: Effort,
    rng: np.random.Generator,
    min_delta: float = 2e-4,
) -> tuple[np.ndarray, float]:
    """Adaptive container shrink from a feasible state.

    Coarse on purpose: SLSQP finishes the squeeze afterwards.
    """
    c = centers.copy()
    best_c, best_ratio = c.copy(), container
    delta = 0.02
    ratio = container
    while delta > min_delta:
        trial = ratio * (1.0 - delta)
        scaled = c * (trial / ratio)  # keep relative geometry while shrinking
        relaxed, ok = _resolve(
            scaled, trial, 1.0, effort.final_sweeps, rng, kick=0.015, stall_limit=50
        )
        if ok:
            c, ratio = relaxed, trial
            best_c, best_ratio = relaxed.copy(), trial
            delta = min(delta * 1.4, 0.03)
        else:
            delta *= 0.45
    return best_c, best_ratio


def pack_min_ratio(
    n: int,
    seed: int = 0,
    effort: Effort = LIVE_EFFORT,
    warm_starts: list[np.ndarray] | None = None,
) -> tuple[float, np.ndarray]:
    """Best container/circle ratio the solver achieves for ``n`` unit circles.

    Returns a certified ``(ratio, centers)``: the layout is strictly valid.
    ``warm_starts`` may carry promising configurations (e.g. a good layout
    for n-1 plus an inserted circle) that join the start pool.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 1.0, np.zeros((1, 2))
    if n == 2:
        centers = np.array([[-1.0, 0.0], [1.0, 0.0]])
        return normalize_layout(centers)

    rng = np.random.default_rng(seed)
    loose = math.sqrt(n / 0.55) + 1.0

    candidates: list[np.ndarray] = []
    for warm in warm_starts or []:
        if len(warm) == n:
            candidates.append(np.asarray(warm, dtype=float))
    for _ in range(effort.hex_starts):
        candidates.append(seed_hex(n, loose, rng))
    for _ in range(effort.ring_starts):
        candidates.append(seed_rings(n, loose, rng))
    for _ in range(effort.random_starts):
        candidates.append(seed_random(n, loose, rng))

    best_ratio = math.inf
    best_centers: np.ndarray | None = None

    def consider(raw: np.ndarray) -> float:
        nonlocal best_ratio, best_centers
        try:
            ratio, cc = normalize_layout(raw)
        except ValueError:
            return math.inf
        if ratio < best_ratio:
            best_ratio, best_centers = ratio, cc
        return ratio

    polish_cutoff = 1.02 if n > 60 else 1.08
    for cand in candidates:
        start_container = max(loose, max_center_norm(cand) + 1.0)
        settled, ok = _ramp_settle(cand, start_container, effort, rng)
        if not ok:
            continue
        shrunk, ratio = _shrink(settled, start_container, effort, rng)
        if ratio > best_ratio * polish_cutoff:
            consider(shrunk)
            continue  # hopeless basin, skip the polish
        polished, _ = _polish_min_ratio(shrunk, ratio)
        consider(polished)

    # Basin hopping around the incumbent: global jolts, rattler moves, and
    # small polish-level perturbations.
    for round_no in range(effort.hop_rounds):
        if best_centers is None:
            break
        move = round_no % 3
        if move == 0:
            sigma = rng.choice([0.04, 0.1, 0.25])
            trial = best_centers + rng.normal(scale=sigma, size=best_centers.shape)
        elif move == 1:
            trial = _move_rattlers(best_centers, best_ratio, rng)
        else:
            trial = best_centers + rng.normal(scale=0.015, size=best_centers.shape)
            polished, _ = _polish_min_ratio(trial, best_ratio * 1.01)
            consider(polished)
            continue
        settled, ok = _resolve(
            trial, best_ratio * 1.02, 1.0, effort.final_sweeps, rng, kick=0.01
        )
        if not ok:
            continue
        shrunk, ratio = _shrink(settled, best_ratio * 1.02, effort, rng)
        polished, _ = _polish_min_ratio(shrunk, ratio)
        consider(polished)

    if best_centers is None:
        # Fall back to the always-valid ring construction at generous radius.
        fallback = seed_rings(n, loose, rng)
        settled, ok = _resolve(fallback, loose * 1.5, 1.0, 4000, rng)
        if not ok:
            raise RuntimeError(f"packing solver failed to place {n} circles")
        consider(settled)

    floor = PROVEN_RATIOS.get(n)
    if floor is not None and best_ratio < floor - 1e-9:
        raise RuntimeError(
            f"certified ratio {best_ratio} beats the proven optimum {floor} "
            f"for n={n}; certification is broken"
        )
    return best_ratio, best_centers


def fit_in_container(
    n: int,
    container_ratio: float,
    seed: int = 0,
    effort: Effort = LIVE_EFFORT,
) -> np.ndarray | None:
    """Try to place ``n`` unit circles inside ``container_ratio``.

    Returns certified centers or None if the solver cannot do it.
    """
    if n == 1:
        return np.zeros((1, 2)) if container_ratio >= 1.0 else None
    rng = np.random.default_rng(seed)
    attempts: list[np.ndarray] = []
    for _ in range(max(2, effort.hex_starts // 2)):
        attempts.append(seed_hex(n, container_ratio, rng))
    for _ in range(max(2, effort.ring_starts // 2)):
        attempts.append(seed_rings(n, container_ratio, rng))
    for _ in range(max(3, effort.random_starts // 2)):
        attempts.append(seed_random(n, container_ratio, rng))
    best: np.ndarray | None = None
    best_norm = math.inf
    for cand in attempts:
        settled, ok = _ramp_settle(cand, container_ratio, effort, rng)
        if not ok:
            continue
        try:
            ratio, centers = normalize_layout(settled)
        except ValueError:
            continue
        if ratio <= container_ratio * (1.0 + 1e-12):
            norm = max_center_norm(centers)
            if norm < best_norm:
                best, best_norm = centers, norm
    return best


def hex_count_lower_bound(container_ratio: float) -> int:
    """Circles certainly placeable: hex lattice points within the wall."""
    if container_ratio < 1.0:
        return 0
    pts = _hex_points(container_ratio, np.zeros(2), 0.0)
    return int((np.linalg.norm(pts, axis=1) <= container_ratio - 1.0).sum())
