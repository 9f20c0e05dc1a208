"""Numerical H-infinity oracles, independent of the closed-form gain formulas.

Two routes are provided:

* ``hinf_modal`` sweeps the per-mode magnitude functions and refines each
  peak, taking the maximum over modes;
* ``hinf_fullmatrix`` sweeps the largest singular value of the full
  disturbance-to-error transfer matrix of the reduced state-space system.

Both are brute-force frequency searches used to validate the analytic gain
expressions; neither consults them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedGraphError, NumericError
from .gains import Gains, Protocol
from .graphs import Graph
from .spectral import Spectrum, completion_basis, laplacian, mean_projector

# Default sweep densities.  The modal grid is dense enough to bracket
# resonances of relative width ~1e-4; the full-matrix sweep starts coarser
# and recovers accuracy by zooming into every local maximum before the
# golden-section refinement.
MODAL_GRID_POINTS = 100_000
FULL_GRID_POINTS = 2048
FULL_ZOOM_POINTS = 256
REFINE_XTOL = 1e-10
RESIDUAL_TOL = 1e-6

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ModalFunction:
    """Squared magnitude of one modal disturbance-to-error channel."""

    protocol: Protocol
    lambda_i: float
    gains: Gains

    def __post_init__(self):
        if not self.lambda_i > 0.0:
            raise ValueError(f"modal eigenvalue must be positive, got {self.lambda_i}")
        object.__setattr__(self, "protocol", Protocol(self.protocol))


def eval_modal(f: ModalFunction, upsilon):
    """Evaluate the modal magnitude function; accepts scalars or arrays.

    (1 + u^2) / ((alpha*lam - u^2)^2 + (b*u)^2) with b = beta for the
    absolute protocol and b = beta*lam for the relative one.  The value is
    strictly positive and even in u.
    """
    u = np.asarray(upsilon, dtype=float)
    al = f.gains.alpha * f.lambda_i
    b = f.gains.beta if f.protocol is Protocol.ABSOLUTE else f.gains.beta * f.lambda_i
    u2 = u * u
    out = (1.0 + u2) / ((al - u2) ** 2 + (b * b) * u2)
    return float(out) if np.isscalar(upsilon) else out


def sweep_upper_bound(lambda_i: float, gains: Gains) -> float:
    """Frequency sweep cap; modal peaks sit well inside it for any gains."""
    return 10.0 * (1.0 + gains.alpha * lambda_i + gains.beta * (1.0 + lambda_i))


def hybrid_grid(upper: float, count: int) -> np.ndarray:
    """Half linear, half geometric spacing over [0, upper].

    The geometric half resolves narrow low-frequency resonances at any
    scale; the linear half covers the tail uniformly.
    """
    half = count // 2
    lin = np.linspace(0.0, upper, half)
    log = np.geomspace(upper * 1e-9, upper, count - half)
    grid = np.concatenate([lin, log])
    grid.sort()
    return grid


def _quartic_constant(f: ModalFunction) -> float:
    """Constant term of the stationarity quartic u^4 + 2u^2 + c."""
    al = f.gains.alpha * f.lambda_i
    b2 = f.gains.beta**2
    if f.protocol is Protocol.RELATIVE:
        b2 *= f.lambda_i**2
    return b2 - al * al - 2.0 * al


def stationarity_residual(f: ModalFunction, upsilon: float) -> float:
    """Normalized residual of u*(u^4 + 2u^2 + c) = 0 at the candidate peak."""
    c = _quartic_constant(f)
    u = float(upsilon)
    num = abs(u * (u**4 + 2.0 * u * u + c))
    scale = 1.0 + abs(u) ** 5 + 2.0 * abs(u) ** 3 + abs(c * u)
    return num / scale


def _golden_max(func, lo: float, hi: float, xtol: float) -> tuple[float, float]:
    """Golden-section maximization on [lo, hi] to absolute width xtol."""
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = func(c), func(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = func(d)
    x = c if fc > fd else d
    return (x, fc) if fc > fd else (x, fd)


def modal_peak(
    f: ModalFunction,
    *,
    grid_points: int = MODAL_GRID_POINTS,
    xtol: float = REFINE_XTOL,
) -> tuple[float, float]:
    """Supremum of the modal function over frequency: (peak value, peak freq).

    Dense grid scan, golden-section refinement of the best bracket, then a
    Newton polish on the stationarity quartic for interior peaks.  The
    refined frequency must satisfy the quartic residual check, which ties
    the search result back to the calculus without using the closed form.
    """
    upper = sweep_upper_bound(f.lambda_i, f.gains)
    grid = hybrid_grid(upper, grid_points)
    vals = eval_modal(f, grid)
    i = int(vals.argmax())
    candidates: list[tuple[float, float]] = [(float(grid[i]), float(vals[i]))]

    lo = grid[i - 1] if i > 0 else grid[0]
    hi = grid[i + 1] if i + 1 < len(grid) else grid[-1]
    x, fx = _golden_max(lambda u: eval_modal(f, u), lo, hi, xtol)
    candidates.append((float(x), float(fx)))

    if i > 0:
        y = _newton_on_quartic(f, x, upper)
        if y is not None:
            candidates.append((y, eval_modal(f, y)))

    best_x, best_val = max(candidates, key=lambda t: t[1])
    res = stationarity_residual(f, best_x)
    if res > RESIDUAL_TOL:
        raise NumericError(
            f"peak refinement failed the stationarity check: residual={res:.3e} "
            f"at u={best_x!r} (lam={f.lambda_i}, {f.protocol.value}, {f.gains})"
        )
    return best_val, best_x


def _newton_on_quartic(f: ModalFunction, x0: float, upper: float) -> float | None:
    """Polish an interior peak toward the positive root of u^4 + 2u^2 + c."""
    c = _quartic_constant(f)
    y = float(x0)
    for _ in range(16):
        fy = y**4 + 2.0 * y * y + c
        dfy = 4.0 * y**3 + 4.0 * y
        if dfy == 0.0 or not np.isfinite(dfy):
            return None
        step = fy / dfy
        y -= step
        if not (0.0 < y <= upper) or not np.isfinite(y):
            return None
        if abs(step) <= 1e-16 * max(1.0, abs(y)):
            break
    return y


def _unique_modes(gamma: np.ndarray) -> list[float]:
    """Collapse numerically repeated eigenvalues; their modal functions coincide."""
    out: list[float] = []
    for lam in np.sort(np.asarray(gamma, dtype=float)):
        if not out or lam - out[-1] > 1e-12 * max(1.0, lam):
            out.append(float(lam))
    return out


def hinf_modal(
    spec: Spectrum,
    protocol: Protocol,
    gains: Gains,
    *,
    grid_points: int = MODAL_GRID_POINTS,
) -> float:
    """Max over modes of the square root of each modal peak."""
    if not spec.connected:
        raise DisconnectedGraphError("modal oracle requires a connected graph")
    best = 0.0
    for lam in _unique_modes(spec.gamma):
        peak, _ = modal_peak(
            ModalFunction(protocol, lam, gains), grid_points=grid_points
        )
        best = max(best, peak)
    return float(np.sqrt(best))


@dataclass(frozen=True)
class StateSpace:
    """Closed-loop system matrices for state [x; v], disturbance input omega.

    The output projects positions and velocities onto their mean-deviation
    components.  For a connected graph the mean pair is an unobservable
    marginal subsystem; every other eigenvalue of A has negative real part.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    protocol: Protocol
    gains: Gains


def build_state_space(g: Graph, protocol: Protocol, gains: Gains) -> StateSpace:
    protocol = Protocol(protocol)
    n = g.n
    lap = laplacian(g)
    damping = -gains.beta * (np.eye(n) if protocol is Protocol.ABSOLUTE else lap)
    a = np.block(
        [
            [np.zeros((n, n)), np.eye(n)],
            [-gains.alpha * lap, damping],
        ]
    )
    b = np.vstack([np.zeros((n, n)), np.eye(n)])
    phi = mean_projector(n)
    c = np.block(
        [
            [phi, np.zeros((n, n))],
            [np.zeros((n, n)), phi],
        ]
    )
    return StateSpace(A=a, B=b, C=c, protocol=protocol, gains=gains)


def reduced_system(ss: StateSpace) -> tuple[np.ndarray, np.ndarray]:
    """Drop the unobservable mean pair via the orthogonal completion basis.

    Returns (A_red, B_red) of the observable subsystem, whose output matrix
    is the identity.  Raises if the rotated system fails to decouple, which
    indicates an input matrix that is not a valid closed loop.
    """
    n = ss.A.shape[0] // 2
    q = completion_basis(n)
    t = np.block(
        [
            [q.T, np.zeros((n, n))],
            [np.zeros((n, n)), q.T],
        ]
    )
    a_hat = t @ ss.A @ t.T
    b_hat = t @ ss.B
    keep = np.r_[0 : n - 1, n : 2 * n - 1]
    drop = np.r_[n - 1, 2 * n - 1]
    coupling = np.abs(a_hat[np.ix_(keep, drop)]).max()
    scale = max(1.0, np.abs(ss.A).max())
    if coupling > 1e-9 * scale:
        raise NumericError(
            f"reduced system did not decouple: residual coupling {coupling:.3e}"
        )
    return a_hat[np.ix_(keep, keep)], b_hat[keep, :]


def _sigma_sweep(
    a_red: np.ndarray, b_red: np.ndarray, freqs: np.ndarray, chunk: int = 1024
) -> np.ndarray:
    """sigma_max(C (juI - A)^-1 B) over a batch of frequencies."""
    dim = a_red.shape[0]
    eye = np.eye(dim)
    out = np.empty(len(freqs))
    for s in range(0, len(freqs), chunk):
        u = freqs[s : s + chunk]
        resolvent = (1j * u)[:, None, None] * eye - a_red
        x = np.linalg.solve(resolvent, np.broadcast_to(b_red, (len(u), *b_red.shape)))
        out[s : s + chunk] = np.linalg.svd(x, compute_uv=False)[:, 0]
    return out


def _sigma_at(a_red: np.ndarray, b_red: np.ndarray, u: float) -> float:
    x = np.linalg.solve(1j * u * np.eye(a_red.shape[0]) - a_red, b_red)
    return float(np.linalg.svd(x, compute_uv=False)[0])


def hinf_fullmatrix(
    ss: StateSpace,
    *,
    grid_points: int = FULL_GRID_POINTS,
    zoom_points: int = FULL_ZOOM_POINTS,
    xtol: float = REFINE_XTOL,
) -> float:
    """Peak singular value of the reduced transfer matrix over frequency.

    The marginal mean pair is removed before inversion, so the resolvent is
    well defined at u = 0.  Every local maximum of the coarse sweep is
    zoomed with a dense local grid, and brackets within 0.1% of the best
    are golden-section refined; the maximum over all candidates is returned.
    """
    a_red, b_red = reduced_system(ss)
    poles = np.linalg.eigvals(a_red)
    if poles.real.max() >= 0.0:
        raise DisconnectedGraphError(
            "reduced system is not asymptotically stable; graph must be connected"
        )
    if ss.protocol is Protocol.ABSOLUTE:
        lbar1 = -a_red[a_red.shape[0] // 2 :, : a_red.shape[0] // 2] / ss.gains.alpha
    else:
        lbar1 = -a_red[a_red.shape[0] // 2 :, a_red.shape[0] // 2 :] / ss.gains.beta
    lam_top = float(np.linalg.norm(lbar1, 2))
    upper = sweep_upper_bound(lam_top, ss.gains)

    grid = hybrid_grid(upper, grid_points)
    vals = _sigma_sweep(a_red, b_red, grid)

    cand = [0, len(grid) - 1]
    interior = np.nonzero(
        (vals[1:-1] > vals[:-2]) & (vals[1:-1] >= vals[2:])
    )[0]
    cand.extend(int(i) + 1 for i in interior)
    if len(cand) > 64:
        cand = sorted(cand, key=lambda i: -vals[i])[:64]

    windows = []
    zoom_freqs = []
    for i in cand:
        lo = grid[max(i - 2, 0)]
        hi = grid[min(i + 2, len(grid) - 1)]
        pts = np.linspace(lo, hi, zoom_points)
        windows.append((len(zoom_freqs) and sum(len(w) for w in zoom_freqs), pts))
        zoom_freqs.append(pts)
    flat = np.concatenate(zoom_freqs)
    flat_vals = _sigma_sweep(a_red, b_red, flat)

    best = float(vals.max())
    brackets: list[tuple[float, float, float]] = []
    offset = 0
    for pts in zoom_freqs:
        seg = flat_vals[offset : offset + len(pts)]
        offset += len(pts)
        j = int(seg.argmax())
        best = max(best, float(seg[j]))
        lo = pts[j - 1] if j > 0 else pts[0]
        hi = pts[j + 1] if j + 1 < len(pts) else pts[-1]
        brackets.append((float(seg[j]), float(lo), float(hi)))

    for peak, lo, hi in brackets:
        if peak < best * (1.0 - 1e-3):
            continue
        _, refined = _golden_max(lambda u: _sigma_at(a_red, b_red, u), lo, hi, xtol)
        best = max(best, refined)
    return best
