"""Adaptive Dormand-Prince 5(4) integration with dense output and apsis events."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .core import EquationSpec, PseudoState, TrueState
from .dynamics import VectorField, pseudo_vector_field, true_vector_field
from .errors import DomainError, InsufficientEvents, SingularityApproach, StepLimitExceeded


class Frame(enum.Enum):
    TRUE = "true"
    PSEUDO = "pseudo"


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 2_000_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            tol = getattr(self, name)
            if not 0.0 < tol <= 1e-2:
                raise ValueError(f"{name} must lie in (0, 1e-2], got {tol!r}")
        if not self.max_step > 0.0:
            raise ValueError("max_step must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


# Dormand & Prince (1980), with the continuous extension from Hairer, Norsett & Wanner.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = np.array((71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40))
_D = np.array(
    (
        -12715105075 / 11282082432,
        0.0,
        87487479700 / 32700410799,
        -10690763975 / 1880347072,
        701980252875 / 199316789632,
        -1453857185 / 822651844,
        69997945 / 29380423,
    )
)


class Trajectory:
    """Ordered samples ``(clock, y)`` with a piecewise polynomial interpolant.

    ``y`` columns are ``(x, y, vx, vy, companion_clock)``. Each step stores
    five coefficient rows ``c1..c5`` and the state at fraction ``th`` of the
    step is ``c1 + th*(c2 + (1-th)*(c3 + th*(c4 + (1-th)*c5)))``. With
    ``c5 = 0`` this is plain cubic Hermite interpolation, which is what
    :meth:`from_hermite` builds.
    """

    def __init__(self, spec: EquationSpec, frame: Frame, clocks, ys, coeffs):
        self.spec = spec
        self.frame = frame
        self.clocks = np.asarray(clocks, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.clocks.ndim != 1 or len(self.clocks) < 1:
            raise ValueError("trajectory needs at least one sample")
        if np.any(np.diff(self.clocks) <= 0.0):
            raise ValueError("trajectory clocks must be strictly increasing")

    @classmethod
    def from_hermite(cls, spec, frame, clocks, ys, dys) -> "Trajectory":
        clocks = np.asarray(clocks, dtype=float)
        ys = np.asarray(ys, dtype=float)
        dys = np.asarray(dys, dtype=float)
        h = np.diff(clocks)[:, None]
        c1 = ys[:-1]
        c2 = ys[1:] - ys[:-1]
        c3 = h * dys[:-1] - c2
        c4 = c2 - h * dys[1:] - c3
        coeffs = np.stack((c1, c2, c3, c4, np.zeros_like(c1)), axis=1)
        return cls(spec, frame, clocks, ys, coeffs)

    def __len__(self) -> int:
        return len(self.clocks)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.clocks[0]), float(self.clocks[-1])

    @property
    def z(self) -> np.ndarray:
        return self.ys[:, 0] + 1j * self.ys[:, 1]

    @property
    def v(self) -> np.ndarray:
        return self.ys[:, 2] + 1j * self.ys[:, 3]

    @property
    def r(self) -> np.ndarray:
        return np.hypot(self.ys[:, 0], self.ys[:, 1])

    @property
    def t(self) -> np.ndarray:
        return self.clocks if self.frame is Frame.TRUE else self.ys[:, 4]

    @property
    def s(self) -> np.ndarray:
        return self.ys[:, 4] if self.frame is Frame.TRUE else self.clocks

    def _make_state(self, clock: float, y: Sequence[float]):
        z = complex(y[0], y[1])
        v = complex(y[2], y[3])
        if self.frame is Frame.TRUE:
            return TrueState(t=float(clock), z=z, v=v, s=float(y[4]))
        return PseudoState(s=float(clock), z=z, v=v, t=float(y[4]))

    def state(self, i: int):
        return self._make_state(self.clocks[i], self.ys[i])

    def states(self) -> list:
        return [self.state(i) for i in range(len(self))]

    def __call__(self, clock) -> np.ndarray:
        """Interpolated ``y`` at one clock value (shape (5,)) or an array of them (shape (n, 5))."""
        scalar = np.ndim(clock) == 0
        c = np.atleast_1d(np.asarray(clock, dtype=float))
        lo, hi = self.clocks[0], self.clocks[-1]
        if np.any(c < lo - 1e-12 * max(1.0, abs(lo))) or np.any(c > hi + 1e-12 * max(1.0, abs(hi))):
            raise DomainError("clock outside the integrated span")
        if len(self.clocks) == 1:
            out = np.repeat(self.ys[:1], len(c), axis=0)
            return out[0] if scalar else out
        idx = np.clip(np.searchsorted(self.clocks, c, side="right") - 1, 0, len(self.clocks) - 2)
        h = self.clocks[idx + 1] - self.clocks[idx]
        th = ((c - self.clocks[idx]) / h)[:, None]
        k = self.coeffs[idx]
        out = k[:, 0] + th * (k[:, 1] + (1 - th) * (k[:, 2] + th * (k[:, 3] + (1 - th) * k[:, 4])))
        # exact reproduction of stored samples
        exact = c == self.clocks[idx + 1]
        out[exact] = self.ys[idx[exact] + 1]
        exact = c == self.clocks[idx]
        out[exact] = self.ys[idx[exact]]
        return out[0] if scalar else out

    def state_at(self, clock: float):
        return self._make_state(clock, self(clock))


# -- integration ---------------------------------------------------------------


def _rms(x: np.ndarray) -> float:
    return math.sqrt(float(np.dot(x, x)) / len(x))


def _initial_step(f, t0, y0, f0, direction_span, cfg):
    sk = cfg.abs_tol + cfg.rel_tol * np.abs(y0)
    d0 = _rms(y0 / sk)
    d1 = _rms(f0 / sk)
    h0 = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
    h0 = min(h0, direction_span)
    f1 = f(t0 + h0, y0 + h0 * f0)
    d2 = _rms((f1 - f0) / sk) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, cfg.max_step, direction_span)


def _angular_momentum(z: complex, v: complex) -> float:
    return (z.conjugate() * v).imag


def integrate(
    spec: EquationSpec,
    init: Union[TrueState, PseudoState],
    clock_span: tuple[float, float],
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Integrate the true motion (``TrueState`` init) or the pseudomotion (``PseudoState`` init).

    The clock starts at ``clock_span[0]`` regardless of the clock stored in
    ``init``; the companion clock starts from the value stored in ``init``.
    """
    t0, t1 = map(float, clock_span)
    if not t1 > t0:
        raise ValueError("clock_span must be increasing")
    if isinstance(init, TrueState):
        frame, f, companion = Frame.TRUE, true_vector_field(spec), init.s
    elif isinstance(init, PseudoState):
        frame, f, companion = Frame.PSEUDO, pseudo_vector_field(spec), init.t
    else:
        raise TypeError("init must be a TrueState or a PseudoState")
    z, v = complex(init.z), complex(init.v)
    if not abs(z) > 0.0:
        raise DomainError("initial position must satisfy r > 0")
    if spec.singular_at_origin and abs(_angular_momentum(z, v)) <= 1e-14 * abs(z) * abs(v):
        raise DomainError("zero angular momentum: orbit falls into the singularity at r = 0")
    y0 = np.array((z.real, z.imag, v.real, v.imag, float(companion)))
    clocks, ys, coeffs = _dopri5(f, t0, y0, t1, cfg)
    return Trajectory(spec, frame, clocks, ys, coeffs)


def _dopri5(f: VectorField, t0: float, y0: np.ndarray, t_end: float, cfg: IntegratorConfig):
    span = t_end - t0
    rtol, atol = cfg.rel_tol, cfg.abs_tol
    beta = 0.04
    expo = 0.2 - 0.75 * beta
    safe = 0.9
    t, y = t0, y0.copy()
    k1 = f(t, y)
    h = _initial_step(f, t, y, k1, span, cfg)
    facold = 1e-4
    rejected = False
    clocks, ys, coeffs = [t], [y.copy()], []
    n_steps = 0
    a2, a3, a4, a5, a6, a7 = _A[1:]
    while t < t_end:
        n_steps += 1
        if n_steps > cfg.max_steps:
            raise StepLimitExceeded(f"more than {cfg.max_steps} steps before reaching clock {t_end}")
        if h < 1e-14 * span:
            raise SingularityApproach(f"step size collapsed to {h:.3e} at clock {t:.17g}")
        last = t + 1.01 * h >= t_end
        if last:
            h = t_end - t
        k2 = f(t + _C[1] * h, y + h * (a2[0] * k1))
        k3 = f(t + _C[2] * h, y + h * (a3[0] * k1 + a3[1] * k2))
        k4 = f(t + _C[3] * h, y + h * (a4[0] * k1 + a4[1] * k2 + a4[2] * k3))
        k5 = f(t + _C[4] * h, y + h * (a5[0] * k1 + a5[1] * k2 + a5[2] * k3 + a5[3] * k4))
        k6 = f(t + h, y + h * (a6[0] * k1 + a6[1] * k2 + a6[2] * k3 + a6[3] * k4 + a6[4] * k5))
        y_new = y + h * (a7[0] * k1 + a7[2] * k3 + a7[3] * k4 + a7[4] * k5 + a7[5] * k6)
        k7 = f(t + h, y_new)
        ks = np.stack((k1, k2, k3, k4, k5, k6, k7))
        err_vec = h * (_E @ ks)
        sk = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = _rms(err_vec / sk)
        if not math.isfinite(err):
            raise SingularityApproach(f"non-finite error estimate at clock {t:.17g}")
        fac11 = err**expo if err > 0.0 else 0.0
        if err <= 1.0:
            facold_b = facold**beta
            fac = fac11 / facold_b / safe if fac11 > 0.0 else 0.1
            fac = min(5.0, max(0.1, fac))
            h_new = h / fac
            if rejected:
                h_new = min(h_new, h)
            rejected = False
            facold = max(err, 1e-4)
            dy = y_new - y
            c3 = h * k1 - dy
            c4 = dy - h * k7 - c3
            c5 = h * (_D @ ks)
            coeffs.append(np.stack((y, dy, c3, c4, c5)))
            t = t_end if last else t + h
            y = y_new
            k1 = k7
            clocks.append(t)
            ys.append(y.copy())
            h = min(h_new, cfg.max_step)
        else:
            rejected = True
            h = h / min(5.0, fac11 / safe)
    return np.array(clocks), np.array(ys), np.array(coeffs).reshape(len(coeffs), 5, len(y0))


# -- events --------------------------------------------------------------------


class ApsisKind(enum.Enum):
    PERICENTER = "pericenter"
    APOCENTER = "apocenter"


@dataclass(frozen=True)
class ApsisEvent:
    clock: float
    r: float
    kind: ApsisKind


def _radial_rate(y: np.ndarray) -> np.ndarray:
    return y[..., 0] * y[..., 2] + y[..., 1] * y[..., 3]


def _bisect_event(traj: Trajectory, lo: float, hi: float, g_lo: float) -> float:
    for _ in range(80):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        g_mid = _radial_rate(traj(mid))
        if g_mid == 0.0:
            return mid
        if (g_mid > 0.0) == (g_lo > 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def detect_apsides(traj: Trajectory) -> list[ApsisEvent]:
    """Zeros of d(r^2)/dclock = 2 Re(conj(z) v), located by bisection on the interpolant.

    A sign change from negative to positive is a pericenter. Samples whose
    radial rate is below a relative noise floor are treated as undecided so
    that circular orbits produce no spurious events.
    """
    if len(traj) < 2:
        return []
    r = traj.r
    if np.max(r) - np.min(r) <= 1e-7 * np.mean(r):
        return []
    g = _radial_rate(traj.ys)
    floor = 1e-9 * float(np.max(r * np.abs(traj.v)))
    sign = np.where(np.abs(g) > floor, np.sign(g), 0.0)
    events = []
    prev = None
    for i, sgn in enumerate(sign):
        if sgn == 0.0:
            continue
        if prev is not None and sign[prev] != sgn:
            clock = _bisect_event(traj, traj.clocks[prev], traj.clocks[i], g[prev])
            kind = ApsisKind.PERICENTER if sgn > 0 else ApsisKind.APOCENTER
            y = traj(clock)
            events.append(ApsisEvent(clock=float(clock), r=float(math.hypot(y[0], y[1])), kind=kind))
        prev = i
    return events


def pericenters(traj: Trajectory) -> list[ApsisEvent]:
    return [e for e in detect_apsides(traj) if e.kind is ApsisKind.PERICENTER]


def measure_radial_period(traj: Trajectory) -> float:
    """Mean pericenter-to-pericenter gap, in the trajectory's own clock."""
    peri = pericenters(traj)
    if len(peri) < 3:
        raise InsufficientEvents(f"need at least 3 pericenters, found {len(peri)}")
    return (peri[-1].clock - peri[0].clock) / (len(peri) - 1)


@dataclass(frozen=True)
class ClosureReport:
    closed: bool
    mismatch: float


def check_closure(traj: Trajectory, n_radial_periods: int, tol: float) -> ClosureReport:
    """Compare phase-space states ``n_radial_periods`` pericenters apart.

    The mismatch ``(|dz| + |dv|) / (|z| + |v|)`` is the worst value over all
    available windows. One revolution is two radial periods for a centred
    (H type) ellipse and one for a focal (K type) ellipse.
    """
    peri = pericenters(traj)
    n = int(n_radial_periods)
    if n < 1:
        raise ValueError("n_radial_periods must be positive")
    if len(peri) < n + 1:
        raise InsufficientEvents(f"need {n + 1} pericenters, found {len(peri)}")
    worst = 0.0
    for first, second in zip(peri, peri[n:]):
        a, b = traj(first.clock), traj(second.clock)
        za, va = complex(a[0], a[1]), complex(a[2], a[3])
        zb, vb = complex(b[0], b[1]), complex(b[2], b[3])
        worst = max(worst, (abs(zb - za) + abs(vb - va)) / (abs(za) + abs(va)))
    return ClosureReport(closed=worst < tol, mismatch=worst)
