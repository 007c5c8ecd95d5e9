"""The oscillatory transforms of the moment computation.

Notation (all weights smooth and compactly supported):
  B(q, zeta)          = zeta N / (q Q M1), the linear frequency shared by the two inner integrals
  I^{+-}(x, q, zeta)  = x^{1/2} int V(y) e(By) J_g^{+-}(4 pi sqrt(xy)) dy                  (x <= threshold)
                      = x^{1/4} int y^{-1/4} V(y) e(By +- 2 sqrt(xy)) dy                  (x > threshold)
  W_dag(A, s)         = int W(v) v^{s-1} e(-Av) dv
  J^{+-}(x, q, zeta)  = (2 pi)^{-1} int (Nx)^{-i tau} gamma_{+-}(-1/2 + i tau) W_dag(B, 1/2 - i tau) d tau
  R(y1, y2, q)        = int omega(q, zeta) I(y1, q, zeta) J(y2, q, zeta) d zeta
  H(X)                = int phi(xi) R(Y, L xi/(q^3 M1^3 r), q) conj(R(Y', ...)) e(-X xi) d xi / xi

R has two routes.  The direct one nests the quadratures above.  The collapsed one
uses that the zeta-dependence of the integrand is omega(q, zeta) e(zeta Q (v1 - v2)/q),
whose integral is (q/Q) c_Q h(q/Q, v1 - v2) U0(v1 - v2) by Fourier inversion of the
DFI weight; what remains is one Mellin transform in v2 and one tau-integral.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import loggamma

from .bessel import SpectralParams, bessel_kernel
from .delta import DFIWeight, DeltaParams, telescoped_h
from .errors import OutOfRange, PoleProximity, QuadratureNonConvergence, TruncationBudgetExceeded
from .quadrature import QuadResult, adaptive, gauss_panels
from .weights import SmoothWeight, bump, plateau

TWO_PI = 2 * math.pi


def default_V() -> SmoothWeight:
    return bump(1.0, 2.0)


def default_W() -> SmoothWeight:
    return bump(0.5, 2.5)


def default_xi_weight() -> SmoothWeight:
    """Supported on [2/3, 3] and equal to 1 on [1, 2]."""
    return plateau(2 / 3, 3.0, 1 / 3, ramp_hi=1.0)


@dataclass(frozen=True)
class OscParams:
    N: float
    M1: int
    M2: int
    C: float = 4.0
    r: int = 1
    L: float | None = None
    tol: float = 1e-8
    Q: float | None = None
    V: SmoothWeight = field(default_factory=default_V)
    W: SmoothWeight = field(default_factory=default_W)
    large_threshold: float = 1.0

    def __post_init__(self) -> None:
        q_val = math.sqrt(self.N / self.M1) if self.Q is None else float(self.Q)
        if abs(q_val * q_val * self.M1 - self.N) > 1e-12 * self.N:
            raise ValueError("Q^2 M1 must equal N")
        object.__setattr__(self, "Q", q_val)
        if not 0 < self.tol <= 1e-4:
            raise ValueError("tolerance must lie in (0, 1e-4]")

    @property
    def M(self) -> int:
        return self.M1 * self.M2

    def B(self, q: float, zeta: float) -> float:
        return zeta * self.N / (q * self.Q * self.M1)

    def describe(self) -> dict:
        return {"N": self.N, "M1": self.M1, "M2": self.M2, "Q": self.Q, "C": self.C,
                "r": self.r, "L": self.L, "tol": self.tol}


def toy_params(**overrides) -> OscParams:
    """N = 10^4, M1 = 10, C = 4 (so Q/C is about 7.9)."""
    base = dict(N=1e4, M1=10, M2=3, C=4.0)
    base.update(overrides)
    return OscParams(**base)


# --- gamma factor ---------------------------------------------------------------

def gamma_pm(sign: int, s, mus=(0.0, 0.0, 0.0), pole_tol: float = 1e-6):
    """gamma_{+-}(s) = (2 pi^{3(s+1/2)})^{-1} (prod G((1+s+mu)/2)/G((-s-mu)/2)
                                              -+ i prod G((2+s+mu)/2)/G((1-s-mu)/2)).

    The two products are nearly equal away from the real axis, so the difference is
    not formed directly.  Reflection turns each into prod G((1+s_j)/2) G(1+s_j/2)/pi
    times prod(-sin t_j) or prod(cos t_j), t_j = pi s_j/2, and expanding in e^{+-i t_j}
    leaves (-i/4) sum over odd sign patterns (for +) or (i/4) sum over even ones (for -)
    of exp(i sum_j e_j t_j), with e_j = +1 counted as odd.  Everything stays in logs.
    """
    s = np.asarray(s, dtype=complex)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    log_g = np.zeros(s.shape, dtype=complex)
    thetas = []
    for mu in mus:
        sj = s + mu
        for arg in ((1 + sj) / 2, (2 + sj) / 2):
            if np.any(_nonpositive_integer_distance(arg) < pole_tol):
                raise PoleProximity(f"s within {pole_tol} of a pole (mu = {mu})")
            log_g += loggamma(arg)
        thetas.append(math.pi * sj / 2)
    parity = 1 if sign > 0 else 0
    logs = [1j * sum(e * t for e, t in zip(pattern, thetas))
            for pattern in itertools.product((1, -1), repeat=len(thetas))
            if pattern.count(1) % 2 == parity]
    logs = np.array(logs)
    top = np.max(logs.real, axis=0)
    total = np.sum(np.exp(logs - top), axis=0)
    coeff = -0.25j if sign > 0 else 0.25j
    log_den = math.log(2) + (3 * (s + 0.5) + len(thetas)) * math.log(math.pi)
    out = coeff * total * np.exp(log_g + top - log_den)
    return complex(out[0]) if scalar else out


def _nonpositive_integer_distance(z: np.ndarray) -> np.ndarray:
    n = np.minimum(np.round(z.real), 0)
    return np.abs(z - n)


# --- W dagger -------------------------------------------------------------------

def _w_panels(W: SmoothWeight, A: float, tau_max: float, nodes_per_cycle: float = 10.0):
    lo, hi = W.support
    cycles = abs(A) * (hi - lo) + abs(tau_max) / TWO_PI * math.log(hi / lo)
    return max(8, int(math.ceil(cycles * nodes_per_cycle / 20)) + 4)


def w_dagger(A: float, s: complex, W: SmoothWeight | None = None, rtol: float = 1e-10,
             atol: float = 1e-15) -> QuadResult:
    """int W(v) v^{s-1} e(-Av) dv."""
    W = default_W() if W is None else W
    lo, hi = W.support
    if lo <= 0:
        raise ValueError("W must be supported in the positive reals")
    s = complex(s)
    start = _w_panels(W, A, s.imag)
    return adaptive(lambda v: W(v) * v ** (s - 1) * np.exp(-2j * math.pi * A * v), lo, hi, rtol, atol,
                    panels=start)


def w_dagger_tau(A: float, taus: np.ndarray, W: SmoothWeight | None = None, resolution: float = 1.0) -> np.ndarray:
    """W_dag(A, 1/2 - i tau) for many tau at a fixed resolution."""
    W = default_W() if W is None else W
    lo, hi = W.support
    taus = np.asarray(taus, dtype=float)
    panels = int(_w_panels(W, A, np.max(np.abs(taus)) if taus.size else 0.0) * resolution)
    v, w = gauss_panels(lo, hi, panels, 20)
    amp = W(v) * v ** -0.5 * np.exp(-2j * math.pi * A * v) * w
    out = np.empty(taus.shape, dtype=complex)
    logv = np.log(v)
    for i in range(0, taus.size, 2048):
        out.ravel()[i:i + 2048] = np.exp(-1j * np.outer(taus.ravel()[i:i + 2048], logv)) @ amp
    return out


def w_dagger_window(A: float, W: SmoothWeight | None = None) -> tuple[float, float]:
    """tau-interval holding the stationary point tau = -2 pi A v of W_dag for v in supp W."""
    W = default_W() if W is None else W
    lo, hi = W.support
    ends = sorted((-TWO_PI * A * lo, -TWO_PI * A * hi))
    return ends[0], ends[1]


def w_dagger_localization(A: float, W: SmoothWeight | None = None, margin: float = 50.0) -> dict:
    """Where |W_dag(A, 1/2 - i tau)| lives on the tau-line.

    mass_in_window: share of sum |W_dag|^2 inside the stationary window;
    off_window_ratio: max |W_dag| farther than `margin` from the window, over the peak;
    bound_constant: sup |W_dag| (1 + |tau|)^{1/2}.
    """
    W = default_W() if W is None else W
    taus, vals = w_dagger_spectrum(A, W, 10 * math.pi * abs(A) + 2000.0)
    mag = np.abs(vals)
    lo, hi = w_dagger_window(A, W)
    inside = (taus >= lo) & (taus <= hi)
    outside = (taus < lo - margin) | (taus > hi + margin)
    peak = float(mag.max())
    return {
        "window_lo": lo,
        "window_hi": hi,
        "peak_tau": float(taus[np.argmax(mag)]),
        "mass_in_window": float(np.sum(mag[inside] ** 2) / np.sum(mag ** 2)),
        "off_window_ratio": float(mag[outside].max() / peak),
        "bound_constant": float(np.max(mag * np.sqrt(1 + np.abs(taus)))),
    }


# --- stationary phase model -----------------------------------------------------

def stationary_phase_psi0(x: float, params: OscParams, zeta: float, q: float, sign: int,
                          window: float = 16.0, rtol: float = 1e-10) -> tuple[QuadResult, bool]:
    """x^{-1/4} int y^{-1/4} V(y) e(By + sign 2 sqrt(xy)) dy, and whether a stationary point is predicted
    (sign B < 0 and x within a factor `window` of B^2)."""
    if x <= 0 or zeta == 0:
        raise ValueError("need x > 0 and zeta != 0")
    B = params.B(q, zeta)
    V = params.V
    lo, hi = V.support
    cycles = abs(B) * (hi - lo) + 2 * math.sqrt(x) * (math.sqrt(hi) - math.sqrt(lo))
    res = adaptive(lambda y: y ** -0.25 * V(y) * np.exp(2j * math.pi * (B * y + sign * 2 * np.sqrt(x * y))),
                   lo, hi, rtol, 1e-16, panels=max(4, int(cycles / 2) + 2))
    scale = x ** -0.25
    res = QuadResult(res.value * scale, res.error * scale, res.nodes)
    predicted = sign * B < 0 and 1 / window <= x / B ** 2 <= window
    return res, predicted


# --- I, J and R -------------------------------------------------------------------

def frak_I(sign: int, x: float, q: float, zeta: float, params: OscParams,
           sp: SpectralParams | None = None, regime: str | None = None, rtol: float = 1e-10) -> QuadResult:
    sp = SpectralParams.holomorphic(12) if sp is None else sp
    regime = regime or ("small" if x <= params.large_threshold else "large")
    B = params.B(q, zeta)
    V = params.V
    lo, hi = V.support
    cycles = abs(B) * (hi - lo) + 2 * math.sqrt(x) * (math.sqrt(hi) - math.sqrt(lo))
    panels = max(4, int(cycles / 2) + 2)
    if regime == "small":
        f = lambda y: V(y) * np.exp(2j * math.pi * B * y) * bessel_kernel(sign, 4 * math.pi * np.sqrt(x * y), sp)
        res = adaptive(f, lo, hi, rtol, 1e-16, panels=panels)
        scale = math.sqrt(x)
    else:
        f = lambda y: y ** -0.25 * V(y) * np.exp(2j * math.pi * (B * y + sign * 2 * np.sqrt(x * y)))
        res = adaptive(f, lo, hi, rtol, 1e-16, panels=panels)
        scale = x ** 0.25
    return QuadResult(res.value * scale, res.error * scale, res.nodes)


def _u_spectrum(g, u_lo: float, u_hi: float, rate: float, tau_step: float, oversample: float = 1.0):
    """tau -> int g(u) e^{-i tau u} du on the grid tau_j = j tau_step, |tau| < pi/du, by one FFT.

    `rate` bounds the local angular frequency of g; du is chosen so that pi/du exceeds it twice over.
    The trapezoid rule is spectrally accurate here because g is smooth and vanishes at both ends.
    """
    period = TWO_PI / tau_step
    du = math.pi / (2.0 * rate * oversample)
    n = 1 << max(8, int(math.ceil(math.log2(period / du))))
    du = period / n
    u = u_lo + du * np.arange(n)
    vals = np.zeros(n, dtype=complex)
    inside = u <= u_hi
    vals[inside] = g(u[inside])
    spec = np.fft.fft(vals) * du
    j = np.fft.fftfreq(n, 1.0 / n)
    taus = j * tau_step
    spec = spec * np.exp(-1j * taus * u_lo)
    order = np.argsort(taus)
    return taus[order], spec[order]


def w_dagger_spectrum(A: float, W: SmoothWeight | None = None, tau_max: float | None = None,
                      tau_step: float = 0.05, oversample: float = 1.0):
    """(taus, W_dag(A, 1/2 - i tau)) on a uniform tau grid reaching at least tau_max."""
    W = default_W() if W is None else W
    lo, hi = W.support
    if tau_max is None:
        tau_max = 10 * math.pi * abs(A) + 2000.0
    rate = tau_max + TWO_PI * abs(A) * hi

    def g(u):
        v = np.exp(u)
        return W(v) * np.exp(0.5 * u) * np.exp(-2j * math.pi * A * v)

    return _u_spectrum(g, math.log(lo), math.log(hi), rate, tau_step, oversample)


def _truncated_sum(values: np.ndarray, trunc: float) -> tuple[complex, slice]:
    mag = np.abs(values)
    peak = mag.max()
    big = np.nonzero(mag >= trunc * peak)[0]
    first, last = int(big[0]), int(big[-1])
    if first == 0 or last == values.size - 1:
        raise TruncationBudgetExceeded("integrand still above the truncation level at the grid edge")
    return complex(np.sum(values[first:last + 1])), slice(first, last + 1)


def frak_J_value(sign: int, x: float, q: float, zeta: float, params: OscParams, mus=(0.0, 0.0, 0.0),
                 trunc: float = 1e-12, resolution: float = 1.0) -> complex:
    A = params.B(q, zeta)
    tau_max = 10 * math.pi * abs(A) + 600.0
    for _ in range(5):
        taus, wd = w_dagger_spectrum(A, params.W, tau_max, 0.05 / resolution, resolution)
        keep = np.abs(wd) >= max(1e-3 * trunc, 1e-15) * np.abs(wd).max()
        vals = np.zeros(taus.shape, dtype=complex)
        tk = taus[keep]
        vals[keep] = np.exp(-1j * tk * math.log(params.N * x)) * gamma_pm(sign, -0.5 + 1j * tk, mus) * wd[keep]
        try:
            total, _ = _truncated_sum(vals, trunc)
        except TruncationBudgetExceeded:
            tau_max *= 2
            continue
        return total * (taus[1] - taus[0]) / TWO_PI
    raise TruncationBudgetExceeded("J integrand did not decay within the tau budget")


def frak_J(sign: int, x: float, q: float, zeta: float, params: OscParams, mus=(0.0, 0.0, 0.0),
           trunc: float = 1e-12, resolution: float = 1.0) -> QuadResult:
    """J^{sign}(x, q, zeta) with an error estimate from one doubling of every resolution."""
    a = frak_J_value(sign, x, q, zeta, params, mus, trunc, resolution)
    b = frak_J_value(sign, x, q, zeta, params, mus, trunc, 2 * resolution)
    return QuadResult(b, abs(a - b), 0)


def resonant_x(params: OscParams, q: float, zeta: float, v: float = 1.0) -> float:
    """x at which the tau-phase of J is stationary inside the W_dag window: N x = 8 (B v)^3 / v."""
    A = params.B(q, zeta)
    return 8 * abs(A) ** 3 * v ** 2 / params.N


@dataclass
class RIntegral:
    """R(y1, ., q) via the collapsed zeta-integral; evaluate at many y2 at once.

    With zeta_cut = None the zeta-integral of omega(q, zeta) e(zeta s) is taken in closed form;
    otherwise omega is multiplied by U(zeta/zeta_cut) (U = 1 on [-1, 1], 0 outside [-2, 2]) and
    the zeta-integral is done by quadrature.
    """

    params: OscParams
    q: float
    y1: float
    sign_I: int
    sign_J: int
    mus: tuple = (0.0, 0.0, 0.0)
    sp: SpectralParams = field(default_factory=lambda: SpectralParams.holomorphic(12))
    grid: int = 1200
    u_grid: int = 2048
    tau_step: float = 0.05
    trunc: float = 1e-12
    zeta_cut: float | None = None
    I_slot: object = None  # v1 -> profile, replacing I_profile when given

    def __post_init__(self) -> None:
        p = self.params
        if self.q > p.Q:
            raise OutOfRange(f"q = {self.q} exceeds Q = {p.Q:.3f}")
        self.weight = dfi_for(p.Q)
        V, W = p.V, p.W
        v1 = np.linspace(*V.support, self.grid + 1)
        profile = self.I_profile if self.I_slot is None else self.I_slot
        self._amp1 = profile(v1) * (v1[1] - v1[0])
        self._v1 = v1
        lo2, hi2 = W.support
        u_lo, u_hi = math.log(lo2), math.log(hi2)
        du = (u_hi - u_lo) / self.u_grid
        self._taus, self._mellin = self._mellin_fft(u_lo, u_hi, du)
        _, self._cut = _truncated_sum(self._mellin, self.trunc)
        self._taus, self._mellin = self._taus[self._cut], self._mellin[self._cut]
        self._gam = gamma_pm(self.sign_J, -0.5 + 1j * self._taus, self.mus)

    def I_profile(self, v1: np.ndarray) -> np.ndarray:
        """The I-integrand without its e(B v1) factor."""
        p = self.params
        if self.y1 <= p.large_threshold:
            return math.sqrt(self.y1) * p.V(v1) * bessel_kernel(self.sign_I, 4 * math.pi * np.sqrt(self.y1 * v1),
                                                               self.sp)
        return self.y1 ** 0.25 * v1 ** -0.25 * p.V(v1) * np.exp(
            2j * math.pi * self.sign_I * 2 * np.sqrt(self.y1 * v1))

    def zeta_kernel(self, d: np.ndarray) -> np.ndarray:
        """int omega(q, zeta) [U(zeta/zeta_cut)] e(zeta Q d/q) d zeta."""
        x = self.q / self.params.Q
        if self.zeta_cut is None:
            cutoff = self.weight.params.cutoff
            out = np.zeros(d.shape)
            inside = np.abs(d) < cutoff.hi
            out[inside] = telescoped_h(x, d[inside], self.weight.params.bump) * cutoff(d[inside])
            return out * self.weight.normalization * x
        z, wz = gauss_panels(-2 * self.zeta_cut, 2 * self.zeta_cut, max(16, int(8 * self.zeta_cut / x)), 20)
        amp = self.weight.omega(int(self.q), z) * SmoothWeight("symmetric", 1.0, 2.0)(z / self.zeta_cut) * wz
        flat = d.ravel()
        out = np.empty(flat.shape, dtype=complex)
        for i in range(0, flat.size, 4096):
            out[i:i + 4096] = np.exp(2j * math.pi * np.outer(flat[i:i + 4096], z) / x) @ amp
        return out.reshape(d.shape)

    def _profile(self, u: np.ndarray) -> np.ndarray:
        v2 = np.exp(u)
        W = self.params.W
        keep = W(v2) > 0
        out = np.zeros(u.shape, dtype=complex)
        if self.zeta_cut is None:
            diff = self._v1[None, :] - v2[keep][:, None]
            kern = self.zeta_kernel(diff)
        else:
            kern = self._kernel_interp(self._v1[None, :] - v2[keep][:, None])
        out[keep] = W(v2[keep]) * np.exp(0.5 * u[keep]) * (kern @ self._amp1)
        return out

    def _kernel_interp(self, diff: np.ndarray) -> np.ndarray:
        if not hasattr(self, "_ktab"):
            self._kgrid = np.linspace(-2.0, 2.0, 40001)
            self._ktab = self.zeta_kernel(self._kgrid)
        if not hasattr(self, "_kspline"):
            self._kspline = (CubicSpline(self._kgrid, self._ktab.real), CubicSpline(self._kgrid, self._ktab.imag))
        return self._kspline[0](diff) + 1j * self._kspline[1](diff)

    def _mellin_fft(self, u_lo: float, u_hi: float, du: float):
        rate = math.pi / (2 * du)
        return _u_spectrum(self._profile, u_lo, u_hi, rate, self.tau_step)

    @property
    def tau_support(self) -> tuple[float, float]:
        return float(self._taus[0]), float(self._taus[-1])

    def mellin_peak(self) -> float:
        return float(abs(self._taus[np.argmax(np.abs(self._mellin))]))

    def __call__(self, y2) -> np.ndarray:
        y2 = np.atleast_1d(np.asarray(y2, dtype=float))
        base = self._gam * self._mellin * self.tau_step / TWO_PI
        logs = np.log(self.params.N * y2)
        out = np.empty(y2.shape, dtype=complex)
        for i in range(0, y2.size, 256):
            out[i:i + 256] = np.exp(-1j * np.outer(logs[i:i + 256], self._taus)) @ base
        return out


_DFI: dict[float, DFIWeight] = {}


def dfi_for(Q: float) -> DFIWeight:
    if Q not in _DFI:
        _DFI[Q] = DFIWeight(DeltaParams(Q))
    return _DFI[Q]


def frak_R_direct(y1: float, y2: float, q: float, params: OscParams, sign_I: int, sign_J: int,
                  mus=(0.0, 0.0, 0.0), sp: SpectralParams | None = None, zeta_cut: float | None = None,
                  zeta_panels: int | None = None, omega_floor: float = 1e-10, resolution: float = 1.0,
                  I_slot=None) -> complex:
    """int U(zeta/zeta_cut) omega(q, zeta) I(y1, q, zeta) J(y2, q, zeta) d zeta by nested quadrature.

    `I_slot(zeta)` replaces I(y1, q, zeta) when given.
    """
    weight = dfi_for(params.Q)
    zmax = omega_extent(weight, int(q), omega_floor)
    if zeta_cut is not None:
        zmax = min(zmax, 2 * zeta_cut)
    panels = zeta_panels or max(16, int(zmax * params.Q / q))
    z, wz = gauss_panels(-zmax, zmax, panels, 20)
    om = weight.omega(int(q), z)
    if zeta_cut is not None:
        om = om * SmoothWeight("symmetric", 1.0, 2.0)(z / zeta_cut)
    total = 0j
    for zi, wi, oi in zip(z, wz, om):
        if abs(oi) < omega_floor * 1e-2:
            continue
        I = I_slot(zi) if I_slot is not None else complex(frak_I(sign_I, y1, q, zi, params, sp))
        J = frak_J_value(sign_J, y2, q, zi, params, mus, resolution=resolution) if zi != 0 else \
            _J_at_zero(sign_J, y2, params, mus, resolution)
        total += wi * oi * I * J
    return total


def _J_at_zero(sign, x, params, mus, resolution):
    return frak_J_value(sign, x, 1.0, 1e-9, params, mus, resolution=resolution)


def omega_extent(weight: DFIWeight, q: int, floor: float) -> float:
    """Smallest Z with |omega(q, zeta)| < floor * max for all |zeta| > Z on the dual grid."""
    spec, dz = weight._spectrum(q)
    z = (np.arange(spec.size) - spec.size // 2) * dz
    big = np.abs(spec) >= floor * np.max(np.abs(spec))
    return float(np.max(np.abs(z[big]))) + dz


# --- H and K ----------------------------------------------------------------------

@dataclass(frozen=True)
class DecayConfig:
    """Arithmetic data of one H (or K) integral."""

    q1: int = 1
    q2: int = 7
    q2p: int = 7
    m: int = 45
    mp: int = 45
    sign_I: int = -1
    sign_J: int = -1
    mirror: bool = False  # K: Y = mN/(q^2 M2^2) in place of mN/(q^2 M^2)
    mus: tuple = (0.0, 0.0, 0.0)

    def Y(self, params: OscParams, q2: int, m: int) -> float:
        mod = params.M2 if self.mirror else params.M
        return m * params.N / ((self.q1 * q2) ** 2 * mod ** 2)


@dataclass
class DecayReport:
    X: np.ndarray
    H: np.ndarray
    peak_window: float
    tail_window: float
    tail_ratio: float
    peak_X: float
    H0: float
    C_over_Q: float
    L: float
    config: dict

    def as_dict(self) -> dict:
        return {"tail_ratio": self.tail_ratio, "peak_X": self.peak_X, "abs_H0": self.H0,
                "C_over_Q": self.C_over_Q, "peak_window": self.peak_window,
                "tail_window": self.tail_window, "L": self.L, "config": self.config,
                "samples": [[float(x), float(abs(h))] for x, h in zip(self.X, self.H)]}


def h_integral(params: OscParams, cfg: DecayConfig, X_grid, xi_panels: int = 60):
    """H(X) (or K(X) when cfg.mirror) on X_grid; returns (H values, L used)."""
    p = params
    q, qp = cfg.q1 * cfg.q2, cfg.q1 * cfg.q2p
    R1 = RIntegral(p, q, cfg.Y(p, cfg.q2, cfg.m), cfg.sign_I, cfg.sign_J, cfg.mus)
    R2 = R1 if (qp == q and cfg.mp == cfg.m) else RIntegral(p, qp, cfg.Y(p, cfg.q2p, cfg.mp), cfg.sign_I,
                                                             cfg.sign_J, cfg.mus)
    L = p.L if p.L is not None else resonant_L(p, q, R1.mellin_peak())
    phi = default_xi_weight()
    xi, w = gauss_panels(*phi.support, xi_panels, 20)
    scale = L / (p.M1 ** 3 * p.r)
    prod = R1(scale * xi / q ** 3) * np.conj(R2(scale * xi / qp ** 3))
    amp = phi(xi) * prod * w / xi
    X = np.asarray(X_grid, dtype=float)
    H = np.exp(-2j * math.pi * np.outer(X, xi)) @ amp
    return H, L


def resonant_L(params: OscParams, q: float, tau0: float) -> float:
    """L making the tau-phase of J stationary at |tau| = tau0 for xi = 1: N L/(q^3 M1^3 r) = (tau0/pi)^3."""
    tau0 = max(tau0, math.pi)
    return (tau0 / math.pi) ** 3 * q ** 3 * params.M1 ** 3 * params.r / params.N


def h_decay_scan(params: OscParams, X_grid=None, cfg: DecayConfig | None = None) -> DecayReport:
    """Tail ratio max_{|X| > 10 Q/C} |H| / max_{|X| <= Q/C} |H|."""
    cfg = DecayConfig() if cfg is None else cfg
    ratio = params.Q / params.C
    if not 5 <= ratio <= 50:
        raise ValueError(f"Q/C = {ratio:.2f} outside [5, 50]")
    if X_grid is None:
        X_grid = np.linspace(-20 * ratio, 20 * ratio, 801)
    X = np.asarray(X_grid, dtype=float)
    H, L = h_integral(params, cfg, X)
    near = np.abs(X) <= ratio
    far = np.abs(X) > 10 * ratio
    if not near.any() or not far.any():
        raise ValueError("X grid must reach inside Q/C and beyond 10 Q/C")
    peak = float(np.max(np.abs(H[near])))
    tail = float(np.max(np.abs(H[far])))
    H0 = float(abs(h_integral(params, cfg, [0.0])[0][0]))
    return DecayReport(X, H, ratio, 10 * ratio, tail / peak if peak else math.inf,
                       float(X[np.argmax(np.abs(H))]), H0, params.C / params.Q, L,
                       {**params.describe(), "q1": cfg.q1, "q2": cfg.q2, "q2p": cfg.q2p, "m": cfg.m,
                        "mp": cfg.mp, "sign_I": cfg.sign_I, "sign_J": cfg.sign_J,
                        "mirror": cfg.mirror})
