"""Time stepping: exponential (Lawson) RK4 on the exact free flow, plain RK4,
and step-doubling error control.

A *system* bundles the grid, the interaction, and the forcing of each
component together with its free-propagator signature.  The Lawson scheme
changes variables along the exact linear flow, applies classical RK4 to the
transformed forcing, and maps back; with zero forcing one step reproduces
the free propagator to machine precision.  The plain RK4 scheme keeps the
Laplacians inside the stage derivatives and is step-size limited by the
largest grid frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NumericalBlowupError, StiffnessError, TdhfbError
from .grids import Field, Grid, Kernel, _apply_kernel_axis_multiplier
from .model import PairState, Potential, State
from .rhs import (RhsVariant, lambda_vn_term, rhs_gamma, rhs_hartree, rhs_lambda,
                  rhs_pair, rhs_phi)

SCHEMES = ("lawson_rk4", "rk4")


@dataclass
class StepController:
    """Step-size policy for :func:`evolve`."""

    dt: float = 0.01
    rtol: float = 1e-8
    max_dt: float = 0.1
    min_dt: float = 1e-7
    scheme: str = "lawson_rk4"
    adaptive: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise TdhfbError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not (0 < self.min_dt <= self.dt <= self.max_dt):
            raise TdhfbError("need 0 < min_dt <= dt <= max_dt")
        if self.adaptive and not (self.rtol > 0):
            raise TdhfbError("rtol must be positive")


@dataclass
class Trajectory:
    """Sampled output of one evolution run."""

    times: list[float] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    final_state: object = None
    accepted: int = 0
    rejected: int = 0


class _ComponentSpec:
    def __init__(self, kind: str, signature: tuple[int, ...]):
        self.kind = kind  # "field" | "kernel"
        self.signature = signature


class BaseSystem:
    """Grid + interaction + forcing for a fixed component layout."""

    components: tuple[_ComponentSpec, ...] = ()

    def __init__(self, grid: Grid, pot: Potential, dispersion: str = "spectral"):
        self.grid = grid
        self.pot = pot
        self.dispersion = dispersion
        self._lap = grid.laplacian_symbol(dispersion)

    # -- representation plumbing -------------------------------------------------
    def to_bundle(self, state) -> list[np.ndarray]:
        raise NotImplementedError

    def from_bundle(self, bundle: list[np.ndarray]):
        raise NotImplementedError

    def forcing(self, bundle: list[np.ndarray]) -> list[np.ndarray]:
        """Returns du/dt minus the linear part, i.e. the arrays i*F."""
        raise NotImplementedError

    # -- linear flow ---------------------------------------------------------------
    def propagate(self, bundle: list[np.ndarray], tau: float) -> list[np.ndarray]:
        out = []
        for spec, arr in zip(self.components, bundle):
            if spec.kind == "field":
                ph = np.exp(1j * tau * spec.signature[0] * self._lap)
                out.append(np.fft.ifftn(ph * np.fft.fftn(arr)))
            else:
                vals = arr
                for ax, s in enumerate(spec.signature):
                    ph = np.exp(1j * tau * s * self._lap)
                    vals = _apply_kernel_axis_multiplier(self.grid, vals, ph, ax)
                out.append(vals)
        return out

    def apply_linear(self, bundle: list[np.ndarray]) -> list[np.ndarray]:
        """i * (signed Laplacians) u, for the plain RK4 scheme."""
        out = []
        for spec, arr in zip(self.components, bundle):
            if spec.kind == "field":
                sym = 1j * spec.signature[0] * self._lap
                out.append(np.fft.ifftn(sym * np.fft.fftn(arr)))
            else:
                acc = np.zeros_like(arr)
                for ax, s in enumerate(spec.signature):
                    sym = 1j * s * self._lap
                    acc += _apply_kernel_axis_multiplier(self.grid, arr, sym, ax)
                out.append(acc)
        return out

    # -- norms ---------------------------------------------------------------------
    def bundle_norm(self, bundle: list[np.ndarray]) -> float:
        w = self.grid.weight
        total = 0.0
        for spec, arr in zip(self.components, bundle):
            wt = w if spec.kind == "field" else w * w
            total += wt * float(np.sum(np.abs(arr) ** 2))
        return float(np.sqrt(total))


class GMSystem(BaseSystem):
    """The (phi, gamma, lambda) flow."""

    def __init__(self, grid, pot, params, variant: RhsVariant = RhsVariant(),
                 dispersion: str = "spectral"):
        super().__init__(grid, pot, dispersion)
        self.params = params
        self.variant = variant
        self.components = (_ComponentSpec("field", (1,)),
                           _ComponentSpec("kernel", (-1, 1)),
                           _ComponentSpec("kernel", (1, 1)))

    def to_bundle(self, st: State) -> list[np.ndarray]:
        return [st.phi.values.copy(), st.gamma.values.copy(), st.lam.values.copy()]

    def from_bundle(self, bundle) -> State:
        phi = Field(self.grid, bundle[0])
        gam = Kernel(self.grid, bundle[1], "hermitian")
        lam = Kernel(self.grid, bundle[2], "symmetric")
        return State(phi, gam, lam, self.params)

    def forcing(self, bundle) -> list[np.ndarray]:
        st = State(Field(self.grid, bundle[0]), Kernel(self.grid, bundle[1]),
                   Kernel(self.grid, bundle[2]), self.params)
        f_phi = rhs_phi(st, self.pot).values
        g = rhs_gamma(st, self.pot, self.variant).values
        f_lam = rhs_lambda(st, self.pot).values + lambda_vn_term(st, self.pot)
        return [1j * f_phi, 1j * g, 1j * f_lam]


class PairSystem(BaseSystem):
    """The (phi, sh2) flow."""

    def __init__(self, grid, pot, params, dispersion: str = "spectral"):
        super().__init__(grid, pot, dispersion)
        self.params = params
        self.components = (_ComponentSpec("field", (1,)),
                           _ComponentSpec("kernel", (1, 1)))

    def to_bundle(self, ps: PairState) -> list[np.ndarray]:
        return [ps.phi.values.copy(), ps.sh2.values.copy()]

    def from_bundle(self, bundle) -> PairState:
        sh2 = 0.5 * (bundle[1] + bundle[1].T)
        return PairState(Field(self.grid, bundle[0]),
                         Kernel(self.grid, sh2, "symmetric"), self.params)

    def forcing(self, bundle) -> list[np.ndarray]:
        ps = PairState(Field(self.grid, bundle[0]),
                       Kernel(self.grid, bundle[1], "symmetric"), self.params)
        f_phi, f_sh2 = rhs_pair(ps, self.pot)
        return [1j * f_phi.values, 1j * f_sh2.values]


class HartreeSystem(BaseSystem):
    """Condensate-only reference flow."""

    def __init__(self, grid, pot, dispersion: str = "spectral"):
        super().__init__(grid, pot, dispersion)
        self.components = (_ComponentSpec("field", (1,)),)

    def to_bundle(self, phi: Field) -> list[np.ndarray]:
        return [phi.values.copy()]

    def from_bundle(self, bundle) -> Field:
        return Field(self.grid, bundle[0])

    def forcing(self, bundle) -> list[np.ndarray]:
        return [1j * rhs_hartree(Field(self.grid, bundle[0]), self.pot).values]


def _axpy(bundle, others, coeffs):
    return [arr + sum(c * o[i] for c, o in zip(coeffs, others)) for i, arr in enumerate(bundle)]


def step(system: BaseSystem, bundle: list[np.ndarray], dt: float,
         scheme: str = "lawson_rk4") -> list[np.ndarray]:
    """Advance one step of size dt with the requested scheme."""
    if scheme == "lawson_rk4":
        return _step_lawson(system, bundle, dt)
    if scheme == "rk4":
        return _step_rk4(system, bundle, dt)
    raise TdhfbError(f"unknown scheme {scheme!r}")


def _step_lawson(system, u0, dt):
    half = 0.5 * dt
    f1 = system.forcing(u0)
    a2 = system.propagate(_axpy(u0, [f1], [half]), half)
    f2 = system.forcing(a2)
    u0_half = system.propagate(u0, half)
    a3 = _axpy(u0_half, [f2], [half])
    f3 = system.forcing(a3)
    a4 = system.propagate(_axpy(u0_half, [f3], [dt]), half)
    f4 = system.forcing(a4)
    t1 = system.propagate(f1, half)
    combo = _axpy(u0_half, [t1, f2, f3], [dt / 6.0, dt / 3.0, dt / 3.0])
    out = system.propagate(combo, half)
    return _axpy(out, [f4], [dt / 6.0])


def _step_rk4(system, u0, dt):
    def deriv(u):
        lin = system.apply_linear(u)
        nl = system.forcing(u)
        return [a + b for a, b in zip(lin, nl)]

    k1 = deriv(u0)
    k2 = deriv(_axpy(u0, [k1], [dt / 2.0]))
    k3 = deriv(_axpy(u0, [k2], [dt / 2.0]))
    k4 = deriv(_axpy(u0, [k3], [dt]))
    return _axpy(u0, [k1, k2, k3, k4], [dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0])


def _finite(bundle) -> bool:
    return all(np.all(np.isfinite(arr)) for arr in bundle)


def evolve(system: BaseSystem, state0, T: float, controller: StepController,
           sample_times: Sequence[float] | None = None,
           observer: Callable[[float, object, float, float], dict | None] | None = None,
           ) -> Trajectory:
    """Advance to time T with step-doubling acceptance.

    ``sample_times`` must be increasing and contained in [0, T]; the stepper
    lands on each exactly.  ``observer(t, state, dt_used, err)`` is invoked
    at every sample time (including t=0) and its dict, if any, is collected
    into the trajectory rows.
    """
    if not (T > 0):
        raise TdhfbError("T must be positive")
    samples = [0.0, T] if sample_times is None else sorted(set(float(t) for t in sample_times) | {0.0, T})
    if samples[0] < 0 or samples[-1] > T + 1e-12:
        raise TdhfbError("sample times must lie in [0, T]")

    traj = Trajectory()
    bundle = system.to_bundle(state0)
    t = 0.0
    dt = controller.dt
    last_err = 0.0
    eps_t = 1e-12 * max(1.0, T)

    def emit(tval, dt_used, err):
        traj.times.append(tval)
        if observer is not None:
            row = observer(tval, system.from_bundle([a.copy() for a in bundle]), dt_used, err)
            if row is not None:
                traj.rows.append(row)

    emit(0.0, 0.0, 0.0)
    next_idx = 1 if samples[0] == 0.0 else 0

    while t < T - eps_t:
        target = samples[next_idx] if next_idx < len(samples) else T
        dt_try = min(dt, target - t)
        if controller.adaptive:
            full = step(system, bundle, dt_try, controller.scheme)
            half = step(system, bundle, 0.5 * dt_try, controller.scheme)
            half = step(system, half, 0.5 * dt_try, controller.scheme)
            if not (_finite(full) and _finite(half)):
                raise NumericalBlowupError(t + dt_try)
            nrm = system.bundle_norm(half)
            diff = system.bundle_norm([a - b for a, b in zip(full, half)])
            err = diff / max(nrm, 1e-300)
            if err > controller.rtol:
                traj.rejected += 1
                dt = 0.5 * dt_try
                if dt < controller.min_dt:
                    raise StiffnessError(
                        f"dt underflow at t={t:.6g}: needed below min_dt={controller.min_dt}")
                continue
            bundle = half
            last_err = err
            if err < controller.rtol / 32.0 and dt_try >= dt:
                dt = min(2.0 * dt, controller.max_dt)
        else:
            bundle = step(system, bundle, dt_try, controller.scheme)
            if not _finite(bundle):
                raise NumericalBlowupError(t + dt_try)
            last_err = float("nan")
        traj.accepted += 1
        t += dt_try
        if next_idx < len(samples) and t >= samples[next_idx] - eps_t:
            t = samples[next_idx]
            emit(t, dt_try, last_err)
            next_idx += 1

    traj.final_state = system.from_bundle(bundle)
    return traj
