"""Macrospin dynamics: dipolar coupling plus astroid switching.

Each magnet is a binary moment along its easy axis.  The field at magnet i
is the external field plus point-dipole contributions from every neighbor j
within the cutoff:

    h_i = alpha * sum_j s_j * mag_j * [3 (e_j . r_hat) r_hat - e_j] / |r_ij|^3

A magnet may reverse only when the easy-axis field component opposes its
moment and the (parallel, perpendicular) components lie outside a
generalized switching astroid:

    (|h_par| / (b * hc_i))^(2/gamma) + (|h_perp| / (c * hc_i))^(2/beta) >= 1

Relaxation repeats: evaluate the criterion everywhere, flip the single most
strongly violated magnet (largest astroid left-hand side, ties to the lowest
index), recompute, until nothing switches.  Every flip aligns the flipped
moment with its easy-axis field, so the interaction energy strictly
decreases and the loop terminates.
"""

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a normal dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap

from .exceptions import InvalidParameterError, NonConvergenceError
from .lattice import Geometry
from .validation import check_spins


class ExternalField(NamedTuple):
    hx: float
    hy: float


@dataclass(frozen=True)
class SwitchingParams:
    """Coercive field, astroid shape, and per-site coercive disorder.

    The default astroid (b=0.38, c=1.0, beta=1.3, gamma=3.6) is the common
    elongated-nanomagnet shape; ``classic()`` returns the textbook astroid
    (b=c=1, beta=gamma=3) whose 45-degree threshold is exactly h_c/2.
    """

    h_c: float = 1.0
    astroid_b: float = 0.38
    astroid_c: float = 1.0
    astroid_beta: float = 1.3
    astroid_gamma: float = 3.6
    disorder_sigma: float = 0.05
    disorder_seed: int = 0

    def __post_init__(self):
        if self.h_c <= 0:
            raise InvalidParameterError("h_c must be > 0")
        if min(self.astroid_b, self.astroid_c) <= 0:
            raise InvalidParameterError("astroid scale factors must be > 0")
        if min(self.astroid_beta, self.astroid_gamma) <= 0:
            raise InvalidParameterError("astroid exponents must be > 0")
        if self.disorder_sigma < 0:
            raise InvalidParameterError("disorder_sigma must be >= 0")

    @classmethod
    def classic(cls, h_c: float = 1.0, **kw) -> "SwitchingParams":
        return cls(h_c=h_c, astroid_b=1.0, astroid_c=1.0,
                   astroid_beta=3.0, astroid_gamma=3.0, **kw)

    def site_coercive_fields(self, n: int) -> np.ndarray:
        """Per-site h_c,i = h_c * (1 + N(0, sigma)), seeded."""
        if self.disorder_sigma == 0:
            return np.full(n, self.h_c)
        rng = np.random.default_rng(self.disorder_seed)
        return self.h_c * (1.0 + self.disorder_sigma * rng.standard_normal(n))


@dataclass(frozen=True)
class CouplingConfig:
    """Dipolar prefactor (field units * length^3) and neighbor cutoff."""

    alpha_coupling: float = 0.07
    neighbor_cutoff: float = 3.0

    def __post_init__(self):
        if self.alpha_coupling < 0:
            raise InvalidParameterError("alpha_coupling must be >= 0")
        if self.neighbor_cutoff <= 0:
            raise InvalidParameterError("neighbor_cutoff must be > 0")


def astroid_lhs(h_par, h_perp, params: SwitchingParams, site_hc) -> np.ndarray:
    """Left-hand side of the astroid criterion; switching needs >= 1."""
    pu = np.abs(h_par) / (params.astroid_b * site_hc)
    qu = np.abs(h_perp) / (params.astroid_c * site_hc)
    return pu ** (2.0 / params.astroid_gamma) + qu ** (2.0 / params.astroid_beta)


def switching_test(h_parallel, h_perp, spin, params: SwitchingParams, site_hc) -> bool:
    """True iff the field opposes the moment and lies outside the astroid."""
    if site_hc <= 0:
        raise InvalidParameterError("site_hc must be > 0")
    if h_parallel * spin >= 0:
        return False
    return bool(astroid_lhs(h_parallel, h_perp, params, site_hc) >= 1.0)


@njit(cache=True)
def _relax_kernel(cpar, cperp, s, hp, hq, inv_bh, inv_ch, e_par, e_perp,
                  max_flips):  # pragma: no cover - exercised via relax()
    """Greedy single-flip relaxation with incremental field updates.

    hp/hq arrive holding the external-field projections and gain the dipolar
    contribution here; each flip is an O(n) field update.  Returns the flip
    count, or -1 when the budget is exhausted.
    """
    n = s.shape[0]
    for i in range(n):
        acc_p = hp[i]
        acc_q = hq[i]
        for j in range(n):
            acc_p += cpar[i, j] * s[j]
            acc_q += cperp[i, j] * s[j]
        hp[i] = acc_p
        hq[i] = acc_q
    flips = 0
    while True:
        best = -1
        best_lhs = -1.0
        for i in range(n):
            if hp[i] * s[i] < 0.0:
                lhs = (abs(hp[i]) * inv_bh[i]) ** e_par + (
                    abs(hq[i]) * inv_ch[i]
                ) ** e_perp
                if lhs >= 1.0 and lhs > best_lhs:
                    best = i
                    best_lhs = lhs
        if best < 0:
            return flips
        if flips >= max_flips:
            return -1
        ds = -2.0 * s[best]
        s[best] = -s[best]
        for i in range(n):
            hp[i] += ds * cpar[i, best]
            hq[i] += ds * cperp[i, best]
        flips += 1


def _relax_python(cpar, cperp, s, hp, hq, inv_bh, inv_ch, e_par, e_perp,
                  max_flips):
    """Vectorized twin of the jitted kernel, used when numba is absent."""
    hp += cpar @ s
    hq += cperp @ s
    flips = 0
    while True:
        lhs = (np.abs(hp) * inv_bh) ** e_par + (np.abs(hq) * inv_ch) ** e_perp
        can = (hp * s < 0.0) & (lhs >= 1.0)
        if not can.any():
            return flips
        if flips >= max_flips:
            return -1
        k = int(np.argmax(np.where(can, lhs, -np.inf)))
        ds = -2.0 * s[k]
        s[k] = -s[k]
        hp += ds * cpar[:, k]
        hq += ds * cperp[:, k]
        flips += 1


_relax_core = _relax_kernel if HAVE_NUMBA else _relax_python


class PnaModel:
    """A geometry bound to coupling and switching parameters.

    Precomputes the pairwise dipolar coupling matrices so that the total
    field is two matrix-vector products per relaxation sweep.  Instances are
    read-only after construction and safe to share; a relaxation mutates
    only its local state copy.
    """

    def __init__(
        self,
        geometry: Geometry,
        coupling: CouplingConfig | None = None,
        switching: SwitchingParams | None = None,
        max_iterations: int | None = None,
    ):
        self.geometry = geometry
        self.coupling = coupling or CouplingConfig()
        self.switching = switching or SwitchingParams()
        n = geometry.n_magnets
        self.max_iterations = max_iterations if max_iterations is not None else 10 * n
        self.site_hc = self.switching.site_coercive_fields(n)
        self.site_hc.setflags(write=False)

        pos = geometry.positions
        axes = geometry.axes
        mags = geometry.magnitudes
        dx = pos[:, 0][:, None] - pos[:, 0][None, :]
        dy = pos[:, 1][:, None] - pos[:, 1][None, :]
        dist = np.hypot(dx, dy)
        np.fill_diagonal(dist, np.inf)
        within = dist <= self.coupling.neighbor_cutoff

        with np.errstate(invalid="ignore"):
            ux = np.where(within, dx / dist, 0.0)
            uy = np.where(within, dy / dist, 0.0)
        ejx = axes[:, 0][None, :]
        ejy = axes[:, 1][None, :]
        mdotr = ejx * ux + ejy * uy
        inv3 = np.where(within, dist ** -3, 0.0)
        scale = self.coupling.alpha_coupling * mags[None, :] * inv3
        # Lab-frame field components at i per unit spin of j.
        self._cx = scale * (3.0 * mdotr * ux - ejx)
        self._cy = scale * (3.0 * mdotr * uy - ejy)
        # Pre-projected onto each target magnet's parallel/perpendicular axes.
        eix = axes[:, 0][:, None]
        eiy = axes[:, 1][:, None]
        self._cpar = self._cx * eix + self._cy * eiy
        self._cperp = self._cx * (-eiy) + self._cy * eix
        self._inv_bh = 1.0 / (self.switching.astroid_b * self.site_hc)
        self._inv_ch = 1.0 / (self.switching.astroid_c * self.site_hc)
        self._e_par = 2.0 / self.switching.astroid_gamma
        self._e_perp = 2.0 / self.switching.astroid_beta
        for arr in (self._cx, self._cy, self._cpar, self._cperp,
                    self._inv_bh, self._inv_ch):
            arr.setflags(write=False)

    @property
    def n_magnets(self) -> int:
        return self.geometry.n_magnets

    def dipolar_field(self, spins) -> np.ndarray:
        """Lab-frame dipolar field vector at every magnet, shape (n, 2)."""
        s = check_spins(spins, self.n_magnets).astype(np.float64)
        return np.stack([self._cx @ s, self._cy @ s], axis=1)

    def _field_components(self, s: np.ndarray, hx: float, hy: float):
        axes = self.geometry.axes
        hp = self._cpar @ s + hx * axes[:, 0] + hy * axes[:, 1]
        hq = self._cperp @ s + hx * (-axes[:, 1]) + hy * axes[:, 0]
        return hp, hq

    def relax(self, spins, external, field_step=None) -> np.ndarray:
        """Relax under a constant external field; returns the settled state."""
        s = check_spins(spins, self.n_magnets).astype(np.float64)
        return self._relax_inplace(s, external, field_step).astype(np.int8)

    def _relax_inplace(self, s: np.ndarray, external, field_step) -> np.ndarray:
        hx, hy = float(external[0]), float(external[1])
        if not (np.isfinite(hx) and np.isfinite(hy)):
            raise InvalidParameterError("external field must be finite")
        axes = self.geometry.axes
        hp = hx * axes[:, 0] + hy * axes[:, 1]
        hq = -hx * axes[:, 1] + hy * axes[:, 0]
        flips = _relax_core(
            self._cpar, self._cperp, s, hp, hq, self._inv_bh, self._inv_ch,
            self._e_par, self._e_perp, self.max_iterations,
        )
        if flips < 0:
            where = "" if field_step is None else f" at field step {field_step}"
            raise NonConvergenceError(
                f"relaxation did not settle within {self.max_iterations} "
                f"flips{where}",
                field_step=field_step,
            )
        return s

    def apply_field_sequence(self, spins, fields: Sequence) -> np.ndarray:
        """Fold relax over a field list; the state carries over (hysteresis)."""
        s = check_spins(spins, self.n_magnets).astype(np.float64)
        for step, ext in enumerate(fields):
            self._relax_inplace(s, ext, field_step=step)
        return s.astype(np.int8)

    def initial_state(self, policy="saturated") -> np.ndarray:
        """Deterministic or seeded-random starting state.

        "saturated": every moment takes the sign of its easy axis projected
        on +x (+y breaks the tie for vertical axes), then relaxes at zero
        field.  ("random", seed): seeded coin flips per site, then the same
        zero-field relax.
        """
        axes = self.geometry.axes
        if policy == "saturated":
            s = np.where(
                np.abs(axes[:, 0]) > 1e-12, np.sign(axes[:, 0]), 1.0
            ).astype(np.int8)
        elif isinstance(policy, tuple) and policy[0] == "random":
            rng = np.random.default_rng(policy[1])
            s = rng.choice(np.array([-1, 1], dtype=np.int8), size=self.n_magnets)
        else:
            raise InvalidParameterError(f"unknown initial state policy: {policy!r}")
        return self.relax(s, ExternalField(0.0, 0.0))


def dipolar_field(geometry: Geometry, state, coupling: CouplingConfig) -> np.ndarray:
    return PnaModel(geometry, coupling, SwitchingParams()).dipolar_field(state)


def relax(
    geometry: Geometry,
    state,
    external,
    coupling: CouplingConfig,
    params: SwitchingParams,
    max_iterations: int | None = None,
) -> np.ndarray:
    model = PnaModel(geometry, coupling, params, max_iterations)
    return model.relax(state, external)


def apply_field_sequence(
    geometry: Geometry,
    state,
    fields: Sequence,
    coupling: CouplingConfig,
    params: SwitchingParams,
    max_iterations: int | None = None,
) -> np.ndarray:
    model = PnaModel(geometry, coupling, params, max_iterations)
    return model.apply_field_sequence(state, fields)
