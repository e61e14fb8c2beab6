from math import pi, sqrt
from typing import Dict, Sequence

import numpy as np

from constants.dat_names import BOA_MOMENTS, BOA_NEIGHBOURS, BOA_Q
from custom_types.access_binding import AccessBinding
from custom_types.access_mode import AccessMode
from custom_types.backend import Backend
from custom_types.block_context import BlockContext
from custom_types.boa_config import BOAConfig
from custom_types.dat_type import DatType
from custom_types.log_level import LogLevel
from custom_types.moment_dat import MomentDat
from custom_types.particle_dat import ParticleDat
from custom_types.q_dat import QDat
from custom_types.state import State
from custom_types.vector_kernel import VectorKernel
from utils.logging import Logging
from utils.loop_utils import LoopUtils
from utils.state_utils import StateUtils

UNIT_TOLERANCE = 1e-9


def _normalized_legendre(l: int, x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Rows m = 0..l of the fully normalised associated Legendre functions of
    degree l at cos(theta) = x, sin(theta) = s, Condon-Shortley phase included."""
    result = np.empty((l + 1, len(x)))
    pmm = np.full(len(x), 1.0 / sqrt(4.0 * pi))
    for m in range(l + 1):
        if m > 0:
            pmm = -sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pmm
        if m == l:
            result[m] = pmm
            break
        p_prev2 = pmm
        p_prev = sqrt(2.0 * m + 3.0) * x * pmm
        for degree in range(m + 2, l + 1):
            a = sqrt((4.0 * degree * degree - 1.0) / (degree * degree - m * m))
            b = sqrt(
                ((degree - 1.0) ** 2 - m * m) / (4.0 * (degree - 1.0) ** 2 - 1.0)
            )
            p_prev2, p_prev = p_prev, a * (x * p_prev - b * p_prev2)
        result[m] = p_prev
    return result


def _harmonics(l: int, dirs: np.ndarray) -> np.ndarray:
    """Y_l^m for every row of `dirs` (unit vectors), columns m = -l..l."""
    x, y, z = dirs[:, 0], dirs[:, 1], dirs[:, 2]
    s = np.sqrt(x * x + y * y)
    phi = np.arctan2(y, x)
    legendre = _normalized_legendre(l, z, s)
    out = np.empty((len(dirs), 2 * l + 1), dtype=np.complex128)
    for m in range(l + 1):
        positive = legendre[m] * np.exp(1j * m * phi)
        out[:, l + m] = positive
        if m > 0:
            out[:, l - m] = (-1) ** m * np.conj(positive)
    return out


def _boa_pair_kernel(l_values: Sequence[int], r_c: float) -> VectorKernel:
    def boa_moments(ctx: BlockContext) -> None:
        r = ctx["r"]
        d = r.i - r.j
        dist = np.sqrt(np.einsum("ij,ij->i", d, d))
        within = dist < r_c
        if not within.any():
            return
        dirs = d[within] / dist[within, None]
        ctx["nu_nb"].inc_i(np.ones(len(dirs)), where=within)
        for l in l_values:
            y = _harmonics(l, dirs)
            interleaved = np.empty((len(dirs), 2 * (2 * l + 1)))
            interleaved[:, 0::2] = y.real
            interleaved[:, 1::2] = y.imag
            ctx[f"q{l}"].inc_i(interleaved, where=within)

    return VectorKernel("boa_moments", boa_moments)


def _boa_finalize_kernel(l_values: Sequence[int]) -> VectorKernel:
    def boa_finalize(ctx: BlockContext) -> None:
        nu = ctx["nu_nb"].i[:, 0].astype(np.float64)
        defined = nu > 0
        for l in l_values:
            moments = ctx[f"q{l}"].i
            with np.errstate(divide="ignore", invalid="ignore"):
                re = moments[:, 0::2] / nu[:, None]
                im = moments[:, 1::2] / nu[:, None]
                total = np.sum(re * re + im * im, axis=1)
                q = np.sqrt(4.0 * pi / (2 * l + 1) * total)
            ctx[f"Q{l}"].write_i(np.where(defined, q, np.nan))

    return VectorKernel("boa_finalize", boa_finalize)


class BoaUtils:
    def __init__(self, loop_utils: LoopUtils, state_utils: StateUtils, logging: Logging):
        self.loop_utils = loop_utils
        self.state_utils = state_utils
        self.logging = logging

    def _check_degree(self, l: int, m: int = 0) -> None:
        if l < 0 or abs(m) > l:
            error_msg = f"Spherical harmonic needs 0 <= |m| <= l, got l={l}, m={m}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)

    def _check_unit(self, dirs: np.ndarray) -> None:
        norms = np.linalg.norm(dirs, axis=1)
        bad = np.flatnonzero(~(np.abs(norms - 1.0) <= UNIT_TOLERANCE))
        if len(bad):
            error_msg = f"Directions must be unit vectors, rows {bad.tolist()} have norms {norms[bad].tolist()}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)

    def spherical_harmonic(self, l: int, m: int, direction: Sequence[float]) -> complex:
        self._check_degree(l, m)
        dirs = np.asarray(direction, dtype=np.float64).reshape(1, 3)
        self._check_unit(dirs)
        return complex(_harmonics(l, dirs)[0, l + m])

    def spherical_harmonics(self, l: int, dirs: np.ndarray) -> np.ndarray:
        self._check_degree(l)
        dirs = np.asarray(dirs, dtype=np.float64).reshape(-1, 3)
        self._check_unit(dirs)
        return _harmonics(l, dirs)

    def boa_moments(
        self,
        state: State,
        cfg: BOAConfig,
        backend: Backend = Backend.CELL_LIST,
        debug: bool = False,
    ) -> MomentDat:
        moments: Dict[int, ParticleDat] = {
            l: self.state_utils.ensure_dat(state, BOA_MOMENTS.format(l=l), 2 * (2 * l + 1))
            for l in cfg.l_values
        }
        nu_nb = self.state_utils.ensure_dat(state, BOA_NEIGHBOURS, 1, DatType.INT64)
        bindings = [
            AccessBinding("r", state.positions, AccessMode.READ),
            AccessBinding("nu_nb", nu_nb, AccessMode.INC_ZERO),
        ] + [AccessBinding(f"q{l}", dat, AccessMode.INC_ZERO) for l, dat in moments.items()]
        backend = self.loop_utils.select_backend(state, cfg.r_c, backend)
        self.loop_utils.pair_loop(
            state, _boa_pair_kernel(cfg.l_values, cfg.r_c), bindings, cfg.r_c, backend, debug=debug
        )
        if debug:
            counts = nu_nb.values[:, 0]
            self.logging.log(
                [
                    f"Degrees: {cfg.l_values}",
                    f"Cutoff: {cfg.r_c}",
                    f"Backend: {backend.value}",
                    f"Mean neighbours: {counts.mean() if len(counts) else 0.0}",
                    f"Isolated particles: {int(np.sum(counts == 0))}",
                ],
                LogLevel.DEBUG,
            )
        return MomentDat(moments=moments, nu_nb=nu_nb)

    def boa_finalize(self, moments: MomentDat, debug: bool = False) -> QDat:
        """Q_l per particle; NaN where a particle has no neighbours."""
        state = moments.nu_nb.state
        if state is None:
            error_msg = f"'{moments.nu_nb.name}' is not attached to a state"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        l_values = tuple(sorted(moments.moments))
        q = {l: self.state_utils.ensure_dat(state, BOA_Q.format(l=l), 1) for l in l_values}
        bindings = [AccessBinding("nu_nb", moments.nu_nb, AccessMode.READ)]
        bindings += [
            AccessBinding(f"q{l}", moments.moments[l], AccessMode.READ) for l in l_values
        ]
        bindings += [AccessBinding(f"Q{l}", q[l], AccessMode.WRITE) for l in l_values]
        self.loop_utils.particle_loop(state, _boa_finalize_kernel(l_values), bindings, debug=debug)
        if debug:
            self.logging.log(
                [f"Q_{l} mean: {np.nanmean(q[l].values) if state.npart else 'n/a'}" for l in l_values],
                LogLevel.DEBUG,
            )
        return QDat(q=q)
