from collections import Counter
from typing import Dict, Optional

import numpy as np

from constants.dat_names import SAME_STATE_COUNT
from constants.kernel_sources import SAME_STATE_NEIGHBOUR_COUNT
from constants.lattice_references import CNA_SIGNATURES, Q_REFERENCE, Q_ZERO_TOLERANCE
from custom_types.access_binding import AccessBinding
from custom_types.access_mode import AccessMode
from custom_types.backend import Backend
from custom_types.constant import Constant
from custom_types.dat_type import DatType
from custom_types.lattice_type import LatticeType
from custom_types.log_level import LogLevel
from custom_types.loop_kind import LoopKind
from custom_types.particle_dat import ParticleDat
from custom_types.q_dat import QDat
from custom_types.q_summary import QSummary
from custom_types.state import State
from custom_types.structure_classification import StructureClassification
from custom_types.structure_type import StructureType
from custom_types.triplet_dat import TripletDat
from utils.kernel_utils import KernelUtils
from utils.logging import Logging
from utils.loop_utils import LoopUtils
from utils.state_utils import StateUtils

DEFAULT_Q_BINS = 20


class AnalysisUtils:
    def __init__(
        self,
        loop_utils: LoopUtils,
        state_utils: StateUtils,
        kernel_utils: KernelUtils,
        logging: Logging,
    ):
        self.loop_utils = loop_utils
        self.state_utils = state_utils
        self.kernel_utils = kernel_utils
        self.logging = logging

    def same_state_neighbour_count(
        self,
        state: State,
        label_dat: ParticleDat,
        r_c: float,
        backend: Backend = Backend.CELL_LIST,
        debug: bool = False,
    ) -> ParticleDat:
        """Number of neighbours within r_c carrying the same integer label."""
        if label_dat.dtype is not DatType.INT64 or label_dat.ncomp != 1:
            error_msg = (
                f"State labels need a single int64 component, '{label_dat.name}' has "
                f"ncomp={label_dat.ncomp}, dtype={label_dat.dtype.value}"
            )
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        counts = self.state_utils.ensure_dat(state, SAME_STATE_COUNT, 1, DatType.INT64)
        bindings = [
            AccessBinding("r", state.positions, AccessMode.READ),
            AccessBinding("s", label_dat, AccessMode.READ),
            AccessBinding("n", counts, AccessMode.INC_ZERO),
        ]
        kernel = self.kernel_utils.compile_kernel(
            SAME_STATE_NEIGHBOUR_COUNT,
            bindings,
            LoopKind.PAIR,
            constants=(Constant("rc_sq", r_c * r_c),),
            debug=debug,
        )
        backend = self.loop_utils.select_backend(state, r_c, backend)
        self.loop_utils.pair_loop(state, kernel, bindings, r_c, backend, debug=debug)
        return counts

    def classify_structures(
        self, triplets: TripletDat, debug: bool = False
    ) -> StructureClassification:
        structures = []
        for i in range(triplets.count.npart):
            signature = Counter(triplets.of(i))
            structure = next(
                (
                    candidate
                    for candidate, reference in CNA_SIGNATURES.items()
                    if signature == Counter(reference)
                ),
                StructureType.UNCLASSIFIED,
            )
            structures.append(structure)
        counts = {structure: 0 for structure in StructureType}
        counts.update(Counter(structures))
        if debug:
            self.logging.log(
                [f"{structure.value}: {n}" for structure, n in counts.items()],
                LogLevel.DEBUG,
            )
        return StructureClassification(structures=tuple(structures), counts=counts)

    def q_summary(
        self, qdat: QDat, bins: int = DEFAULT_Q_BINS, debug: bool = False
    ) -> Dict[int, QSummary]:
        """Per l, mean and histogram over [0, 1] of the defined Q_l values."""
        summary: Dict[int, QSummary] = {}
        for l in qdat.l_values:
            values = qdat.values(l)
            defined = values[~np.isnan(values)]
            histogram, edges = np.histogram(defined, bins=bins, range=(0.0, 1.0))
            summary[l] = QSummary(
                l=l,
                mean=float(defined.mean()) if len(defined) else float("nan"),
                count=len(defined),
                undefined=len(values) - len(defined),
                bin_edges=edges,
                histogram=histogram,
            )
        if debug:
            self.logging.log(
                [f"Q_{l}: mean={s.mean}, undefined={s.undefined}" for l, s in summary.items()],
                LogLevel.DEBUG,
            )
        return summary

    def match_reference(
        self,
        summary: Dict[int, QSummary],
        lattice: LatticeType,
        tolerance: float = 0.005,
    ) -> Dict[int, Optional[bool]]:
        """Compares mean Q_l with the perfect-lattice values; None where the
        lattice or degree has no reference."""
        reference = Q_REFERENCE.get(lattice, {})
        result: Dict[int, Optional[bool]] = {}
        for l, entry in summary.items():
            expected = reference.get(l)
            if expected is None:
                result[l] = None
            elif expected == 0.0:
                result[l] = bool(entry.mean <= Q_ZERO_TOLERANCE)
            else:
                result[l] = bool(abs(entry.mean - expected) <= tolerance)
        return result
