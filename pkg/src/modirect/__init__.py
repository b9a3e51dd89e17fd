"""Multi-objective DIRECT optimization toolkit for vibration-based damage
identification on a cantilever-beam finite-element benchmark."""

from .beam import (BeamModel, ModalData, SensitivityMatrix, assemble,
                   eigen_change, mode_change, sensitivity_matrix, solve_modal)
from .cases import (BUILTIN_CASES, CaseConfig, RunReport, compare_strategies,
                    make_case, run_case, simulate_measurement, sweep)
from .engine import (PartitionState, Rectangle, STRATEGIES, from_unit,
                     potentially_optimal_single, run, select_mo, select_mo_hv,
                     select_ns, select_pareto_front, to_unit)
from .errors import (InvalidInputError, InvalidStateError, ModirectError,
                     NumericalFailureError)
from .moo import (ParetoArchive, exclusive_contribution, fast_nondominated_sort,
                  hypervolume_2d, nondominated_mask)
from .objectives import Evaluator, Measurement, evaluate, mdlac
from .posterior import PosteriorConfig, archive_stats, sparse_select

__version__ = "0.1.0"
