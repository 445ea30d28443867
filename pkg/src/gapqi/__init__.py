"""Quasi-invariant measures for approximately proper equivalence relations
on finite models: GAP structures, partition functions, projectors, the
quasi-invariance verification suite and transfer-operator eigenmeasures."""

from .errors import *  # noqa: F401,F403
from .extreal import INF, ExtReal, ext_inv, ext_mul
from .gap import (GapStructure, GroupoidElement, decompose_class, enumerate_groupoid,
                  gap_from_partitions, gap_from_sigma, validate_gap)
from .instances import build_instance, fixed_point, m0, random_model, two_shift
from .measures import DOMAIN, INDICATOR, Measure, restrict, total_variation
from .modelfile import load_model
from .operators import (LevelOperator, LevelSets, expectation, level_sets, projector,
                        zeta, zeta_profile)
from .potential import (CocycleTable, Potential, birkhoff_sums, build_cocycle,
                        potential_from_h, rd_cocycle_value, validate_potential)
from .qi import (check_charac_dlr, check_conformal, check_main_for_q, check_main_result,
                 check_qi_direct, construct_qi_from_nu, construct_qi_on_winf,
                 construct_qi_on_wn, partition_xwz)
from .ruelle import (TransferOperator, check_class_balance, compose_alpha, rho_product,
                     solve_eigenmeasure, transfer_apply, verify_eigen_dlr)
from .space import SpaceModel, build_domain_chain

__version__ = "0.1.0"
