"""Labeled game graphs for XOR-d nonlocal and contextuality games.

Classical values, switching equivalence, Lovasz theta and almost-quantum
bounds, plus the enumeration machinery for small-graph surveys.
"""
from .errors import (InvalidArgument, InvalidGame, InvalidParameter, ParseError, ResourceLimit,
                     Unsupported, XorDError)
from .perms import Permutation, PermutationSet, ld_perm, make_ld, verify_p1p2, md_formula
from .game import (GRAY, LabeledGameGraph, evaluate_assignment, super_quantum_value,
                   parse_game, format_game, read_game, write_game, chsh, chained_bell)
from .equivalence import (SwitchOp, switch, build_kg, assignment_number, canonical_form,
                          canonical_id, equivalent, equivalence_witness)
from .classical import (classical_value, classify_cycles, contradiction_bounds,
                        check_contradiction_bounds, edge_bipartization)
from .sdp import SdpOptions, SdpProblem, Status, solve, lovasz_theta, dump_sdp, load_sdp
from .quantum import (build_orthogonality_graph, theta_upper_bound, almost_quantum_value,
                      pseudo_telepathy_screen)
from .survey import GraphFilter, SurveySpec, enum_graphs, enum_labelings, run_survey

__version__ = "0.1.0"
