"""Schulze and ranked-pairs winner determination, electoral-control solvers,
path-preserving vertex cuts and hardness-reduction generators."""

from .profile import (Election, ParityError, ProfileError, WeightedMajorityGraph, build_wmg,
                      double_margins, mcgarvey_realize, pad_bottom, pairwise_margin,
                      pairwise_support, parse_election, parse_wmg, serialize_election,
                      serialize_wmg, w_pair)
from .schulze import (condorcet_winner, schulze_winners, strongest_paths,
                      weak_condorcet_winners)
from .rankedpairs import TieBreakPolicy, lock_pairs, pair_agenda, ranked_pairs_winner
from .cuts import (DiGraph, cppvc_decide, min_st_vertex_cut, mippvc_decide, parse_digraph,
                   ppvc_decide, serialize_digraph)
from .control import (ControlError, ControlInstance, ControlWitness, Rule, SCHULZE,
                      SearchSpaceExceeded, lift_ccdc_to_exact, lift_dcdc_to_exact,
                      parse_control, replay_witness, serialize_control, solve_control)
from .dcdc import (dcac_dc_via_cut, group_control_via_cut, in_neighbor_witness,
                   solve_dcdc_nonunique, stronger_path_subgraph)
from .reductions import (Rx3cInstance, ThreeSatInstance, parse_cnf, parse_rx3c,
                         rx3c_to_rankedpairs_voter, rx3c_to_schulze_voter, threesat_to_ccdc)

__version__ = "0.1.0"
