"""Interaction-graph recovery, decomposition and consistent equilibria for normal-form games."""
from gamedecomp.core import (EXHAUSTIVE_CAP, Game, PartialGame, PartialProfile, TableGame,
                             UtilityTable, extract_partial, make_partial_game)
from gamedecomp.decomposer import (Decomposition, LinearDecomposition, as_linear,
                                   decompose_by_components, fit_linear, verify_linear)
from gamedecomp.equilibrium import (brute_force_nash, consistent_equilibria, enumerate_nash,
                                    satisfies)
from gamedecomp.errors import CapacityError, GameFormatError, NegativeWeightError
from gamedecomp.generator import GeneratorSpec, additive_game, generate_game, two_group_spec
from gamedecomp.sampler import InteractionMatrix, all_interaction_matrices, interaction_matrix
from gamedecomp.spectral import (EigenPair, InfluencerReport, InteractionGraph, approximate_cut,
                                 build_graph, eigendecompose, influencers)

__version__ = "0.1.0"
