"""Planted biclique detection from simulated Gaussian boson sampling.

Submodules: ``graph`` (instances), ``matchperm`` (permanents, normalized
Hafnians), ``gbs`` (samplers), ``weights`` (node weights), ``theory``
(closed forms), ``detect`` (the sampling detector), ``statkit`` (moments,
distances, subset-intersection simulations) and ``experiments`` (registry and reports).
"""
__version__ = "0.1.0"

from .graph import (BipartiteGraph, PlantedInstance, SubgraphSample, gen_bipartite_er,
                    plant_biclique, planted_er)
from .matchperm import PermanentValue, permanent_exact
from .gbs import (CollisionRegimeWarning, EnumerationTooLarge, NoPerfectMatching,
                  enumerate_distribution, sample_exact, sample_mcmc)
from .theory import TheoryParams, predictions

__all__ = [
    "BipartiteGraph", "PlantedInstance", "SubgraphSample", "gen_bipartite_er", "plant_biclique",
    "planted_er", "PermanentValue", "permanent_exact", "CollisionRegimeWarning",
    "EnumerationTooLarge", "NoPerfectMatching", "enumerate_distribution", "sample_exact",
    "sample_mcmc", "TheoryParams", "predictions",
]
