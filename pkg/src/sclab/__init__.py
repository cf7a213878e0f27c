"""Random simplicial complexes: sampling, cohomology, spectral certificates and Monte Carlo checks."""
from .complex import SimplicialComplex, FaceLocator, link, skeleton, free_faces, count_free_faces, unfilled_boundaries
from .sampler import ProbabilitySchedule, SampleSpec, sample, sample_probs, special, mix, splitmix64
from .homology import betti, boundary_matrix, rank_exact, rank_mod_p, BettiReport
from .spectral import Graph, spectrum, spectral_gap, garland_certificate, link_graph, link_counts
from .theory import (expected_face_count, expected_free_faces, expected_boundaries, eta_gamma,
                     link_params, classify_regime, RegimeInput, Regime, critical_params)

__version__ = "0.1.0"
