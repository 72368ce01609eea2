"""Theta-free graph constructions, exact theta detection and path statistics."""

from .construct import (ConstructionParams, build_even_construction, build_odd_construction,
                        build_clean_graph, estimate_T, random_algebraic_graph)
from .explore import compute_constants, run_certifier
from .ffield import FieldElement, FieldSpec, field, largest_prime_power_with
from .graph import BipartiteGraph
from .mpoly import PolynomialSystem
from .theta import ThetaWitness, brute_force_theta_oracle, contains_theta, validate_witness

__version__ = "0.1.0"
