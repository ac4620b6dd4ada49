"""Canalizing Boolean functions, their sensitivities and network Derrida values."""

__version__ = "0.1.0"

from .canalization import CanalizingStructure, build_canalizing, canalizing_depth, decompose, is_canalizing
from .derrida import NetworkSpec, derrida_exhaustive, derrida_monte_carlo, derrida_value, load_network
from .ensemble import LayerSpec, random_exact_depth, random_k_canalizing, spearman, sweep_ncf
from .sdds import SDDSSpec, sdds_derrida, sdds_derrida_exact, sdds_derrida_monte_carlo
from .sensitivity import activity_vector, c_sensitivity, exact_activities_layered, sensitivity_profile
from .truthtable import BooleanFunction, parse_expression, parse_function, parse_table

__all__ = [
    "BooleanFunction",
    "CanalizingStructure",
    "LayerSpec",
    "NetworkSpec",
    "SDDSSpec",
    "activity_vector",
    "build_canalizing",
    "c_sensitivity",
    "canalizing_depth",
    "decompose",
    "derrida_exhaustive",
    "derrida_monte_carlo",
    "derrida_value",
    "exact_activities_layered",
    "is_canalizing",
    "load_network",
    "parse_expression",
    "parse_function",
    "parse_table",
    "random_exact_depth",
    "random_k_canalizing",
    "sdds_derrida",
    "sdds_derrida_exact",
    "sdds_derrida_monte_carlo",
    "sensitivity_profile",
    "spearman",
    "sweep_ncf",
]
