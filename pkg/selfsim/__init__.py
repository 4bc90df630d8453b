"""Self-similar finite p-groups toolkit"""

__version__ = '1.0.0'
__author__ = 'Self-Similar Groups Team'

from .config import RunConfig
from .group_core import GroupTable, Perm, Subgroup, closure
from .morphism import VirtualEndomorphism, search_simple_endos
from .tree_rep import MealyAutomaton, build_automaton
from .verify import analyze_group, run_suite

__all__ = [
    'RunConfig',
    'GroupTable',
    'Perm',
    'Subgroup',
    'closure',
    'VirtualEndomorphism',
    'search_simple_endos',
    'MealyAutomaton',
    'build_automaton',
    'analyze_group',
    'run_suite',
]
