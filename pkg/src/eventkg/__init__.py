"""Eventuality knowledge graphs from dependency-parsed text.

Eventualities (verb-centred word groups) are matched with fourteen dependency
patterns, paired within sentences, labelled by seed connectives and a
self-trained classifier, and stored as a weighted typed graph that answers
one- and two-hop probability queries.
"""

__version__ = "0.1.0"

from .conllu import DependencyGraph, Token, is_clausal, parse_conllu
from .eventuality import Eventuality, canonical_key
from .extract import extract_eventualities, match_pattern
from .patterns import Pattern, builtin_patterns
from .relations import RelationType, TrainingInstance, build_instances, match_seed, seed_rules
from .store import KnowledgeGraph, filter_core, load, save

__all__ = [
    "DependencyGraph", "Token", "is_clausal", "parse_conllu",
    "Eventuality", "canonical_key", "extract_eventualities", "match_pattern",
    "Pattern", "builtin_patterns", "RelationType", "TrainingInstance",
    "build_instances", "match_seed", "seed_rules",
    "KnowledgeGraph", "filter_core", "load", "save",
]
