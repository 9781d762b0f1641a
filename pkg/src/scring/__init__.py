"""Small cancellation theory for rings over free group algebras."""
from .words import Alphabet, Letter, Occurrence, Word, ONE, concat, inverse, occurrences_of, split
from .polynomials import GF2, QQ, Field, Polynomial, parse_polynomial, format_polynomial
from .relations import (INFINITY, ExplicitFamily, RelationSystem, Tri, additive_closure_step,
                        check_compatibility, check_isolation, check_small_cancellation,
                        is_in_AddR)
from .families import (GroupPresentation, TrinomialParams, TwoLoopGraph, check_Cm,
                       count_paths, dehn_reduce, demo_system, group_small_piece,
                       make_group_system, make_trinomial_system)
from .chart import (FChar, compute_chart, decide_virtual, derived_monomials, f_char,
                    filtration_index, images_of, is_admissible, minimal_covering,
                    neighbour_subwords)
from .rewrite import (Certificate, Layout, compare_f, greedy_reduce, greedy_step,
                      layout_of, multi_turn)
from .oracle import bounded_membership, exhaustive_lambda, exhaustive_virtual, verify_certificate
