"""Exact shift equivalence tools for nonnegative integer matrices."""

from .correspondence import (CorrDescriptor, Predicates, descriptor_from_matrix, descriptor_predicates,
                             descriptors_isomorphic, tensor_descriptor)
from .errors import (BadLevel, IncompatibleIndexSets, InvariantViolation, NotAFactorization, NotAnSEWitness,
                     NotSquare, ParseError, ShiftEqError, TheoremViolation, TrimFailure, VerificationFailure)
from .matrices import (OMEGA, CardMatrix, IndexSet, NatMatrix, card_mul, identity, is_essential, mat_mul,
                       mat_pow, product, rank_rational, same_entries, trace, zeros)
from .pathspace import (Edge, IsoReport, PathIso, compose, compose_all, cross, edge_set, flatten, identity_iso,
                        invert, lift_power, path_space, validate_path_iso)
from .reduction import (ChainReport, IdealSubset, PairReduction, TrimReport, essentialize_chain,
                        full_corner_pair, fully_invariant_trace, kernel_quotient_rounds, min_fully_invariant,
                        preimage_ideal, proper_corner_pair, quotient_pair, trim_chain)
from .search import (SearchCaps, SearchOutcome, SSEChain, Status, check_certificate, factor_elementary,
                     search_aligned, search_se, search_se_upto, search_sse_chain)
from .shifts import (CheckResult, ConcreteShift, ShiftClassification, build_lag1_compatible,
                     check_intermediate_identity, classify, is_aligned, is_balanced, is_compatible,
                     validate_concrete_shift)

__version__ = "0.1.0"
