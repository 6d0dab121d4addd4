"""Typical ranks of real 3-tensors: tables, certified slice completion,
an exact Jacobian check for m = 3 and Monte-Carlo rank experiments."""

__version__ = "0.1.0"

from .errors import (CertificateNotFound, CostGuard, GenericityFailed, ModeMismatch, NotInV1,
                     OracleInapplicable, SearchExhausted, SingularMatrix, TrankError, Uncovered,
                     WrongShape)
from .tensor import (F64, RATIONAL, Tensor3, cp_compose, fl1, fl1_inv, fl2, fl2_inv, from_slices,
                     load_tensor, permute_modes, rank_one, save_tensor)
from .poly import MultiPoly, det_poly_matrix, pencil, pencil_determinant
from .irreducible import IrreducibilityCertificate, absolutely_irreducible
from .rank_tables import TypicalRankResult, hurwitz_decompose, rho, typical_ranks
from .genericity import GenericityReport, in_cone, in_T_frak, in_W, in_W2
from .completion import (CompletionReport, certify_rank_equals_p0, complete_with_certificate,
                         map_f, map_g)
from .jacobian import (JacobianReport, PVector, SPoint, build_Y1, build_Y2, dimension_check, gamma,
                       jacobian, verify_closed_forms)
from .estimation import (CPModel, FitReport, RankHistogram, als_fit, monte_carlo, numeric_rank,
                         pencil_rank_oracle)
