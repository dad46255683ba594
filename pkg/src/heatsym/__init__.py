"""heatsym: symmetry toolkit for half-line nonlinear heat boundary value problems.

The package checks invariance of problems u_t = (d(u) u_x)_x on x > 0 with a
prescribed flux d(u) u_x = q(t) at x = 0 and u = u_inf at x = +inf under
one-parameter point transformation groups, classifies which groups a given
(d, q, u_inf) admits, performs the similarity reduction for power-law
diffusivities, evaluates/solves the reduced problem (including the exact
parametric branch for d = u**(-3/2)), and cross-validates everything against
a direct finite-difference solver.
"""

from .bvp import (
    BVPSpec,
    EquivalenceTransform,
    apply_equivalence,
    dump_spec,
    load_spec_file,
    map_solution,
    normalize_q0,
    parse_spec_text,
)
from .errors import (
    BracketError,
    ConstraintError,
    DomainError,
    HeatsymError,
    SingularTransformError,
    SolverAbort,
    SpecFileError,
    UnsupportedFormError,
)
from .groups import (
    GroupFamily,
    Jet,
    Tc,
    Td,
    Te,
    Tk,
    Tke,
    Tkp,
    Tt,
    Tx,
    VectorField,
    apply,
    generator,
    linear_combination_group,
    parse_group,
    prolong2,
)
from .symfun import (
    Affine,
    Const,
    Exp,
    FuncForm,
    Mobius,
    Power,
    RandomSmooth,
    Zero,
    derivative,
    evaluate,
    format_form,
    limit_at_pos_infinity,
    parse_form,
)

__version__ = "0.1.0"
