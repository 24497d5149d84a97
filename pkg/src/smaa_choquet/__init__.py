"""Multicriteria ranking under the Choquet integral preference model.

Compiles decision-maker statements into linear constraints over Mobius
coefficients, samples the compatible-capacity polytope (and, when needed,
common scales) and accumulates stochastic acceptability indices.
"""

__version__ = "0.1.0"

from .capacity import (  # noqa: F401
    Alternative,
    CapacityView,
    Criterion,
    MobiusCapacity,
    capacity_view,
    choquet_capacity,
    choquet_mobius,
    interaction,
    mobius_from_capacity,
    mu_from_mobius,
    shapley,
    validate,
)
from .preference import (  # noqa: F401
    LinearConstraintSystem,
    PreferenceStatement,
    StatementKind,
    check_compatibility,
    compile_mb,
    compile_preferences,
    compile_system,
    parse_statement,
)
from .problem import Problem, ProblemFile, load_problem_file  # noqa: F401
from .smaa import RunConfig, SmaaResults, run  # noqa: F401
