"""Model planning problems with array fluents, Count expressions, and
bounded-integer action parameters; lower them through an ordered compiler
pipeline to plain grounded problems; solve, validate, and export PDDL."""

from .compilers import CompilationResult
from .compilers.arrays import UndefinednessMode, flatten_arrays
from .compilers.counts import remove_counts
from .compilers.intparams import ground_int_params
from .errors import (
    CompilationError,
    FormatError,
    ModelError,
    OutOfRangeError,
    PddlError,
    PlanError,
    PlanforgeError,
    SearchLimitExceeded,
)
from .model import (
    BOOL,
    Action,
    And,
    ArrayType,
    BoolType,
    Count,
    Effect,
    Equals,
    Expr,
    FALSE,
    Fluent,
    GE,
    GT,
    Iff,
    Implies,
    Int,
    IntType,
    LE,
    LT,
    Minus,
    Not,
    Object,
    Or,
    Param,
    Plan,
    PlanStep,
    Plus,
    Problem,
    State,
    TRUE,
    Times,
    TypeExpr,
    UserType,
    ground_fluents,
)
from .evaluation import evaluate, simplify, substitute
from .pipeline import FeatureSet, PipelineResult, compile, map_plan_back, scan_features
from .search import SearchStats, ValidationReport, solve, validate

__version__ = "0.1.0"
