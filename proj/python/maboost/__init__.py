"""Mirror-ascent boosting: Bregman projections, boosters and the CLI."""

from ._core import (
    BoundViolation,
    ConfigError,
    Dataset,
    DegenerateInputError,
    DomainError,
    Ensemble,
    Error,
    NoWeakLearnabilityError,
    ParseError,
    RunResult,
    divergence,
    gen_blobs,
    gen_combined,
    gen_diagonal,
    gen_noisy,
    load_csv,
    load_libsvm,
    project_capped,
    project_double,
    project_hypercube,
    project_mixed,
    project_orthant_l1,
    project_simplex,
    run_cli,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]
