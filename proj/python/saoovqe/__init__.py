"""State-averaged orbital-optimized VQE on a statevector simulator."""

from ._core import (
    ActiveSpace,
    ConfigError,
    DimensionError,
    Error,
    Integrals,
    NumericalError,
    ParseError,
    PauliSum,
    Result,
    config_json,
    exact_eigenvalues,
    parse_fcidump,
    parse_pauli_sum,
    read_fcidump,
    run_command,
    run_sa_oo_vqe,
    write_fcidump,
)

__all__ = [
    "ActiveSpace",
    "ConfigError",
    "DimensionError",
    "Error",
    "Integrals",
    "NumericalError",
    "ParseError",
    "PauliSum",
    "Result",
    "config_json",
    "exact_eigenvalues",
    "parse_fcidump",
    "parse_pauli_sum",
    "read_fcidump",
    "run_command",
    "run_sa_oo_vqe",
    "write_fcidump",
]
