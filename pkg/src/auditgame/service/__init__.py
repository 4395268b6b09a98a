"""HTTP layer: pydantic schemas, command handlers, FastAPI app."""

from .app import create_app
from .handlers import (
    handle_equilibrium,
    handle_oracle_check,
    handle_solve_auditor,
    handle_sweep,
    handle_verify_dp,
)

__all__ = [
    "create_app",
    "handle_solve_auditor",
    "handle_equilibrium",
    "handle_sweep",
    "handle_oracle_check",
    "handle_verify_dp",
]
