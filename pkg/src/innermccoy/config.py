"""Budgets, overridable through environment variables.

``INNERMCCOY_ENUM_BUDGET``    max elements for exhaustive sweeps (default 2**24)
``INNERMCCOY_BASIS_LIMIT``    max basis words of a truncated algebra (default 4096)
``INNERMCCOY_SOLVER_BUDGET``  max unknowns of a single kernel solve (default 4096)
``INNERMCCOY_REWRITE_STEPS``  max rewrite steps for one normal form (default 10**6)
"""

from __future__ import annotations

import os
from dataclasses import dataclass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    return int(raw, 0)


@dataclass(frozen=True)
class Budgets:
    enumeration: int = 2**24
    basis_limit: int = 4096
    solver_unknowns: int = 4096
    rewrite_steps: int = 10**6

    @classmethod
    def from_env(cls) -> "Budgets":
        return cls(
            enumeration=_env_int("INNERMCCOY_ENUM_BUDGET", cls.enumeration),
            basis_limit=_env_int("INNERMCCOY_BASIS_LIMIT", cls.basis_limit),
            solver_unknowns=_env_int("INNERMCCOY_SOLVER_BUDGET", cls.solver_unknowns),
            rewrite_steps=_env_int("INNERMCCOY_REWRITE_STEPS", cls.rewrite_steps),
        )


def budgets() -> Budgets:
    return Budgets.from_env()
