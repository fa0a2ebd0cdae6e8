"""Global guards for enumerative routines.

Every routine that enumerates solution sets or builds a linear system checks
against these caps and raises TooLarge instead of hanging. The CLI can
override max_candidates per invocation.
"""

from dataclasses import dataclass


@dataclass
class Guard:
    # cap on explicitly enumerated candidate/solution lists
    max_candidates: int = 1 << 20
    # cap on rows * cols of a single dense linear system
    max_system_cells: int = 1 << 28


GUARD = Guard()


def set_max_candidates(n: int) -> None:
    if n < 1:
        raise ValueError("max_candidates must be positive")
    GUARD.max_candidates = n
