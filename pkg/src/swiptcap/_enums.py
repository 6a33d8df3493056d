from __future__ import annotations

from enum import IntEnum

from typing_extensions import Self


class _Lookup(IntEnum):
    @classmethod
    def get(cls, key: str | int | None = None, default: str | int | None = None) -> Self:
        """
        Get a member by its name (any case) or number.

        Parameters
        ----------
        key : str | int, optional
            The key to retrieve.
        default : str | int, optional
            Used when `key` is missing or unknown. The first member is used
            when `default` is missing or unknown too.

        Returns
        -------
        Self
            The matching member.
        """
        for candidate in (key, default):
            match candidate:
                case str() if candidate.upper() in cls.__members__:
                    return cls[candidate.upper()]
                case int():
                    try:
                        return cls(candidate)
                    except ValueError:
                        continue
        return next(iter(cls))


class SolveStatus(_Lookup):
    """Outcome of a capacity solve."""

    OPTIMAL = 0
    """The returned distribution passed the optimality conditions."""
    INFEASIBLE = 1
    """At least one harvesting demand cannot be met by any admissible distribution."""
    MAX_ITERATIONS = 2
    """The iteration budget ran out; the best iterate is attached."""


class Signalling(_Lookup):
    """Transmit signalling. The number is the count of real signal dimensions."""

    REAL = 1
    """Real scalar symbols on [-A, A]."""
    COMPLEX = 2
    """Complex symbols; only the amplitude on [0, A] is optimized, the phase is uniform."""
