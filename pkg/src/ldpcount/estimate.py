"""Mechanism output record."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .netsim import CommLedger, Transcript
from .privacy import PrivacyAccountant


@dataclass
class Estimate:
    """Result of one mechanism execution.

    ``value`` is a float for noisy runs and an exact ``int``/``Fraction`` for
    noiseless ones.
    """

    value: float | int | Fraction
    epsilon: float
    rounds: int
    ledger: CommLedger = field(default_factory=CommLedger)
    accountant: PrivacyAccountant = field(default_factory=PrivacyAccountant)
    exact: int | None = None
    transcript: Transcript | None = None
    meta: dict = field(default_factory=dict)

    @property
    def comm_bytes(self) -> int:
        return self.ledger.total_bytes

    @property
    def rel_error(self) -> float | None:
        if self.exact is None or self.exact == 0:
            return None
        return abs(float(self.value) - self.exact) / self.exact


def exact_or_float(x):
    """Collapse an exact rational to ``int`` when integral."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x
