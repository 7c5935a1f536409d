"""Independent checks: exhaustive egalitarian optimum, fPO certificate, fairness audit."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    DiscreteAllocation,
    FractionalAllocation,
    Instance,
    StructuralError,
    utilities,
)
from .lp import pareto_optimum_value

DEFAULT_LIMIT = 10 ** 6

EGALITARIAN = "egalitarian"
PROPORTIONAL = "proportional"


class EnumerationTooLarge(ValueError):
    pass


def brute_force_egalitarian(instance: Instance, limit: int = DEFAULT_LIMIT
                            ) -> tuple[DiscreteAllocation, Fraction]:
    """Best discrete max-min allocation by trying all ``n**m`` owner vectors.

    The lexicographically smallest owner vector wins ties.
    """
    n, m = instance.n, instance.m
    if n ** m > limit:
        raise EnumerationTooLarge(f"{n}^{m} allocations exceed the limit of {limit}")
    rows = instance.valuations
    best, best_value = None, None
    for owner in itertools.product(range(n), repeat=m):
        totals = [Fraction(0)] * n
        for o, a in enumerate(owner):
            totals[a] += rows[a][o]
        value = min(totals)
        if best_value is None or value > best_value:
            best, best_value = owner, value
    return DiscreteAllocation(best, n), best_value


def certify_fpo(instance: Instance, z) -> bool:
    """True iff no allocation weakly dominating ``z`` has a larger utility sum.

    That is exactly fractional Pareto optimality: any strict Pareto
    improvement would raise the sum.
    """
    achieved = sum(utilities(instance, z), Fraction(0))
    return pareto_optimum_value(instance, z) == achieved


@dataclass(frozen=True)
class AgentReport:
    agent: str
    baseline: Fraction
    achieved: Fraction
    deficit: Fraction
    max_abs_object: Fraction
    up_to_one_satisfied: bool


@dataclass(frozen=True)
class FairnessReport:
    mode: str
    agents: tuple[AgentReport, ...]
    egalitarian_value: Optional[Fraction]
    brute_force_value: Optional[Fraction]
    fpo_certified: bool

    @property
    def up_to_one(self) -> bool:
        return all(a.up_to_one_satisfied for a in self.agents)

    @property
    def violators(self) -> list[str]:
        return [a.agent for a in self.agents if not a.up_to_one_satisfied]

    @property
    def passed(self) -> bool:
        return self.fpo_certified and self.up_to_one


def audit(instance: Instance, baseline: Optional[FractionalAllocation], z: DiscreteAllocation,
          mode: str = EGALITARIAN, *, egalitarian_value: Optional[Fraction] = None,
          brute_force_value: Optional[Fraction] = None) -> FairnessReport:
    """Compare ``z`` agent by agent with a fractional baseline.

    In proportional mode the baseline utility is ``u_i(O)/n`` and
    ``baseline`` may be omitted.
    """
    if z.n != instance.n or z.m != instance.m:
        raise StructuralError("allocation does not match instance")
    if mode == PROPORTIONAL:
        base = tuple(instance.total_value(i) / instance.n for i in range(instance.n))
    elif mode == EGALITARIAN:
        if baseline is None:
            raise ValueError("egalitarian audit needs the fractional baseline")
        base = utilities(instance, baseline)
    else:
        raise ValueError(f"unknown audit mode {mode!r}")
    got = utilities(instance, z)
    rows = []
    for i in range(instance.n):
        slack = instance.max_abs_value(i)
        rows.append(AgentReport(instance.agents[i], base[i], got[i], base[i] - got[i], slack,
                                got[i] >= base[i] - slack))
    return FairnessReport(mode, tuple(rows), egalitarian_value, brute_force_value,
                          certify_fpo(instance, z))
