"""Agent partitions, per-group fairness parameters and the Gamma lattice."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Iterator, Sequence

from .domain import DEFAULT_GUARD, SizeGuard
from .errors import DimensionMismatch, InputError, SizeGuardExceeded

if TYPE_CHECKING:
    from .representatives import RepSpec

Gamma = tuple[int, ...]


@dataclass(frozen=True)
class GroupStructure:
    """Ordered partition of agents 1..n.

    ``kappa``, ``eta`` and ``psi`` are only needed for fairness audits and
    constructors; rule evaluation uses the partition alone.
    """

    groups: tuple[tuple[int, ...], ...]
    kappa: tuple[int, ...] | None = None
    eta: tuple[Fraction, ...] | None = None
    psi: tuple["RepSpec", ...] | None = None

    def __post_init__(self) -> None:
        groups = tuple(tuple(sorted(int(i) for i in g)) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        if not groups or any(not g for g in groups):
            raise InputError("groups must be nonempty")
        agents = sorted(i for g in groups for i in g)
        if agents != list(range(1, len(agents) + 1)):
            raise InputError(f"groups must partition 1..n, got {list(groups)}")
        k = len(groups)
        if self.kappa is not None:
            kappa = tuple(int(x) for x in self.kappa)
            if len(kappa) != k or any(x < 1 for x in kappa):
                raise InputError(f"bad kappa {kappa}")
            object.__setattr__(self, "kappa", kappa)
        if self.eta is not None:
            eta = tuple(Fraction(x) for x in self.eta)
            if len(eta) != k or any(not 0 <= x <= 1 for x in eta):
                raise InputError(f"bad eta {eta}")
            object.__setattr__(self, "eta", eta)
        if self.psi is not None:
            psi = tuple(self.psi)
            if len(psi) != k:
                raise InputError("one representative function per group is required")
            if self.kappa is not None and any(
                s.kappa != x for s, x in zip(psi, self.kappa)
            ):
                raise InputError("psi kappa disagrees with group kappa")
            for s, members in zip(psi, groups):
                s.check_group(len(members))
            if self.kappa is None:
                object.__setattr__(self, "kappa", tuple(s.kappa for s in psi))
            object.__setattr__(self, "psi", psi)

    @classmethod
    def singletons(cls, n: int, **params) -> "GroupStructure":
        return cls(tuple((i,) for i in range(1, n + 1)), **params)

    @classmethod
    def single(cls, n: int, **params) -> "GroupStructure":
        return cls((tuple(range(1, n + 1)),), **params)

    @property
    def n(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)

    @property
    def bottom(self) -> Gamma:
        return (0,) * self.k

    @property
    def top(self) -> Gamma:
        return self.sizes

    @property
    def is_singletons(self) -> bool:
        return all(len(g) == 1 for g in self.groups)

    @cached_property
    def group_of(self) -> dict[int, int]:
        return {i: q for q, g in enumerate(self.groups) for i in g}

    def check_m(self, m: int) -> None:
        if self.kappa is not None and any(x > m for x in self.kappa):
            raise InputError(f"kappa {self.kappa} exceeds m={m}")
        if self.psi is not None:
            for s, members in zip(self.psi, self.groups):
                s.check_group(len(members), m)

    def require_fairness_params(self) -> None:
        if self.kappa is None or self.eta is None or self.psi is None:
            raise InputError("kappa, eta and psi are required for this operation")

    def with_params(self, kappa=None, eta=None, psi=None) -> "GroupStructure":
        return GroupStructure(
            self.groups,
            kappa if kappa is not None else (None if psi is not None else self.kappa),
            eta if eta is not None else self.eta,
            psi if psi is not None else self.psi,
        )

    def gammas(self, guard: SizeGuard = DEFAULT_GUARD) -> tuple[Gamma, ...]:
        return enumerate_gamma(self, guard)


def enumerate_gamma(groups: GroupStructure, guard: SizeGuard = DEFAULT_GUARD) -> tuple[Gamma, ...]:
    """All Gamma vectors in lexicographic order (bottom first, top last)."""
    count = 1
    for s in groups.sizes:
        count *= s + 1
    if count > 2**guard.max_n:
        raise SizeGuardExceeded(f"|Gamma|={count} exceeds guard {2**guard.max_n}")
    return tuple(itertools.product(*(range(s + 1) for s in groups.sizes)))


def dominates(g1: Sequence[int], g2: Sequence[int]) -> bool:
    """g1 >> g2: componentwise >=."""
    if len(g1) != len(g2):
        raise DimensionMismatch(f"{tuple(g1)} vs {tuple(g2)}")
    return all(x >= y for x, y in zip(g1, g2))


def chains_through(gammas: Sequence[Sequence[int]]) -> bool:
    """True iff every vector dominates its predecessor."""
    if not gammas:
        raise InputError("empty chain")
    return all(dominates(b, a) for a, b in zip(gammas, gammas[1:]))


def enumerate_chains(groups: GroupStructure, length: int) -> Iterator[tuple[Gamma, ...]]:
    """Every chain gamma^0 << ... << gamma^(length-1) (repeats allowed)."""
    per_group = [
        list(itertools.combinations_with_replacement(range(s + 1), length))
        for s in groups.sizes
    ]
    for combo in itertools.product(*per_group):
        yield tuple(zip(*combo))


def subset_to_gamma(subset, n: int) -> Gamma:
    """Singleton-groups bijection S -> indicator vector."""
    return tuple(int(i in subset) for i in range(1, n + 1))


def gamma_to_subset(gamma: Sequence[int]) -> frozenset[int]:
    return frozenset(i for i, x in enumerate(gamma, start=1) if x)
