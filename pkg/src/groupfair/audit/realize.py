"""Turn characterization witnesses back into concrete profiles."""

from __future__ import annotations

from typing import Sequence

from ..domain import Interval, Preference, preference_with_peak
from ..errors import IndexOutOfRange
from ..groups import Gamma, GroupStructure


def preference_with_top(m: int, peak: int, interval: Interval) -> Preference:
    """A single-peaked preference whose top |interval| alternatives are ``interval``."""
    if peak not in interval or interval.hi > m:
        raise IndexOutOfRange(f"peak a{peak} not inside {interval} or interval beyond a{m}")
    order = [peak]
    lo, hi = peak - 1, peak + 1
    while lo >= interval.lo:
        order.append(lo)
        lo -= 1
    while hi <= interval.hi:
        order.append(hi)
        hi += 1
    while lo >= 1:
        order.append(lo)
        lo -= 1
    while hi <= m:
        order.append(hi)
        hi += 1
    return Preference(tuple(order))


def realize_chain(
    groups: GroupStructure,
    m: int,
    q: int,
    group_peaks: Sequence[int],
    x: int,
    kappa: int,
    chain: Sequence[Gamma],
) -> tuple[Preference, ...]:
    """Profile whose per-group counts follow ``chain`` around [a_x, a_{x+kappa-1}].

    Group ``q`` (0-based) takes ``group_peaks``. In any other group h,
    chain[0][h] agents sit left of a_x, chain[t+1][h] - chain[t][h] sit at
    a_{x+t} and the rest sit right of a_{x+kappa-1}. Left and right
    positions clamp to a_1 and a_m; the prefix masses read there are 0 and
    1 whatever the counts, so clamping never changes the value checked.
    """
    pk = [0] * groups.n
    for i, a in zip(groups.groups[q], sorted(group_peaks)):
        pk[i - 1] = a
    left, right = max(x - 1, 1), min(x + kappa, m)
    for h, members in enumerate(groups.groups):
        if h == q:
            continue
        spots = [left] * chain[0][h]
        for t in range(len(chain) - 1):
            spots += [x + t] * (chain[t + 1][h] - chain[t][h])
        spots += [right] * (len(members) - chain[-1][h])
        for i, a in zip(members, spots):
            pk[i - 1] = a
    return tuple(preference_with_peak(m, a) for a in pk)
