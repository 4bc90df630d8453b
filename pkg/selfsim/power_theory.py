"""
Power structure of finite p-groups: omega and agemo sets and subgroups, the
power-abelian conditions, and the powerful, potent and regular predicates.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from .group_core import (
    GroupTable, Subgroup, _closure_mask, commutator_subgroup, derived_subgroup,
    lower_central, require_p_group, subgroup_generated,
)

logger = logging.getLogger(__name__)


def omega_set(G: GroupTable, p: int, n: int) -> np.ndarray:
    """Ids of the g with g^(p^n) = 1."""
    require_p_group(G, p)
    return np.flatnonzero(G.power_map(p ** n) == 0)


def omega_subgroup(G: GroupTable, p: int, n: int) -> Subgroup:
    return subgroup_generated(G, omega_set(G, p, n).tolist())


def agemo(G: GroupTable, p: int, n: int) -> Tuple[np.ndarray, Subgroup]:
    """The set of p^n-th powers and the subgroup it generates."""
    require_p_group(G, p)
    powers = np.unique(G.power_map(p ** n))
    return powers, subgroup_generated(G, powers.tolist())


def agemo_of(G: GroupTable, S: Subgroup, p: int, n: int = 1) -> Subgroup:
    """The subgroup generated by p^n-th powers of the members of S."""
    return subgroup_generated(G, np.unique(G.power_map(p ** n)[S.members]).tolist())


@dataclass
class PowerLevel:
    n: int
    omega_set_size: int
    omega_is_subgroup: bool
    omega_subgroup_size: int
    agemo_set_size: int
    agemo_set_is_subgroup: bool
    agemo_subgroup_size: int
    index_match: bool

    @property
    def holds(self) -> bool:
        return self.omega_is_subgroup and self.agemo_set_is_subgroup and self.index_match


@dataclass
class PowerProfile:
    p: int
    order: int
    exponent: int
    levels: List[PowerLevel] = field(default_factory=list)

    @property
    def power_abelian(self) -> bool:
        return all(level.holds for level in self.levels)

    def level(self, n: int) -> PowerLevel:
        for level in self.levels:
            if level.n == n:
                return level
        raise KeyError(f"no level n={n} (exponent {self.exponent})")

    def to_dict(self) -> dict:
        return {
            'p': self.p,
            'order': self.order,
            'exponent': self.exponent,
            'power_abelian': self.power_abelian,
            'levels': [asdict(level) for level in self.levels],
        }

    def to_frame(self) -> pd.DataFrame:
        columns = [f.name for f in PowerLevel.__dataclass_fields__.values()]
        frame = pd.DataFrame([asdict(level) for level in self.levels], columns=columns)
        return frame.set_index('n')


def power_profile(G: GroupTable, p: int) -> PowerProfile:
    """One PowerLevel for every n with p^n <= exp(G)."""
    require_p_group(G, p)
    profile = PowerProfile(p, G.order, G.exponent)
    n = 1
    while p ** n <= G.exponent:
        omegas = omega_set(G, p, n)
        omega_sub = subgroup_generated(G, omegas.tolist())
        powers, agemo_sub = agemo(G, p, n)
        profile.levels.append(PowerLevel(
            n=n,
            omega_set_size=int(omegas.size),
            omega_is_subgroup=omega_sub.order == omegas.size,
            omega_subgroup_size=omega_sub.order,
            agemo_set_size=int(powers.size),
            agemo_set_is_subgroup=agemo_sub.order == powers.size,
            agemo_subgroup_size=agemo_sub.order,
            index_match=agemo_sub.order * omega_sub.order == G.order,
        ))
        n += 1
    return profile


def power_abelian(G: GroupTable, p: int) -> PowerProfile:
    """The profile; ``.power_abelian`` is the verdict."""
    return power_profile(G, p)


def is_powerful(G: GroupTable, p: int) -> bool:
    """[G,G] <= G^p, or [G,G] <= G^4 when p = 2."""
    require_p_group(G, p)
    _, powers = agemo(G, p, 2 if p == 2 else 1)
    return derived_subgroup(G).issubset(powers)


def is_potent(G: GroupTable, p: int) -> bool:
    """gamma_{p-1}(G) <= G^p for odd p, [G,G] <= G^4 when p = 2."""
    require_p_group(G, p)
    if p == 2:
        _, powers = agemo(G, 2, 2)
        return derived_subgroup(G).issubset(powers)
    _, powers = agemo(G, p, 1)
    return lower_central(G, p - 1).issubset(powers)


def regularity_violations(G: GroupTable, p: int, limit: int = 1) -> List[Tuple[int, int]]:
    """
    Pairs (a, b) with (ab)^p outside a^p b^p agemo_1([K, K]) for K = <a, b>,
    at most ``limit`` of them in id order.
    """
    require_p_group(G, p)
    table = G.table
    powers = G.power_map(p)
    lhs = powers[table]                                  # (ab)^p
    rhs = table[powers[:, None], powers[None, :]]        # a^p b^p
    quotient = table[G.inv[rhs], lhs]                    # (a^p b^p)^-1 (ab)^p
    pending = np.argwhere(quotient != 0)
    logger.debug("%s: %d of %d pairs need the full regularity test", G.name, len(pending), G.order ** 2)

    cache: Dict[bytes, np.ndarray] = {}
    found: List[Tuple[int, int]] = []
    for a, b in pending:
        a, b = int(a), int(b)
        K = Subgroup.from_mask(G, _closure_mask(G, [a, b]))
        allowed = cache.get(K.key)
        if allowed is None:
            allowed = agemo_of(G, commutator_subgroup(G, K, K), p).mask
            cache[K.key] = allowed
        if not allowed[quotient[a, b]]:
            found.append((a, b))
            if len(found) >= limit:
                break
    return found


def is_regular(G: GroupTable, p: int) -> bool:
    """Hall's condition over every pair of elements."""
    return not regularity_violations(G, p, limit=1)
