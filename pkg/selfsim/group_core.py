"""
Exact arithmetic for finite groups given by permutation generators.

Groups are materialised in full: every element is stored as a row of point
images, ids follow a breadth-first closure from the identity, and the product
table is built lazily (up to ``table_limit`` elements) so that subgroup
machinery runs on vectorised numpy lookups.

Composition is left to right: ``x * y`` means "apply x, then y", so the image
of point i under ``x * y`` is ``y[x[i]]``.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint, isprime, multiplicity

from .error_handler import CapExceeded, DegreeMismatch, NotAPGroup, TooLarge

logger = logging.getLogger(__name__)

DEFAULT_CLOSURE_CAP = 250_000
DEFAULT_TABLE_LIMIT = 4096
ALL_SUBGROUPS_LIMIT = 32


@dataclass(frozen=True)
class Perm:
    """A permutation of {0, ..., degree-1} stored as its image list."""

    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a bijection on {len(images)} points: {images}")
        object.__setattr__(self, 'images', images)

    @classmethod
    def identity(cls, degree: int) -> 'Perm':
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> 'Perm':
        images = list(range(degree))
        seen = set()
        for cycle in cycles:
            cycle = [int(c) for c in cycle]
            for point in cycle:
                if point < 0 or point >= degree or point in seen:
                    raise ValueError(f"bad cycle {cycle} for degree {degree}")
                seen.add(point)
            for i, point in enumerate(cycle):
                images[point] = cycle[(i + 1) % len(cycle)]
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def then(self, other: 'Perm') -> 'Perm':
        """self first, then other"""
        if other.degree != self.degree:
            raise DegreeMismatch("cannot compose permutations of different degree",
                                 left=self.degree, right=other.degree)
        return Perm(tuple(other.images[i] for i in self.images))

    __mul__ = then

    def inverse(self) -> 'Perm':
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> List[Tuple[int, ...]]:
        """Nontrivial cycles, each starting at its least point."""
        seen = set()
        result = []
        for start in range(self.degree):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            point = self.images[start]
            while point != start:
                cycle.append(point)
                seen.add(point)
                point = self.images[point]
            if len(cycle) > 1:
                result.append(tuple(cycle))
        return result

    def order(self) -> int:
        return lcm(*(len(c) for c in self.cycles())) if not self.is_identity() else 1

    def cycle_string(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycles)

    def __str__(self):
        return self.cycle_string()


def _point_dtype(degree: int):
    if degree <= 256:
        return np.uint8
    if degree <= 65536:
        return np.uint16
    return np.int32


class GroupTable:
    """
    A fully enumerated finite permutation group.

    Element 0 is the identity. ``gen_ids`` are the ids of the generators in
    input order. Everything else (product table, inverses, element orders) is
    derived on first use and never changes afterwards.
    """

    def __init__(self, degree: int, perms: np.ndarray, index: Dict[bytes, int],
                 gen_ids: Sequence[int], right: np.ndarray, parent: np.ndarray,
                 parent_gen: np.ndarray, prime_hint: Optional[int] = None,
                 labels: Optional[Dict[str, int]] = None, name: Optional[str] = None,
                 table_limit: int = DEFAULT_TABLE_LIMIT):
        self.degree = degree
        self._perms = perms
        self._index = index
        self.gen_ids = tuple(int(g) for g in gen_ids)
        self._right = right
        self._parent = parent
        self._parent_gen = parent_gen
        self.prime_hint = prime_hint
        self.labels = dict(labels or {})
        self.name = name or f"group{len(perms)}"
        self.table_limit = table_limit

    def __repr__(self):
        return f"GroupTable(name={self.name!r}, order={self.order}, degree={self.degree})"

    def __len__(self):
        return self.order

    @property
    def order(self) -> int:
        return len(self._perms)

    @property
    def identity(self) -> int:
        return 0

    @property
    def perms(self) -> np.ndarray:
        """Read-only view of the point images, one row per element."""
        view = self._perms.view()
        view.flags.writeable = False
        return view

    def perm(self, x: int) -> Perm:
        return Perm(tuple(int(i) for i in self._perms[x]))

    @cached_property
    def elements(self) -> List[Perm]:
        return [self.perm(x) for x in range(self.order)]

    def find(self, images) -> Optional[int]:
        """Id of the element with the given point images, or None."""
        row = np.asarray(images, dtype=self._perms.dtype)
        if row.shape != (self.degree,):
            return None
        return self._index.get(row.tobytes())

    def label_of(self, x: int) -> str:
        for name, element in self.labels.items():
            if element == x:
                return name
        return "e" if x == 0 else f"g{x}"

    @cached_property
    def table(self) -> np.ndarray:
        """Full product table, ``table[x, y]`` is the id of x*y."""
        n = self.order
        if n > self.table_limit:
            raise TooLarge(f"{self.name}: product table needs order <= {self.table_limit}",
                           order=n, table_limit=self.table_limit)
        columns = np.empty((n, n), dtype=np.int32)
        columns[0] = np.arange(n)
        # y = parent(y) * g, so x*y = (x*parent(y)) * g
        for y in range(1, n):
            columns[y] = self._right[self._parent_gen[y]][columns[self._parent[y]]]
        table = np.ascontiguousarray(columns.T)
        table.flags.writeable = False
        logger.debug("built %dx%d product table for %s", n, n, self.name)
        return table

    def has_table(self) -> bool:
        return self.order <= self.table_limit

    def mul(self, x: int, y: int) -> int:
        if self.has_table():
            return int(self.table[x, y])
        return self._index[self._perms[y][self._perms[x]].tobytes()]

    @cached_property
    def inv(self) -> np.ndarray:
        n, d = self._perms.shape
        rows = np.empty_like(self._perms)
        np.put_along_axis(rows, self._perms.astype(np.int64),
                          np.broadcast_to(np.arange(d, dtype=self._perms.dtype), (n, d)), axis=1)
        inv = np.fromiter((self._index[row.tobytes()] for row in rows), dtype=np.int64, count=n)
        inv.flags.writeable = False
        return inv

    def inverse(self, x: int) -> int:
        return int(self.inv[x])

    @cached_property
    def order_of(self) -> np.ndarray:
        n, d = self._perms.shape
        orders = np.zeros(n, dtype=np.int64)
        ident = np.arange(d, dtype=self._perms.dtype)
        pending = np.arange(n)
        current = self._perms.copy()
        k = 1
        while pending.size:
            hit = (current == ident).all(axis=1)
            orders[pending[hit]] = k
            pending = pending[~hit]
            current = current[~hit]
            current = np.take_along_axis(self._perms[pending], current.astype(np.int64), axis=1)
            k += 1
        orders.flags.writeable = False
        return orders

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.order_of))

    @cached_property
    def is_abelian(self) -> bool:
        gens = [self._perms[g].astype(np.int64) for g in self.gen_ids]
        for i, x in enumerate(gens):
            for y in gens[i + 1:]:
                if not np.array_equal(y[x], x[y]):
                    return False
        return True

    def power_map(self, k: int) -> np.ndarray:
        """Ids of g**k for every element g (k >= 0)."""
        table = self.table
        result = np.zeros(self.order, dtype=np.int64)
        base = np.arange(self.order, dtype=np.int64)
        while k:
            if k & 1:
                result = table[result, base].astype(np.int64)
            base = table[base, base].astype(np.int64)
            k >>= 1
        return result


def closure(generators: Sequence, cap: int = DEFAULT_CLOSURE_CAP, *,
            prime_hint: Optional[int] = None, labels: Optional[Dict[str, int]] = None,
            name: Optional[str] = None, table_limit: int = DEFAULT_TABLE_LIMIT) -> GroupTable:
    """
    Breadth-first product closure of permutation generators.

    Elements are numbered in discovery order: the queue is processed element
    by element and each element is multiplied by the generators in input
    order, so the same generator list always yields the same numbering.
    ``labels`` may name generators by their position in ``generators``.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    gens = [g if isinstance(g, Perm) else Perm(tuple(g)) for g in generators]
    if not gens:
        raise ValueError("closure needs at least one generator")
    degree = gens[0].degree
    for g in gens:
        if g.degree != degree:
            raise DegreeMismatch("generators act on different point counts",
                                 expected=degree, found=g.degree)

    dtype = _point_dtype(degree)
    gen_arr = np.array([g.images for g in gens], dtype=dtype)
    identity = np.arange(degree, dtype=dtype)
    rows = [identity]
    index = {identity.tobytes(): 0}
    parent = [-1]
    parent_gen = [-1]
    right: List[List[int]] = [[] for _ in gens]

    start = 0
    while start < len(rows):
        stop = len(rows)
        frontier = np.array(rows[start:stop], dtype=dtype)
        products = gen_arr[:, frontier]  # (gens, frontier, degree): x then g
        for r in range(stop - start):
            x = start + r
            for k in range(len(gens)):
                row = products[k, r]
                key = row.tobytes()
                y = index.get(key)
                if y is None:
                    y = len(rows)
                    if y >= cap:
                        raise CapExceeded(f"closure exceeds cap of {cap} elements",
                                          cap=cap, name=name)
                    index[key] = y
                    rows.append(row.copy())
                    parent.append(x)
                    parent_gen.append(k)
                right[k].append(y)
        start = stop

    perms = np.array(rows, dtype=dtype)
    perms.flags.writeable = False
    gen_ids = [right[k][0] for k in range(len(gens))]
    named = {label: gen_ids[pos] for label, pos in (labels or {}).items()}
    group = GroupTable(degree, perms, index, gen_ids, np.array(right, dtype=np.int32),
                       np.array(parent, dtype=np.int64), np.array(parent_gen, dtype=np.int64),
                       prime_hint=prime_hint, labels=named, name=name, table_limit=table_limit)
    logger.debug("closure of %d generators on %d points: %d elements", len(gens), degree, group.order)
    if prime_hint is not None:
        require_p_group(group, prime_hint)
    return group


class Subgroup:
    """
    A subgroup of a GroupTable, stored as a sorted id array plus a boolean
    membership mask over the parent's ids.
    """

    def __init__(self, parent: GroupTable, members, gens: Optional[Sequence[int]] = None):
        self.parent = parent
        self.members = np.unique(np.asarray(members, dtype=np.int64))
        self.members.flags.writeable = False
        self._gens = None if gens is None else tuple(int(g) for g in gens)

    @classmethod
    def from_mask(cls, parent: GroupTable, mask: np.ndarray,
                  gens: Optional[Sequence[int]] = None) -> 'Subgroup':
        sub = cls(parent, np.flatnonzero(mask), gens)
        sub.__dict__['mask'] = mask.copy()
        sub.mask.flags.writeable = False
        return sub

    @cached_property
    def mask(self) -> np.ndarray:
        mask = np.zeros(self.parent.order, dtype=bool)
        mask[self.members] = True
        mask.flags.writeable = False
        return mask

    @property
    def gens(self) -> Tuple[int, ...]:
        if self._gens is None:
            self._gens = tuple(_greedy_generators(self.parent, self.mask))
        return self._gens

    @property
    def order(self) -> int:
        return len(self.members)

    def __len__(self):
        return self.order

    def __contains__(self, x) -> bool:
        return bool(self.mask[int(x)])

    def is_trivial(self) -> bool:
        return self.order == 1

    def index(self) -> int:
        return self.parent.order // self.order

    def issubset(self, other: 'Subgroup') -> bool:
        return bool(np.all(other.mask[self.members]))

    @property
    def key(self) -> bytes:
        return self.members.tobytes()

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.parent is other.parent and np.array_equal(self.members, other.members)

    def __hash__(self):
        return hash((id(self.parent), self.key))

    def __repr__(self):
        return f"Subgroup(order={self.order}, of={self.parent.name})"


def whole_group(G: GroupTable) -> Subgroup:
    return Subgroup(G, np.arange(G.order), gens=G.gen_ids)


def trivial_subgroup(G: GroupTable) -> Subgroup:
    return Subgroup(G, [0], gens=[])


def _closure_mask(G: GroupTable, gens: Sequence[int], start: Optional[np.ndarray] = None) -> np.ndarray:
    table = G.table
    mask = np.zeros(G.order, dtype=bool) if start is None else start.copy()
    mask[0] = True
    gens = np.asarray([g for g in gens if g != 0], dtype=np.int64)
    if gens.size == 0:
        return mask
    frontier = np.flatnonzero(mask)
    while frontier.size:
        products = table[np.ix_(frontier, gens)].ravel()
        fresh = np.unique(products[~mask[products]])
        mask[fresh] = True
        frontier = fresh
    return mask


def _greedy_generators(G: GroupTable, mask: np.ndarray) -> List[int]:
    gens: List[int] = []
    current = np.zeros(G.order, dtype=bool)
    current[0] = True
    for x in np.flatnonzero(mask):
        if not current[x]:
            gens.append(int(x))
            current = _closure_mask(G, gens, current)
    return gens


def subgroup_generated(G: GroupTable, seed: Iterable[int]) -> Subgroup:
    """Smallest subgroup containing ``seed``; gens are the seed ids, sorted and deduplicated."""
    gens = sorted({int(s) for s in seed})
    for g in gens:
        if g < 0 or g >= G.order:
            raise ValueError(f"element id {g} not in {G.name}")
    return Subgroup.from_mask(G, _closure_mask(G, gens), gens=gens)


def join(G: GroupTable, A: Subgroup, B: Subgroup) -> Subgroup:
    return Subgroup.from_mask(G, _closure_mask(G, list(A.gens) + list(B.gens), A.mask),
                              gens=sorted(set(A.gens) | set(B.gens)))


def intersection(G: GroupTable, A: Subgroup, B: Subgroup) -> Subgroup:
    return Subgroup.from_mask(G, A.mask & B.mask)


def _normal_core_mask(G: GroupTable, mask: np.ndarray) -> np.ndarray:
    # Intersect with generator conjugates until stable; the fixed point is
    # invariant under every generator, hence normal, and contains the core.
    table = G.table
    core = mask.copy()
    while True:
        members = np.flatnonzero(core)
        keep = np.ones(members.size, dtype=bool)
        for g in G.gen_ids:
            # y lies in core^g iff g y g^-1 lies in core
            keep &= core[table[table[g, members], G.inv[g]]]
        if keep.all():
            return core
        core = np.zeros(G.order, dtype=bool)
        core[members[keep]] = True


def normal_core(G: GroupTable, S: Subgroup) -> Subgroup:
    """Largest normal subgroup of G contained in S."""
    return Subgroup.from_mask(G, _normal_core_mask(G, S.mask))


def is_normal(G: GroupTable, S: Subgroup) -> bool:
    table = G.table
    for g in G.gen_ids:
        if not np.all(S.mask[table[table[G.inv[g], S.members], g]]):
            return False
    return True


def commutator_subgroup(G: GroupTable, A: Subgroup, B: Subgroup) -> Subgroup:
    """<[a, b] : a in A, b in B> with [a, b] = a^-1 b^-1 a b."""
    table = G.table
    a = A.members[:, None]
    b = B.members[None, :]
    comm = table[table[G.inv[a], G.inv[b]], table[a, b]]
    return subgroup_generated(G, np.unique(comm).tolist())


def derived_subgroup(G: GroupTable) -> Subgroup:
    whole = whole_group(G)
    return commutator_subgroup(G, whole, whole)


def lower_central(G: GroupTable, i: int) -> Subgroup:
    """gamma_1 = G, gamma_{i+1} = [gamma_i, G]."""
    if i < 1:
        raise ValueError("lower central series is indexed from 1")
    whole = whole_group(G)
    term = whole
    for _ in range(i - 1):
        term = commutator_subgroup(G, term, whole)
        if term.is_trivial():
            break
    return term


def center(G: GroupTable) -> Subgroup:
    table = G.table
    gens = np.asarray(G.gen_ids, dtype=np.int64)
    if gens.size == 0:
        return whole_group(G)
    everything = np.arange(G.order)
    mask = np.all(table[np.ix_(everything, gens)] == table[np.ix_(gens, everything)].T, axis=1)
    return Subgroup.from_mask(G, mask)


def exponent(G: GroupTable) -> int:
    return G.exponent


def element_order_profile(G: GroupTable) -> Dict[int, int]:
    counts = Counter(int(o) for o in G.order_of)
    return dict(sorted(counts.items()))


def is_p_power(n: int, p: int) -> bool:
    return n >= 1 and n == p ** multiplicity(p, n)


def require_p_group(G: GroupTable, p: int) -> int:
    """Return k with |G| = p^k, or raise NotAPGroup."""
    if not isprime(p):
        raise NotAPGroup(f"{p} is not a prime", p=p)
    if not is_p_power(G.order, p):
        raise NotAPGroup(f"{G.name} has order {G.order}, not a power of {p}",
                         order=G.order, p=p)
    return int(multiplicity(p, G.order)) if G.order > 1 else 0


def group_prime(G: GroupTable) -> Optional[int]:
    """The prime p for a nontrivial p-group (prime_hint wins), else None."""
    if G.prime_hint is not None:
        return G.prime_hint
    factors = factorint(G.order)
    if len(factors) == 1:
        return int(next(iter(factors)))
    return None


def frattini_subgroup(G: GroupTable, S: Subgroup, p: int) -> Subgroup:
    """Phi(S) = <[S,S], s^p> for a p-subgroup S of G."""
    derived = commutator_subgroup(G, S, S)
    powers = np.unique(G.power_map(p)[S.members])
    return subgroup_generated(G, derived.members.tolist() + powers.tolist())


def frattini_basis(G: GroupTable, S: Subgroup, p: int) -> Tuple[Subgroup, List[int]]:
    """
    Phi(S) and a list of elements of S whose images form a basis of the
    elementary abelian quotient S/Phi(S). The basis prefers S's own
    generators, then the least ids.
    """
    phi = frattini_subgroup(G, S, p)
    basis: List[int] = []
    closing = list(phi.gens)
    current = phi.mask.copy()
    for x in list(S.gens) + S.members.tolist():
        if not current[x]:
            basis.append(int(x))
            closing.append(int(x))
            current = _closure_mask(G, closing, current)
        if np.array_equal(current, S.mask):
            break
    if S.order != phi.order * p ** len(basis):
        raise NotAPGroup("Frattini quotient is not elementary abelian", order=S.order, p=p)
    return phi, basis


def minimal_generating_set(G: GroupTable, S: Subgroup) -> List[int]:
    """Frattini-quotient basis for p-subgroups, greedy generators otherwise."""
    if S.is_trivial():
        return []
    factors = factorint(S.order)
    if len(factors) == 1:
        _, basis = frattini_basis(G, S, int(next(iter(factors))))
        return basis
    return list(S.gens)


def _quotient_coordinates(G: GroupTable, phi: Subgroup, basis: Sequence[int], p: int) -> np.ndarray:
    """Coordinates in F_p^r of every element's image in G/Phi(G)."""
    table = G.table
    r = len(basis)
    coords = np.full((G.order, r), -1, dtype=np.int64)
    for vector in product(range(p), repeat=r):
        y = 0
        for b, e in zip(basis, vector):
            for _ in range(e):
                y = int(table[y, b])
        coords[table[phi.members, y]] = vector
    return coords


def _hyperplane_functionals(r: int, p: int):
    # Normalised nonzero functionals: leading coefficient 1
    for lead in range(r):
        for tail in product(range(p), repeat=r - lead - 1):
            yield np.array([0] * lead + [1] + list(tail), dtype=np.int64)


def maximal_subgroups(G: GroupTable, p: int) -> List[Subgroup]:
    """
    All subgroups of index p, as preimages of the hyperplanes of G/Phi(G).
    There are (p^r - 1)/(p - 1) of them where r is the rank of the quotient.
    """
    require_p_group(G, p)
    if G.order == 1:
        return []
    phi, basis = frattini_basis(G, whole_group(G), p)
    coords = _quotient_coordinates(G, phi, basis, p)
    result = []
    for functional in _hyperplane_functionals(len(basis), p):
        mask = (coords @ functional) % p == 0
        result.append(Subgroup.from_mask(G, mask))
    logger.debug("%s: rank %d Frattini quotient, %d maximal subgroups",
                 G.name, len(basis), len(result))
    return result


def all_subgroups(G: GroupTable) -> List[Subgroup]:
    """Every subgroup exactly once, by joining cyclic subgroups until nothing new appears."""
    if G.order > ALL_SUBGROUPS_LIMIT:
        raise TooLarge(f"all_subgroups is limited to order {ALL_SUBGROUPS_LIMIT}",
                       order=G.order)
    found: Dict[bytes, Subgroup] = {}
    frontier = []
    for x in range(G.order):
        cyclic = subgroup_generated(G, [x])
        if cyclic.key not in found:
            found[cyclic.key] = cyclic
            frontier.append(cyclic)
    while frontier:
        fresh = []
        for S in frontier:
            for x in np.flatnonzero(~S.mask):
                T = subgroup_generated(G, list(S.gens) + [int(x)])
                if T.key not in found:
                    found[T.key] = T
                    fresh.append(T)
        frontier = fresh
    return sorted(found.values(), key=lambda S: (S.order, S.members.tolist()))


def subgroup_table(G: GroupTable, S: Subgroup, name: Optional[str] = None,
                   cap: int = DEFAULT_CLOSURE_CAP) -> GroupTable:
    """Re-materialise S as a GroupTable over the same points."""
    gens = [G.perm(g) for g in S.gens] or [Perm.identity(G.degree)]
    sub = closure(gens, cap, prime_hint=None, name=name or f"{G.name}.sub{S.order}",
                  table_limit=G.table_limit)
    if sub.order != S.order:
        raise CapExceeded("re-materialised subgroup has the wrong order",
                          expected=S.order, found=sub.order)
    return sub


def embedding(sub: GroupTable, G: GroupTable) -> np.ndarray:
    """Ids in G of the elements of ``sub`` (both over the same points)."""
    return np.fromiter((G._index[row.tobytes()] for row in sub._perms.astype(G._perms.dtype)),
                       dtype=np.int64, count=sub.order)
