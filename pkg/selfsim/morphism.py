"""
Homomorphisms H -> G, f-cores and simple virtual endomorphisms.

Homomorphisms are found with the graph method: the pairs (h, f(h)) for the
generators of H generate a subgroup of H x G, and the assignment extends to a
homomorphism exactly when that subgroup is the graph of a function.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence

import numpy as np
from sympy import isprime

from .error_handler import DegenerateRestriction, GeneratorsDontGenerate, NotAPGroup
from .group_core import (
    GroupTable, Subgroup, _closure_mask, _normal_core_mask, closure, commutator_subgroup,
    derived_subgroup, embedding, maximal_subgroups, minimal_generating_set, normal_core,
    require_p_group, subgroup_generated, subgroup_table, whole_group,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroupHom:
    """
    A homomorphism from a subgroup ``domain`` of some group D into ``codomain``.
    ``image_of`` is indexed by the ids of D and holds -1 off the domain.
    """

    domain: Subgroup
    codomain: GroupTable
    image_of: np.ndarray

    def __call__(self, x: int) -> int:
        y = int(self.image_of[x])
        if y < 0:
            raise KeyError(f"element {x} is not in the domain")
        return y

    @cached_property
    def image(self) -> Subgroup:
        mask = np.zeros(self.codomain.order, dtype=bool)
        mask[self.image_of[self.domain.members]] = True
        return Subgroup.from_mask(self.codomain, mask)

    @cached_property
    def kernel(self) -> Subgroup:
        members = self.domain.members
        return Subgroup(self.domain.parent, members[self.image_of[members] == 0])

    def preimage_mask(self, mask: np.ndarray) -> np.ndarray:
        """Mask (over D) of domain elements whose image lies in ``mask``."""
        members = self.domain.members
        result = np.zeros(self.domain.parent.order, dtype=bool)
        result[members[mask[self.image_of[members]]]] = True
        return result

    def is_multiplicative(self) -> bool:
        """Exhaustive check of f(xy) = f(x)f(y) over all domain pairs."""
        m = self.domain.members
        source = self.domain.parent.table
        target = self.codomain.table
        img = self.image_of[m]
        lhs = self.image_of[source[np.ix_(m, m)]]
        rhs = target[np.ix_(img, img)]
        return bool(self.image_of[0] == 0 and np.array_equal(lhs, rhs))


def _graph_closure(source: np.ndarray, target: np.ndarray, order: int,
                   gens: Sequence[int], images: Sequence[int]) -> Optional[np.ndarray]:
    """
    Close the pairs (gens[k], images[k]) under multiplication in D x C.
    Returns the partial map on <gens>, or None as soon as one first
    coordinate meets two second coordinates.
    """
    image_of = np.full(order, -1, dtype=np.int64)
    image_of[0] = 0
    gens = np.asarray(gens, dtype=np.int64)
    images = np.asarray(images, dtype=np.int64)
    if gens.size == 0:
        return image_of
    frontier = np.array([0], dtype=np.int64)
    while frontier.size:
        xs = source[np.ix_(frontier, gens)].ravel()
        ys = target[np.ix_(image_of[frontier], images)].ravel()
        known = image_of[xs]
        assigned = known >= 0
        if np.any(known[assigned] != ys[assigned]):
            return None
        fresh_x = xs[~assigned]
        fresh_y = ys[~assigned]
        if fresh_x.size == 0:
            break
        frontier, first = np.unique(fresh_x, return_index=True)
        image_of[frontier] = fresh_y[first]
        if np.any(image_of[fresh_x] != fresh_y):
            return None
    return image_of


def extend_hom(H: Subgroup, gen_ids: Sequence[int], images: Sequence[int],
               codomain: Optional[GroupTable] = None) -> Optional[GroupHom]:
    """
    Extend gen_ids[k] -> images[k] to a homomorphism on H, or return None
    when no such homomorphism exists.
    """
    D = H.parent
    C = codomain if codomain is not None else D
    if len(gen_ids) != len(images):
        raise ValueError("gen_ids and images differ in length")
    generated = _closure_mask(D, list(gen_ids))
    if not np.array_equal(generated, H.mask):
        raise GeneratorsDontGenerate("generators do not generate the domain subgroup",
                                     generated=int(generated.sum()), expected=H.order)
    image_of = _graph_closure(D.table, C.table, D.order, gen_ids, images)
    if image_of is None:
        return None
    return GroupHom(H, C, image_of)


@dataclass
class HomEnumeration:
    """Running counters for one enumeration; shared with the caller."""
    extensions_tried: int = 0
    homs_yielded: int = 0


def enumerate_homs(H: Subgroup, codomain: GroupTable,
                   stats: Optional[HomEnumeration] = None) -> Iterator[GroupHom]:
    """
    Every homomorphism H -> codomain exactly once.

    Backtracks over the images of a minimal generating set of H (a basis of
    its Frattini quotient for p-groups). A generator of order m may only go
    to an element whose order divides m, and every partial assignment must
    still close to the graph of a function.
    """
    D = H.parent
    stats = stats if stats is not None else HomEnumeration()
    gens = minimal_generating_set(D, H)
    if not gens:
        stats.homs_yielded += 1
        yield GroupHom(H, codomain, _graph_closure(D.table, codomain.table, D.order, [], []))
        return
    source = D.table
    target = codomain.table
    candidates = [np.flatnonzero(int(D.order_of[g]) % codomain.order_of == 0).tolist()
                  for g in gens]

    def extend(level: int, chosen: List[int]) -> Iterator[GroupHom]:
        for y in candidates[level]:
            trial = chosen + [y]
            stats.extensions_tried += 1
            image_of = _graph_closure(source, target, D.order, gens[:level + 1], trial)
            if image_of is None:
                continue
            if level + 1 == len(gens):
                stats.homs_yielded += 1
                yield GroupHom(H, codomain, image_of)
            else:
                yield from extend(level + 1, trial)

    yield from extend(0, [])


class VirtualEndomorphism:
    """A homomorphism f: H -> G from a subgroup H of prime index p."""

    def __init__(self, group: GroupTable, H: Subgroup, f: GroupHom, label: Optional[str] = None):
        if H.parent is not group or f.domain is not H or f.codomain is not group:
            raise ValueError("H and f must live in the given group")
        index, rest = divmod(group.order, H.order)
        if rest or not isprime(index):
            raise NotAPGroup(f"H has index {group.order / H.order}, not a prime",
                             order=group.order, h_order=H.order)
        self.group = group
        self.H = H
        self.f = f
        self.p = index
        self.label = label

    @cached_property
    def fcore(self) -> Subgroup:
        return f_core(self)

    @property
    def simple(self) -> bool:
        return self.fcore.is_trivial()

    @property
    def image(self) -> Subgroup:
        return self.f.image

    def generator_images(self) -> Dict[int, int]:
        return {int(g): self.f(g) for g in self.H.gens}

    def describe(self) -> dict:
        G = self.group
        return {
            'label': self.label,
            'H_gens': [int(g) for g in self.H.gens],
            'images': [self.f(g) for g in self.H.gens],
            'H_order': self.H.order,
            'image_order': self.image.order,
            'fcore_order': self.fcore.order,
            'simple': self.simple,
            'H_gens_named': [G.label_of(g) for g in self.H.gens],
            'images_named': [G.label_of(self.f(g)) for g in self.H.gens],
        }

    def __repr__(self):
        return (f"VirtualEndomorphism(group={self.group.name}, |H|={self.H.order}, "
                f"simple={self.simple})")


def f_core(endo: VirtualEndomorphism) -> Subgroup:
    """
    Largest K <= H that is normal in G with f(K) <= K, by descending
    iteration K_0 = core(H), K_{i+1} = core(K_i meet f^-1(K_i)).
    """
    G = endo.group
    current = _normal_core_mask(G, endo.H.mask)
    while True:
        invariant = current & endo.f.preimage_mask(current)
        following = _normal_core_mask(G, invariant)
        if np.array_equal(following, current):
            return Subgroup.from_mask(G, current)
        current = following


def is_simple(endo: VirtualEndomorphism) -> bool:
    return endo.simple


def level_kernel_chain(endo: VirtualEndomorphism, limit: int = 64) -> List[Subgroup]:
    """
    Kernels of the induced action on levels 0, 1, 2, ...:
    K_0 = G, K_d = core(H meet f^-1(K_{d-1})). Stops once the chain is stable.
    """
    G = endo.group
    chain = [whole_group(G)]
    current = np.ones(G.order, dtype=bool)
    for _ in range(limit):
        following = _normal_core_mask(G, endo.H.mask & endo.f.preimage_mask(current))
        chain.append(Subgroup.from_mask(G, following))
        if np.array_equal(following, current):
            break
        current = following
    return chain


@dataclass
class SearchResult:
    group: GroupTable
    p: int
    endos: List[VirtualEndomorphism] = field(default_factory=list)
    exhausted: bool = True
    homs_examined: int = 0
    extensions_tried: int = 0
    per_subgroup: List[Dict[str, int]] = field(default_factory=list)

    @property
    def self_similar(self) -> Optional[bool]:
        """True/False when decided, None when the budget cut the search short."""
        if self.endos:
            return True
        return False if self.exhausted else None

    def summary(self) -> dict:
        return {
            'group': self.group.name,
            'p': self.p,
            'exhausted': self.exhausted,
            'self_similar': self.self_similar,
            'homs_examined': self.homs_examined,
            'simple_found': len(self.endos),
            'per_subgroup': self.per_subgroup,
        }


def search_simple_endos(G: GroupTable, p: int, budget: Optional[int] = None,
                        extension_budget: Optional[int] = None,
                        stop_at_first: bool = False) -> SearchResult:
    """
    Run over every maximal subgroup and every homomorphism from it, keeping
    the simple ones. An exhausted search with no result proves G is not
    self-similar of degree p.
    """
    require_p_group(G, p)
    result = SearchResult(G, p)
    stats = HomEnumeration()
    for position, H in enumerate(maximal_subgroups(G, p)):
        before_homs, before_simple = result.homs_examined, len(result.endos)
        for hom in enumerate_homs(H, G, stats):
            if budget is not None and result.homs_examined >= budget:
                result.exhausted = False
                break
            if extension_budget is not None and stats.extensions_tried > extension_budget:
                result.exhausted = False
                break
            result.homs_examined += 1
            endo = VirtualEndomorphism(G, H, hom)
            if endo.simple:
                endo.label = f"H{position}.{result.homs_examined - before_homs - 1}"
                result.endos.append(endo)
                if stop_at_first:
                    result.exhausted = False
                    break
        result.per_subgroup.append({
            'subgroup': position,
            'order': H.order,
            'homs': result.homs_examined - before_homs,
            'simple': len(result.endos) - before_simple,
        })
        logger.debug("%s: maximal subgroup %d, %d homs, %d simple", G.name, position,
                     result.homs_examined - before_homs, len(result.endos) - before_simple)
        if not result.exhausted:
            break
    result.extensions_tried = stats.extensions_tried
    if not result.exhausted and not stop_at_first:
        logger.warning("%s: search stopped by budget after %d homomorphisms",
                       G.name, result.homs_examined)
    return result


def derived_obstruction(G: GroupTable, p: int) -> bool:
    """
    True when [G,G] != 1 and [H,H] = [G,G] for every maximal H. Then [H,H]
    is normal and f-invariant for every f: H -> G, so nothing is simple.
    """
    require_p_group(G, p)
    derived = derived_subgroup(G)
    if derived.is_trivial():
        return False
    return all(commutator_subgroup(G, H, H) == derived for H in maximal_subgroups(G, p))


def restrict_endo(endo: VirtualEndomorphism) -> VirtualEndomorphism:
    """
    The restriction f: H meet H^f -> H^f, with H^f re-materialised as its own
    group over the same points.
    """
    G = endo.group
    image = endo.image
    if image.issubset(endo.H):
        raise DegenerateRestriction("image of f lies inside H", h_order=endo.H.order,
                                    image_order=image.order)
    sub = subgroup_table(G, image, name=f"{G.name}.image")
    ids_in_g = embedding(sub, G)
    back = np.full(G.order, -1, dtype=np.int64)
    back[ids_in_g] = np.arange(sub.order)

    domain_in_g = np.flatnonzero(endo.H.mask & image.mask)
    domain = back[domain_in_g]
    image_of = np.full(sub.order, -1, dtype=np.int64)
    image_of[domain] = back[endo.f.image_of[domain_in_g]]
    H_sub = Subgroup(sub, domain)
    restricted = VirtualEndomorphism(sub, H_sub, GroupHom(H_sub, sub, image_of),
                                     label=f"{endo.label or 'endo'}|restricted")
    if not restricted.simple:
        logger.error("restriction of %r is not simple", endo)
    return restricted


def kernel_scan_index_p(G: GroupTable, p: int) -> List[Subgroup]:
    """
    Index-p subgroups found independently of the Frattini machinery: the
    kernels of all nontrivial homomorphisms G -> C_p.
    """
    require_p_group(G, p)
    cyclic = closure([[(i + 1) % p for i in range(p)]], name=f"C{p}")
    powers = [0]
    for _ in range(p - 1):
        powers.append(cyclic.mul(powers[-1], cyclic.gen_ids[0]))
    whole = whole_group(G)
    gens = list(G.gen_ids)
    kernels: Dict[bytes, Subgroup] = {}
    for exponents in product(range(p), repeat=len(gens)):
        if not any(exponents):
            continue
        hom = extend_hom(whole, gens, [powers[e] for e in exponents], cyclic)
        if hom is None:
            continue
        kernel = hom.kernel
        kernels.setdefault(kernel.key, kernel)
    return sorted(kernels.values(), key=lambda S: S.members.tolist())
