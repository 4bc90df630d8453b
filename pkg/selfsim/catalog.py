"""
Named p-groups with fixed generator lists.

Matrix-defined groups act on themselves by right multiplication, the wreath
product C_p wr C_p acts imprimitively on p^2 points, dihedral groups act on
the polygon. Generator order is part of each construction and therefore
fixes the element numbering.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.group_constructs import DirectProduct
from sympy.combinatorics.named_groups import AbelianGroup, CyclicGroup, DihedralGroup

from .error_handler import CatalogMismatch, UnknownCatalogEntry
from .group_core import DEFAULT_CLOSURE_CAP, DEFAULT_TABLE_LIMIT, GroupTable, Perm, closure, subgroup_generated
from .morphism import VirtualEndomorphism, extend_hom

logger = logging.getLogger(__name__)

Generators = Tuple[List[Perm], Dict[str, int]]


def _from_sympy(group: PermutationGroup) -> List[Perm]:
    degree = group.degree
    return [Perm(tuple(g.array_form) + tuple(range(g.size, degree))) for g in group.generators]


def _regular_action(elements: Sequence[tuple], multiply: Callable[[tuple, tuple], tuple],
                    gens: Dict[str, tuple]) -> Generators:
    """Right regular permutations x -> x*g for the named generators."""
    position = {x: i for i, x in enumerate(elements)}
    perms = []
    labels = {}
    for k, (name, g) in enumerate(gens.items()):
        perms.append(Perm(tuple(position[multiply(x, g)] for x in elements)))
        labels[name] = k
    return perms, labels


def cyclic(p: int, k: int = 1) -> Generators:
    return _from_sympy(CyclicGroup(p ** k)), {'a': 0}


def _names(k: int) -> List[str]:
    return list('xyzw'[:k]) if k <= 4 else [f"x{i + 1}" for i in range(k)]


def elementary(p: int, k: int) -> Generators:
    """C_p^k as k disjoint p-cycles."""
    return _from_sympy(AbelianGroup(*([p] * k))), {name: j for j, name in enumerate(_names(k))}


def heisenberg(p: int, m: int = 1) -> Generators:
    """
    Upper unitriangular matrices of size m+2 over Z/p restricted to the first
    row, last column and the corner: (x, y, z) * (x', y', z') =
    (x + x', y + y', z + z' + x.y'). m = 1 gives the group of order p^3 with
    generators a, b and the central c = [a, b]; m = 2 the extraspecial group
    of order p^5 with a1, b1, a2, b2, c.
    """
    elements = [(x, y, z) for z in range(p) for y in product(range(p), repeat=m)
                for x in product(range(p), repeat=m)]

    def multiply(u, v):
        x = tuple((s + t) % p for s, t in zip(u[0], v[0]))
        y = tuple((s + t) % p for s, t in zip(u[1], v[1]))
        z = (u[2] + v[2] + sum(s * t for s, t in zip(u[0], v[1]))) % p
        return (x, y, z)

    zero = (0,) * m
    gens = {}
    for i in range(m):
        unit = tuple(int(j == i) for j in range(m))
        suffix = '' if m == 1 else str(i + 1)
        gens[f"a{suffix}"] = (unit, zero, 0)
        gens[f"b{suffix}"] = (zero, unit, 0)
    gens['c'] = (zero, zero, 1)
    return _regular_action(elements, multiply, gens)


def extraspecial_exp_p2(p: int) -> Generators:
    """Maps t -> u t + v on Z/p^2 with u = 1 mod p: x is t -> t + 1, y is t -> (1 + p) t."""
    n = p * p
    x = Perm(tuple((t + 1) % n for t in range(n)))
    y = Perm(tuple(((1 + p) * t) % n for t in range(n)))
    return [x, y], {'x': 0, 'y': 1}


def dihedral(n: int) -> Generators:
    """Dihedral group of order 2^n on the 2^(n-1) vertices of the polygon."""
    return _from_sympy(DihedralGroup(2 ** (n - 1))), {'r': 0, 's': 1}


_QUATERNION_UNITS = ('1', 'i', 'j', 'k')
_QUATERNION_PRODUCTS = {
    ('i', 'j'): (1, 'k'), ('j', 'k'): (1, 'i'), ('k', 'i'): (1, 'j'),
    ('j', 'i'): (-1, 'k'), ('k', 'j'): (-1, 'i'), ('i', 'k'): (-1, 'j'),
}


def quaternion8() -> Generators:
    def multiply(u, v):
        (s, x), (t, y) = u, v
        if x == '1':
            return (s * t, y)
        if y == '1':
            return (s * t, x)
        if x == y:
            return (-s * t, '1')
        sign, unit = _QUATERNION_PRODUCTS[(x, y)]
        return (s * t * sign, unit)

    elements = [(s, x) for s in (1, -1) for x in _QUATERNION_UNITS]
    return _regular_action(elements, multiply, {'i': (1, 'i'), 'j': (1, 'j')})


def wreath_cpcp(p: int) -> Generators:
    """C_p wr C_p on p^2 points b*p + x: u cycles block 0, t shifts the blocks."""
    n = p * p
    u = list(range(n))
    for x in range(p):
        u[x] = (x + 1) % p
    t = [((b + 1) % p) * p + x for b in range(p) for x in range(p)]
    return [Perm(tuple(u)), Perm(tuple(t))], {'u': 0, 't': 1}


def direct_product(factors: Sequence[Generators]) -> Generators:
    """Factors act on consecutive blocks of points; labels gain the factor number."""
    groups = [PermutationGroup([Permutation(list(g.images)) for g in factor]) for factor, _ in factors]
    labels: Dict[str, int] = {}
    base = 0
    for number, (factor, names) in enumerate(factors, start=1):
        for name, k in names.items():
            labels[f"{name}{number}"] = base + k
        base += len(factor)
    return _from_sympy(DirectProduct(*groups)), labels


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    constructor: str
    params: Tuple[int, ...]
    p: int
    expected_order: int
    expected_exponent: int
    tags: Tuple[str, ...] = ()
    description: str = ''
    factors: Tuple['CatalogEntry', ...] = field(default=(), repr=False)

    def generators(self) -> Generators:
        if self.constructor == 'direct_product':
            return direct_product([entry.generators() for entry in self.factors])
        return CONSTRUCTORS[self.constructor](*self.params)

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'constructor': self.constructor,
            'params': list(self.params),
            'factors': [entry.name for entry in self.factors],
            'p': self.p,
            'expected_order': self.expected_order,
            'expected_exponent': self.expected_exponent,
            'tags': list(self.tags),
            'description': self.description,
        }


CONSTRUCTORS: Dict[str, Callable[..., Generators]] = {
    'cyclic': cyclic,
    'elementary': elementary,
    'heisenberg': heisenberg,
    'extraspecial_exp_p2': extraspecial_exp_p2,
    'dihedral': dihedral,
    'quaternion8': quaternion8,
    'wreath_cpcp': wreath_cpcp,
}


def direct_power(entry: CatalogEntry, k: int, name: Optional[str] = None) -> CatalogEntry:
    tags = tuple(t for t in entry.tags if t == 'abelian') + ('direct_product',)
    return CatalogEntry(
        name=name or f"{entry.name}^{k}", constructor='direct_product', params=(k,), p=entry.p,
        expected_order=entry.expected_order ** k, expected_exponent=entry.expected_exponent,
        tags=tags, description=f"direct power of {entry.name}", factors=(entry,) * k)


def _entry(name, constructor, params, p, order, exponent, tags=(), description=''):
    return CatalogEntry(name, constructor, tuple(params), p, order, exponent, tuple(tags), description)


_HEISENBERG3 = _entry('heisenberg3', 'heisenberg', (3,), 3, 27, 3, ('extraspecial',),
                      'extraspecial of order 27 and exponent 3, [a, b] = c')

_ENTRIES: List[CatalogEntry] = [
    _entry('c2', 'cyclic', (2,), 2, 2, 2, ('abelian',)),
    _entry('c3', 'cyclic', (3,), 3, 3, 3, ('abelian',)),
    _entry('c4', 'cyclic', (2, 2), 2, 4, 4, ('abelian',)),
    _entry('c8', 'cyclic', (2, 3), 2, 8, 8, ('abelian',)),
    _entry('c9', 'cyclic', (3, 2), 3, 9, 9, ('abelian',)),
    _entry('c2xc2', 'elementary', (2, 2), 2, 4, 2, ('abelian',)),
    _entry('c2xc2xc2', 'elementary', (2, 3), 2, 8, 2, ('abelian',)),
    _entry('c3xc3', 'elementary', (3, 2), 3, 9, 3, ('abelian',)),
    _entry('heisenberg2', 'heisenberg', (2,), 2, 8, 4, ('dihedral',),
           'order 8 instance of the [a, b] = c presentation'),
    _entry('dihedral8', 'heisenberg', (2,), 2, 8, 4, ('dihedral',),
           'same construction as heisenberg2'),
    _entry('dihedral16', 'dihedral', (4,), 2, 16, 8, ('dihedral',)),
    _entry('quaternion8', 'quaternion8', (), 2, 8, 4, ('quaternion',)),
    _HEISENBERG3,
    _entry('heisenberg5', 'heisenberg', (5,), 5, 125, 5, ('extraspecial',)),
    _entry('extraspecial27_exp9', 'extraspecial_exp_p2', (3,), 3, 27, 9, ('extraspecial',)),
    _entry('extraspecial243', 'heisenberg', (3, 2), 3, 243, 3, ('extraspecial',),
           'extraspecial of order 3^5 and exponent 3'),
    _entry('wreath_c2c2', 'wreath_cpcp', (2,), 2, 8, 4, ('wreath', 'dihedral')),
    _entry('wreath_c3c3', 'wreath_cpcp', (3,), 3, 81, 9, ('wreath',)),
    direct_power(_HEISENBERG3, 2, name='heisenberg3xheisenberg3'),
]

CATALOG: Dict[str, CatalogEntry] = {entry.name: entry for entry in _ENTRIES}

DEFAULT_SUITE: Tuple[str, ...] = tuple(entry.name for entry in _ENTRIES if entry.name != 'dihedral8')

# Greek names of the generator states in the worked order-p^3 example
GREEK_STATE_NAMES = {'a': 'α', 'b': 'β', 'c': 'γ'}


def list_entries() -> List[CatalogEntry]:
    return list(_ENTRIES)


def get_entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownCatalogEntry(f"no catalog group named {name!r}", known=', '.join(CATALOG))


def build(entry, cap: int = DEFAULT_CLOSURE_CAP, table_limit: int = DEFAULT_TABLE_LIMIT) -> GroupTable:
    """Close the entry's generators and check the expected order and exponent."""
    if isinstance(entry, str):
        entry = get_entry(entry)
    perms, labels = entry.generators()
    G = closure(perms, cap, prime_hint=entry.p, labels=labels, name=entry.name, table_limit=table_limit)
    if G.order != entry.expected_order:
        raise CatalogMismatch(f"{entry.name}: built order {G.order}, expected {entry.expected_order}")
    if G.exponent != entry.expected_exponent:
        raise CatalogMismatch(f"{entry.name}: exponent {G.exponent}, expected {entry.expected_exponent}")
    logger.debug("built %s: order %d on %d points", entry.name, G.order, G.degree)
    return G


def heisenberg_endomorphism(G: GroupTable) -> VirtualEndomorphism:
    """H = <a, c> with f: a -> c, c -> b on a group built from heisenberg(p)."""
    a, b, c = (G.labels[name] for name in ('a', 'b', 'c'))
    H = subgroup_generated(G, [a, c])
    hom = extend_hom(H, [a, c], [c, b])
    if hom is None:
        raise CatalogMismatch("a -> c, c -> b does not extend", group=G.name)
    return VirtualEndomorphism(G, H, hom, label='example23')


NAMED_ENDOS: Dict[str, Callable[[GroupTable], VirtualEndomorphism]] = {
    'example23': heisenberg_endomorphism,
}
