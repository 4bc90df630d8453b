"""
JSON files for groups and virtual endomorphisms.

Group file:  {"name", "degree", "generators": [generator, ...], "prime"?, "labels"?}
             where a generator is an image list [i0, i1, ...] or a list of cycles [[...], ...]
Endo file:   {"group": <catalog name or group file path>, "H_gens": [ids], "images": [ids]}

Element ids always refer to the breadth-first numbering produced by closure(),
so a group written by save_group() reloads with exactly the same ids.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from sympy import isprime

from .error_handler import GroupFileError
from .group_core import DEFAULT_CLOSURE_CAP, DEFAULT_TABLE_LIMIT, GroupTable, Perm, closure, subgroup_generated
from .morphism import VirtualEndomorphism, extend_hom

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def group_to_dict(G: GroupTable) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        'name': G.name,
        'degree': G.degree,
        'generators': [[list(c) for c in G.perm(g).cycles()] for g in G.gen_ids],
    }
    if G.prime_hint is not None:
        data['prime'] = G.prime_hint
    if G.labels:
        positions = {g: k for k, g in reversed(list(enumerate(G.gen_ids)))}
        data['labels'] = {name: positions[x] for name, x in sorted(G.labels.items()) if x in positions}
    return data


def _generator_perm(generator: Any, degree: int) -> Perm:
    if not isinstance(generator, list):
        raise TypeError("expected a list")
    if generator and all(isinstance(x, int) and not isinstance(x, bool) for x in generator):
        if len(generator) != degree:
            raise ValueError(f"image list has {len(generator)} entries")
        return Perm(tuple(generator))
    return Perm.from_cycles(generator, degree)


def group_from_dict(data: Dict[str, Any], cap: int = DEFAULT_CLOSURE_CAP,
                    table_limit: int = DEFAULT_TABLE_LIMIT) -> GroupTable:
    """Validate a group record and close its generators."""
    if not isinstance(data, dict):
        raise GroupFileError("group record must be a JSON object")
    missing = [key for key in ('degree', 'generators') if key not in data]
    if missing:
        raise GroupFileError(f"group record is missing {', '.join(missing)}")
    degree = data['degree']
    if isinstance(degree, bool) or not isinstance(degree, int) or degree < 1:
        raise GroupFileError("degree must be a positive integer", degree=degree)
    generators = data['generators']
    if not isinstance(generators, list) or not generators:
        raise GroupFileError("generators must be a non-empty list")
    perms = []
    for k, generator in enumerate(generators):
        try:
            perms.append(_generator_perm(generator, degree))
        except (TypeError, ValueError) as e:
            raise GroupFileError(f"generator {k} is not a permutation of {degree} points: {e}",
                                 generator=k)
    labels = data.get('labels') or {}
    for name, position in labels.items():
        if not isinstance(position, int) or not 0 <= position < len(perms):
            raise GroupFileError(f"label {name!r} does not name a generator", position=position)
    prime = data.get('prime')
    if prime is not None and (isinstance(prime, bool) or not isinstance(prime, int) or not isprime(prime)):
        raise GroupFileError(f"prime must be a prime integer, got {prime!r}", prime=prime)
    return closure(perms, cap, prime_hint=prime, labels=labels,
                   name=data.get('name'), table_limit=table_limit)


def save_group(G: GroupTable, path: PathLike):
    with open(path, 'w') as handle:
        json.dump(group_to_dict(G), handle, indent=2, sort_keys=True)
        handle.write('\n')
    logger.info("wrote %s to %s", G.name, path)


def read_json(path: PathLike) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise GroupFileError(f"file not found: {path}", path=str(path))
    except json.JSONDecodeError as e:
        raise GroupFileError(f"invalid JSON in {path}: {e}", path=str(path))


def load_group(path: PathLike, cap: int = DEFAULT_CLOSURE_CAP,
               table_limit: int = DEFAULT_TABLE_LIMIT) -> GroupTable:
    return group_from_dict(read_json(path), cap, table_limit)


def endo_to_dict(endo: VirtualEndomorphism, group_ref: Optional[str] = None) -> Dict[str, Any]:
    gens = [int(g) for g in endo.H.gens]
    return {
        'group': group_ref if group_ref is not None else endo.group.name,
        'H_gens': gens,
        'images': [endo.f(g) for g in gens],
    }


def endo_from_dict(data: Dict[str, Any], G: GroupTable) -> VirtualEndomorphism:
    """Build the endomorphism described by ``data`` on the already resolved group G."""
    for key in ('H_gens', 'images'):
        if not isinstance(data.get(key), list):
            raise GroupFileError(f"endomorphism record needs a list {key!r}")
    gens, images = data['H_gens'], data['images']
    if len(gens) != len(images):
        raise GroupFileError("H_gens and images differ in length",
                             gens=len(gens), images=len(images))
    for x in gens + images:
        if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < G.order:
            raise GroupFileError(f"element id {x!r} is not in {G.name}", order=G.order)
    H = subgroup_generated(G, gens)
    hom = extend_hom(H, gens, images)
    if hom is None:
        raise GroupFileError("the map does not extend to a homomorphism", group=G.name)
    return VirtualEndomorphism(G, H, hom, label=data.get('label'))


def save_endo(endo: VirtualEndomorphism, path: PathLike, group_ref: Optional[str] = None):
    with open(path, 'w') as handle:
        json.dump(endo_to_dict(endo, group_ref), handle, indent=2, sort_keys=True)
        handle.write('\n')
