"""
Tree representations induced by a virtual endomorphism.

For a transversal T = (t_0 = 1, ..., t_{p-1}) of H in G, every g acts on the
first level by H t_i g = H t_{sigma(g)(i)} and has the sections
f(t_i g t_{sigma(g)(i)}^-1). Reading a word letter by letter through these
outputs and sections is the action of g on the p-ary tree. Elements compose
left to right, so act(g*h, w) == act(h, act(g, w)).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .error_handler import NotInH, NotSimple, TransversalError
from .group_core import DEFAULT_CLOSURE_CAP, GroupTable, Perm, Subgroup, closure
from .morphism import VirtualEndomorphism

logger = logging.getLogger(__name__)

DEFAULT_DEPTH_CAP = 8

Word = Union[str, Sequence[int]]


@dataclass(frozen=True, eq=False)
class Transversal:
    """Right coset representatives of H in G; ``coset_of[x]`` is the letter of H x."""

    H: Subgroup
    reps: Tuple[int, ...]
    coset_of: np.ndarray

    @property
    def p(self) -> int:
        return len(self.reps)


def transversal_from_reps(G: GroupTable, H: Subgroup, reps: Sequence[int]) -> Transversal:
    reps = tuple(int(t) for t in reps)
    if not reps or reps[0] != 0:
        raise TransversalError("the first representative must be the identity", reps=str(reps))
    if len(reps) * H.order != G.order:
        raise TransversalError(f"{len(reps)} representatives for index {G.order // H.order}")
    coset_of = np.full(G.order, -1, dtype=np.int64)
    for letter, t in enumerate(reps):
        coset = G.table[H.members, t]
        if np.any(coset_of[coset] >= 0):
            raise TransversalError(f"representative {t} repeats a coset", reps=str(reps))
        coset_of[coset] = letter
    coset_of.flags.writeable = False
    return Transversal(H, reps, coset_of)


def split_transversal(G: GroupTable, H: Subgroup, a: int) -> Transversal:
    """T = {1, a, ..., a^(p-1)} for an element a outside H."""
    if not 0 <= a < G.order or H.mask[a]:
        raise TransversalError(f"split element {a} must be an element of {G.name} outside H", element=a)
    reps = [0]
    p = G.order // H.order
    for _ in range(p - 1):
        reps.append(G.mul(reps[-1], a))
    return transversal_from_reps(G, H, reps)


def least_transversal(G: GroupTable, H: Subgroup) -> Transversal:
    """Least element id of every coset, cosets ordered by that id."""
    seen = np.zeros(G.order, dtype=bool)
    reps = []
    for x in range(G.order):
        if not seen[x]:
            reps.append(x)
            seen[G.table[H.members, x]] = True
    return transversal_from_reps(G, H, reps)


def split_candidates(endo: VirtualEndomorphism, image_only: bool = True) -> np.ndarray:
    """Order-p elements outside H, in id order; from the image of f when image_only."""
    G = endo.group
    pool = endo.image.mask if image_only else np.ones(G.order, dtype=bool)
    return np.flatnonzero(pool & ~endo.H.mask & (G.order_of == endo.p))


def default_transversal(endo: VirtualEndomorphism) -> Transversal:
    """
    Prefer powers of an order-p element of f(H) outside H, then of any order-p
    element outside H, then the least representatives.
    """
    G = endo.group
    for image_only in (True, False):
        candidates = split_candidates(endo, image_only)
        if candidates.size:
            return split_transversal(G, endo.H, int(candidates[0]))
    return least_transversal(G, endo.H)


def coset_action(G: GroupTable, H: Subgroup, T: Transversal, g: int) -> Perm:
    return Perm(tuple(int(T.coset_of[G.mul(t, g)]) for t in T.reps))


@dataclass(frozen=True, eq=False)
class MealyAutomaton:
    """
    States 0..n-1 over the alphabet 0..p-1. ``output[s]`` is the image list of
    the root permutation of state s and ``delta[s, i]`` the state entered after
    reading letter i.
    """

    p: int
    labels: Tuple[str, ...]
    output: np.ndarray
    delta: np.ndarray
    initial_of: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.labels)
        if self.output.shape != (n, self.p) or self.delta.shape != (n, self.p):
            raise ValueError("output and delta must have one row of p entries per state")
        self.output.flags.writeable = False
        self.delta.flags.writeable = False

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def state(self, name: Union[str, int]) -> int:
        """State id from an initial name, a label or a decimal id."""
        if isinstance(name, (int, np.integer)):
            return int(name)
        if name in self.initial_of:
            return self.initial_of[name]
        if name in self.labels:
            return self.labels.index(name)
        if name.isdigit() and int(name) < self.n_states:
            return int(name)
        raise KeyError(f"no state named {name!r}")

    def output_perm(self, s: int) -> Perm:
        return Perm(tuple(int(i) for i in self.output[s]))

    def is_state_closed(self) -> bool:
        return bool(np.all((self.delta >= 0) & (self.delta < self.n_states)))

    def trivial_states(self) -> List[int]:
        """States with identity output that only loop back to themselves."""
        identity = np.arange(self.p)
        loops = self.delta == np.arange(self.n_states)[:, None]
        return np.flatnonzero(np.all(self.output == identity, axis=1) & np.all(loops, axis=1)).tolist()

    def first_level_transitive(self, states: Optional[Iterable[int]] = None) -> bool:
        """Whether the root permutations of ``states`` generate a transitive group."""
        states = range(self.n_states) if states is None else list(states)
        reached = {0}
        frontier = [0]
        while frontier:
            letter = frontier.pop()
            for s in states:
                image = int(self.output[s, letter])
                if image not in reached:
                    reached.add(image)
                    frontier.append(image)
        return len(reached) == self.p

    def reachable(self, seeds: Iterable[int]) -> Tuple['MealyAutomaton', np.ndarray]:
        """Sub-automaton of states reachable from ``seeds``, renumbered breadth first."""
        order: List[int] = []
        position: Dict[int, int] = {}
        for s in seeds:
            s = int(s)
            if s not in position:
                position[s] = len(order)
                order.append(s)
        k = 0
        while k < len(order):
            for t in self.delta[order[k]]:
                t = int(t)
                if t not in position:
                    position[t] = len(order)
                    order.append(t)
            k += 1
        old = np.array(order, dtype=np.int64)
        renumber = np.vectorize(position.__getitem__, otypes=[np.int64])
        initials = {name: position[s] for name, s in self.initial_of.items() if s in position}
        sub = MealyAutomaton(self.p, tuple(self.labels[s] for s in order), self.output[old].copy(),
                             renumber(self.delta[old]), initials)
        return sub, old

    def relabel(self, names: Dict[str, str]) -> 'MealyAutomaton':
        labels = tuple(names.get(label, label) for label in self.labels)
        initials = {names.get(name, name): s for name, s in self.initial_of.items()}
        return MealyAutomaton(self.p, labels, self.output, self.delta, initials)

    def to_dict(self) -> dict:
        return {
            'p': self.p,
            'states': [
                {'id': s, 'label': self.labels[s], 'output': self.output[s].tolist(),
                 'delta': self.delta[s].tolist()}
                for s in range(self.n_states)
            ],
            'initials': dict(sorted(self.initial_of.items())),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'MealyAutomaton':
        states = sorted(data['states'], key=lambda s: s['id'])
        if [s['id'] for s in states] != list(range(len(states))):
            raise ValueError("state ids must be 0..n-1")
        p = int(data['p'])
        output = np.array([s['output'] for s in states], dtype=np.int64).reshape(len(states), p)
        delta = np.array([s['delta'] for s in states], dtype=np.int64).reshape(len(states), p)
        for row in output:
            Perm(tuple(row))
        automaton = cls(p, tuple(str(s['label']) for s in states), output, delta,
                        {str(k): int(v) for k, v in data.get('initials', {}).items()})
        if not automaton.is_state_closed():
            raise ValueError("transition leaves the state set")
        return automaton

    def to_dot(self, name: str = 'automaton') -> str:
        lines = [f'digraph "{name}" {{', '  rankdir=LR;', '  node [shape=record];']
        for s in range(self.n_states):
            lines.append(f'  s{s} [label="{self.labels[s]}|{self.output_perm(s).cycle_string()}"];')
        for s in range(self.n_states):
            for i in range(self.p):
                lines.append(f'  s{s} -> s{int(self.delta[s, i])} [label="{i}/{int(self.output[s, i])}"];')
        lines.append('}')
        return '\n'.join(lines) + '\n'


def build_automaton(endo: VirtualEndomorphism, T: Optional[Transversal] = None,
                    require_simple: bool = True) -> MealyAutomaton:
    """
    One state per element of G: output(g) = sigma(g) and
    delta(g, i) = f(t_i g t_{sigma(g)(i)}^-1).
    """
    if require_simple and not endo.simple:
        raise NotSimple("the tree representation needs a simple endomorphism", group=endo.group.name)
    G = endo.group
    T = T if T is not None else default_transversal(endo)
    table = G.table
    reps = np.asarray(T.reps, dtype=np.int64)
    everything = np.arange(G.order)

    moved = table[np.ix_(reps, everything)]  # t_i g, shape (p, n)
    output = np.array([coset_action(G, endo.H, T, g).images for g in everything], dtype=np.int64)
    sections = table[moved.T, G.inv[reps[output]]]  # t_i g t_j^-1
    if not np.all(endo.H.mask[sections]):
        raise NotInH("a section fell outside H", group=G.name)
    delta = endo.f.image_of[sections]

    labels = tuple(G.label_of(g) for g in range(G.order))
    initial_of = dict(G.labels) if G.labels else {G.label_of(g): g for g in G.gen_ids}
    automaton = MealyAutomaton(endo.p, labels, output, delta, initial_of)
    logger.debug("built %d-state automaton for %s with T=%s", automaton.n_states, G.name, T.reps)
    return automaton


def parse_word(word: Word, p: int) -> List[int]:
    if isinstance(word, str):
        text = word.strip()
        if not text:
            return []
        letters = [int(c) for c in text.split(',')] if ',' in text else [int(c) for c in text]
    else:
        letters = [int(c) for c in word]
    for letter in letters:
        if not 0 <= letter < p:
            raise ValueError(f"letter {letter} outside alphabet 0..{p - 1}")
    return letters


def format_word(letters: Sequence[int], p: int) -> str:
    return ''.join(str(i) for i in letters) if p <= 10 else ','.join(str(i) for i in letters)


def act(A: MealyAutomaton, s: int, word: Word) -> Word:
    """Image of a word under state s; strings come back as strings."""
    letters = parse_word(word, A.p)
    result = []
    state = s
    for letter in letters:
        result.append(int(A.output[state, letter]))
        state = int(A.delta[state, letter])
    return format_word(result, A.p) if isinstance(word, str) else result


@dataclass(frozen=True)
class Portrait:
    depth: int
    node_perms: Dict[Tuple[int, ...], Perm]


def portrait(A: MealyAutomaton, s: int, depth: int) -> Portrait:
    """Root permutations of the sections at every node above ``depth``."""
    nodes: Dict[Tuple[int, ...], Perm] = {}
    level = [((), int(s))]
    for _ in range(depth):
        following = []
        for word, state in level:
            nodes[word] = A.output_perm(state)
            following.extend((word + (i,), int(A.delta[state, i])) for i in range(A.p))
        level = following
    return Portrait(depth, nodes)


@dataclass
class SeparationResult:
    depth: Optional[int]
    cap: int
    collisions: List[List[int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.depth is not None


def _refine(A: MealyAutomaton, classes: np.ndarray) -> np.ndarray:
    rows = np.concatenate([A.output, classes[A.delta]], axis=1)
    _, refined = np.unique(rows, axis=0, return_inverse=True)
    return refined.reshape(-1)


def portrait_classes(A: MealyAutomaton, depth: int) -> np.ndarray:
    """
    Class ids per state: equal ids exactly when the depth-``depth`` portraits
    agree. Refines output rows by the classes of the children.
    """
    classes = np.zeros(A.n_states, dtype=np.int64)
    for _ in range(depth):
        classes = _refine(A, classes)
    return classes


def separating_depth(A: MealyAutomaton, states: Sequence[int], cap: int = DEFAULT_DEPTH_CAP) -> SeparationResult:
    """Least d <= cap at which the given states have pairwise distinct portraits."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    states = np.asarray(list(states), dtype=np.int64)
    if np.unique(states).size < states.size:
        raise ValueError("states must be distinct")
    classes = np.zeros(A.n_states, dtype=np.int64)
    for d in range(1, cap + 1):
        classes = _refine(A, classes)
        if np.unique(classes[states]).size == states.size:
            return SeparationResult(d, cap)
    groups: Dict[int, List[int]] = {}
    for s in states.tolist():
        groups.setdefault(int(classes[s]), []).append(s)
    collisions = sorted((g for g in groups.values() if len(g) > 1), key=lambda g: (-len(g), g))
    logger.info("states not separated by depth %d: %d colliding classes", cap, len(collisions))
    return SeparationResult(None, cap, collisions)


def leaf_perms(A: MealyAutomaton, depth: int) -> np.ndarray:
    """
    Row s is the permutation of state s on the p^depth words of length
    ``depth``, leaves in lexicographic order.
    """
    n, p = A.n_states, A.p
    leaves = np.zeros((n, 1), dtype=np.int64)
    for d in range(1, depth + 1):
        width = p ** (d - 1)
        leaves = (A.output[:, :, None] * width + leaves[A.delta]).reshape(n, p * width)
    return leaves


def level_perm_group(A: MealyAutomaton, states: Sequence[int], depth: int,
                     cap: int = DEFAULT_CLOSURE_CAP, name: Optional[str] = None) -> GroupTable:
    """Closure of the given states acting on the p^depth leaves."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    sub, old = A.reachable(states)
    position = {int(s): k for k, s in enumerate(old)}
    rows = leaf_perms(sub, depth)
    perms = [Perm(tuple(rows[position[int(s)]])) for s in states]
    if not perms:
        perms = [Perm.identity(A.p ** depth)]
    return closure(perms, cap, name=name or f"level{depth}")


def first_level_stabilizer(A: MealyAutomaton, endo: VirtualEndomorphism) -> Subgroup:
    """{g : output(g) fixes letter 0}, read off a full automaton."""
    if A.n_states != endo.group.order:
        raise ValueError("needs the full automaton with one state per element")
    return Subgroup(endo.group, np.flatnonzero(A.output[:, 0] == 0))


def homomorphism_defects(A: MealyAutomaton, G: GroupTable, depth: int, samples: int,
                         seed: int = 0) -> List[Tuple[int, int]]:
    """
    Sampled pairs (g, h) whose product does not act as g followed by h on the
    leaves at ``depth``. Needs the full automaton with one state per element.
    """
    if A.n_states != G.order:
        raise ValueError("needs the full automaton with one state per element")
    rng = np.random.default_rng(seed)
    pairs = rng.integers(0, G.order, size=(samples, 2))
    leaves = leaf_perms(A, depth)
    g, h = pairs[:, 0], pairs[:, 1]
    expected = np.take_along_axis(leaves[h], leaves[g], axis=1)
    bad = np.any(leaves[G.table[g, h]] != expected, axis=1)
    return [tuple(int(x) for x in pair) for pair in pairs[bad]]
