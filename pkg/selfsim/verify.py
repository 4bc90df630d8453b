"""
Executable checks of the structure theorems for self-similar p-groups.

Every check records whether its hypothesis applied and whether the conclusion
held. A violation is a check whose hypothesis applied and whose conclusion
failed. All checks are finite-scale: they test the statements on the groups
at hand and prove nothing beyond them.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from sympy import multiplicity

from .catalog import DEFAULT_SUITE, build, get_entry
from .config import RunConfig
from .error_handler import DegenerateRestriction, ErrorHandler, NotAPGroup, SelfSimError
from .group_core import (
    GroupTable, Subgroup, center, derived_subgroup, group_prime, join, maximal_subgroups,
    subgroup_generated, subgroup_table,
)
from .morphism import (
    SearchResult, VirtualEndomorphism, derived_obstruction, kernel_scan_index_p, level_kernel_chain,
    restrict_endo, search_simple_endos,
)
from .power_theory import PowerProfile, is_potent, is_powerful, is_regular, power_profile
from .tree_rep import (
    MealyAutomaton, build_automaton, first_level_stabilizer, homomorphism_defects, level_perm_group,
    separating_depth, split_candidates, split_transversal,
)

logger = logging.getLogger(__name__)

WREATH_ORDER_LIMIT = 60_000
FINITE_SCALE = "finite-scale check"


@dataclass
class Check:
    name: str
    hypothesis_met: bool
    conclusion_holds: bool
    witness: Optional[Dict[str, Any]] = None
    note: str = ''

    @property
    def violated(self) -> bool:
        return self.hypothesis_met and not self.conclusion_holds

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'hypothesis_met': self.hypothesis_met,
            'conclusion_holds': self.conclusion_holds,
            'witness': self.witness,
            'note': self.note,
        }


@dataclass
class TheoremReport:
    subject: Dict[str, Any]
    checks: List[Check] = field(default_factory=list)

    @property
    def violations(self) -> List[Check]:
        return [check for check in self.checks if check.violated]

    @property
    def verdict(self) -> str:
        return 'violation' if self.violations else 'ok'

    def check(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            'subject': self.subject,
            'checks': [check.to_dict() for check in self.checks],
            'verdict': self.verdict,
        }


def _subject(G: GroupTable, endo: Optional[VirtualEndomorphism] = None) -> Dict[str, Any]:
    subject: Dict[str, Any] = {'group': G.name, 'order': G.order}
    if endo is not None:
        gens = [int(g) for g in endo.H.gens]
        subject.update({
            'endo': endo.label,
            'H_gens': gens,
            'images': [endo.f(g) for g in gens],
        })
    return subject


def find_split_witness(endo: VirtualEndomorphism) -> Optional[int]:
    """Least element of order p in f(H) outside H, or None."""
    candidates = split_candidates(endo, image_only=True)
    return int(candidates[0]) if candidates.size else None


def verify_split(G: GroupTable, H: Subgroup, a: int, p: int) -> bool:
    """G = H x| <a>: a of order p outside H, <a> meets H trivially, H and a generate G."""
    if int(G.order_of[a]) != p or a in H:
        return False
    cyclic = subgroup_generated(G, [a])
    if np.any(cyclic.mask & H.mask & (np.arange(G.order) != 0)):
        return False
    return join(G, H, cyclic).order == G.order


class EndoChecker:
    """
    Runs the per-endomorphism checks for one group, sharing the group's power
    profile and the profiles of the subgroups H it meets.
    """

    def __init__(self, G: GroupTable, p: int, depth_cap: int = 8,
                 profile: Optional[PowerProfile] = None, samples: int = 200):
        self.G = G
        self.p = p
        self.depth_cap = depth_cap
        self.samples = samples
        self.profile = profile or power_profile(G, p)
        self._subgroup_profiles: Dict[bytes, Tuple[PowerProfile, int]] = {}

    def _subgroup_profile(self, H: Subgroup) -> Tuple[PowerProfile, int]:
        cached = self._subgroup_profiles.get(H.key)
        if cached is None:
            table = subgroup_table(self.G, H)
            cached = (power_profile(table, self.p), table.exponent)
            self._subgroup_profiles[H.key] = cached
        return cached

    def _split_element(self, endo: VirtualEndomorphism) -> Optional[int]:
        witness = find_split_witness(endo)
        if witness is None:
            candidates = split_candidates(endo, image_only=False)
            witness = int(candidates[0]) if candidates.size else None
        return witness

    def theorem1(self, endo: VirtualEndomorphism) -> Check:
        """Least n whose omega set is a nontrivial subgroup bounds the exponent by p^n."""
        least = None
        if endo.simple:
            for level in self.profile.levels:
                if level.omega_set_size > 1 and level.omega_is_subgroup:
                    least = level.n
                    break
        if least is None:
            return Check('theorem1', False, True, note=FINITE_SCALE)
        return Check('theorem1', True, self.G.exponent <= self.p ** least,
                     witness={'n': least, 'exponent': self.G.exponent}, note=FINITE_SCALE)

    def theorem2(self, endo: VirtualEndomorphism) -> Check:
        """A power abelian H forces exponent(H) = p and G = H x| C_p."""
        H_profile, H_exponent = self._subgroup_profile(endo.H)
        if not (endo.simple and H_profile.power_abelian):
            return Check('theorem2', False, True, note=FINITE_SCALE)
        a = self._split_element(endo)
        exponent_ok = endo.H.is_trivial() or H_exponent == self.p
        split_ok = a is not None and verify_split(self.G, endo.H, a, self.p)
        return Check('theorem2', True, exponent_ok and split_ok,
                     witness={'H_exponent': H_exponent, 'split_element': a}, note=FINITE_SCALE)

    def split_lemma(self, endo: VirtualEndomorphism) -> Check:
        """f(H) \\ H contains an element of order p whenever H does."""
        H_has_order_p = bool(np.any(self.G.order_of[endo.H.members] == self.p))
        if not (endo.simple and H_has_order_p):
            return Check('split_lemma', False, True)
        a = find_split_witness(endo)
        holds = a is not None and verify_split(self.G, endo.H, a, self.p)
        return Check('split_lemma', True, holds, witness={'element': a})

    def exponent_transfer(self, endo: VirtualEndomorphism, n: Optional[int] = None) -> Check:
        """H^(p^n) = 1 exactly when f(H)^(p^n) = 1."""
        top = int(multiplicity(self.p, self.G.exponent)) if self.G.exponent > 1 else 0
        levels = [n] if n is not None else list(range(1, top + 1))
        image = endo.image
        per_level = {}
        holds = True
        for k in levels:
            powers = self.G.power_map(self.p ** k)
            h_trivial = bool(np.all(powers[endo.H.members] == 0))
            image_trivial = bool(np.all(powers[image.members] == 0))
            per_level[str(k)] = [h_trivial, image_trivial]
            holds = holds and h_trivial == image_trivial
        return Check('exponent_transfer', endo.simple and bool(levels), holds,
                     witness={'levels': per_level})

    def restriction(self, endo: VirtualEndomorphism) -> Check:
        """f restricted to H meet f(H) is simple when f(H) is not inside H."""
        if not endo.simple:
            return Check('restriction', False, True)
        try:
            restricted = restrict_endo(endo)
        except DegenerateRestriction:
            return Check('restriction', False, True, note='image of f lies inside H')
        return Check('restriction', True, restricted.simple,
                     witness={'domain_order': restricted.H.order, 'group_order': restricted.group.order})

    def representation(self, endo: VirtualEndomorphism) -> Check:
        """The induced tree action is faithful, transitive on level 1 and fixes 0 exactly on H."""
        if not endo.simple:
            return Check('representation', False, True)
        A = build_automaton(endo)
        separation = separating_depth(A, range(A.n_states), self.depth_cap)
        stabilizer = first_level_stabilizer(A, endo)
        chain = level_kernel_chain(endo, limit=self.depth_cap + 1)
        kernel_depth = next((d for d, K in enumerate(chain) if K.is_trivial()), None)
        defects = homomorphism_defects(A, self.G, min(separation.depth or 1, 4), self.samples)
        holds = (separation.ok and stabilizer == endo.H and A.is_state_closed()
                 and A.first_level_transitive() and kernel_depth == separation.depth and not defects)
        return Check('representation', True, holds,
                     witness={'separating_depth': separation.depth, 'kernel_depth': kernel_depth,
                              'homomorphism_defects': [list(pair) for pair in defects[:5]]})

    def run(self, endo: VirtualEndomorphism) -> TheoremReport:
        report = TheoremReport(_subject(self.G, endo))
        report.checks = [
            self.theorem1(endo),
            self.theorem2(endo),
            self.split_lemma(endo),
            self.exponent_transfer(endo),
            self.restriction(endo),
            self.representation(endo),
        ]
        return report


def _single(G: GroupTable, endo: VirtualEndomorphism, check: Check) -> TheoremReport:
    return TheoremReport(_subject(G, endo), [check])


def check_theorem1(G: GroupTable, endo: VirtualEndomorphism) -> TheoremReport:
    return _single(G, endo, EndoChecker(G, endo.p).theorem1(endo))


def check_theorem2(G: GroupTable, endo: VirtualEndomorphism) -> TheoremReport:
    return _single(G, endo, EndoChecker(G, endo.p).theorem2(endo))


def check_split_lemma(G: GroupTable, endo: VirtualEndomorphism) -> TheoremReport:
    return _single(G, endo, EndoChecker(G, endo.p).split_lemma(endo))


def check_exponent_transfer(G: GroupTable, endo: VirtualEndomorphism, n: Optional[int] = None) -> TheoremReport:
    return _single(G, endo, EndoChecker(G, endo.p).exponent_transfer(endo, n))


def check_restriction(G: GroupTable, endo: VirtualEndomorphism) -> TheoremReport:
    return _single(G, endo, EndoChecker(G, endo.p).restriction(endo))


def has_abelian_maximal_subgroup(G: GroupTable, p: int) -> bool:
    return any(_is_abelian_subgroup(G, H) for H in maximal_subgroups(G, p))


def _is_abelian_subgroup(G: GroupTable, S: Subgroup) -> bool:
    gens = np.asarray(S.gens, dtype=np.int64)
    table = G.table
    return bool(np.array_equal(table[np.ix_(gens, gens)], table[np.ix_(gens, gens)].T))


def elementary_abelian_split(G: GroupTable, p: int) -> Optional[Tuple[int, int]]:
    """(index of H, element a) for an elementary abelian maximal H with a of order p outside it."""
    for position, H in enumerate(maximal_subgroups(G, p)):
        if not _is_abelian_subgroup(G, H) or np.any(G.order_of[H.members] > p):
            continue
        outside = np.flatnonzero(~H.mask & (G.order_of == p))
        if outside.size:
            return position, int(outside[0])
    return None


def group_checks(G: GroupTable, p: int, analysis: 'AnalysisReport') -> TheoremReport:
    """Checks about the group as a whole, using an analysis that already ran."""
    report = TheoremReport(_subject(G))
    profile = analysis.profile
    if analysis.regular is not None:
        report.checks.append(Check('regular_implies_power_abelian', analysis.regular,
                                   profile.power_abelian))
    report.checks.append(Check('potent_implies_power_abelian', analysis.potent, profile.power_abelian))
    report.checks.append(Check('abelian_is_power_abelian', analysis.abelian, profile.power_abelian))

    maximal = maximal_subgroups(G, p)
    scanned = kernel_scan_index_p(G, p) if len(maximal) <= 121 else None
    if scanned is not None:
        same = sorted(S.key for S in scanned) == sorted(S.key for S in maximal)
        report.checks.append(Check('maximal_subgroup_scan', True, same,
                                   witness={'hyperplanes': len(maximal), 'kernels': len(scanned)}))

    search = analysis.search
    if analysis.obstruction:
        empty = search is None or not search.endos
        report.checks.append(Check('obstruction_excludes_simple_endos', True, empty,
                                   witness={'search_run': search is not None}))
    else:
        report.checks.append(Check('obstruction_excludes_simple_endos', False, True))

    if search is not None and search.exhausted and has_abelian_maximal_subgroup(G, p):
        split = elementary_abelian_split(G, p)
        report.checks.append(Check(
            'abelian_maximal_characterisation', True, bool(search.endos) == (split is not None),
            witness={'self_similar': bool(search.endos),
                     'split': None if split is None else {'subgroup': split[0], 'element': split[1]}}))
    else:
        report.checks.append(Check('abelian_maximal_characterisation', False, True))
    return report


def _lift_automaton(inner: MealyAutomaton, generators: List[Tuple[str, int]]) -> MealyAutomaton:
    """Wrapper states w_g = (g, 1, ..., 1) for every generator and the rooted cycle sigma."""
    n, p = inner.n_states, inner.p
    k = len(generators)
    identity = np.arange(p, dtype=np.int64)
    wrap_delta = np.zeros((k, p), dtype=np.int64)
    wrap_delta[:, 0] = [state for _, state in generators]
    output = np.vstack([inner.output, np.tile(identity, (k, 1)), ((identity + 1) % p)[None, :]])
    delta = np.vstack([inner.delta, wrap_delta, np.zeros((1, p), dtype=np.int64)])
    labels = inner.labels + tuple(f"w_{name}" for name, _ in generators) + ('sigma',)
    initial_of = {f"w_{name}": n + j for j, (name, _) in enumerate(generators)}
    initial_of['sigma'] = n + k
    return MealyAutomaton(p, labels, output, delta, initial_of)


def wreath_lift(G: GroupTable, endo: VirtualEndomorphism, depth_cap: int = 8,
                cap: int = 250_000) -> Tuple[Optional[MealyAutomaton], TheoremReport]:
    """
    Self-similar action of G wr C_p built from the action of G. The lifted
    group is generated by the wrappers and sigma; its order on the leaves at
    depth (separating depth of G) + 1 must be p |G|^p.
    """
    report = TheoremReport(_subject(G, endo))
    p = endo.p
    a = find_split_witness(endo)
    if a is None and endo.H.is_trivial():
        candidates = split_candidates(endo, image_only=False)
        a = int(candidates[0]) if candidates.size else None
    if not endo.simple or a is None:
        report.checks.append(Check('wreath_order', False, True, note='no simple split endomorphism'))
        return None, report

    inner = build_automaton(endo, split_transversal(G, endo.H, a))
    separation = separating_depth(inner, range(inner.n_states), depth_cap)
    if not separation.ok:
        report.checks.append(Check('wreath_order', False, True, note='inner action not separated'))
        return None, report

    generators = sorted(inner.initial_of.items(), key=lambda item: (item[1], item[0]))
    lifted = _lift_automaton(inner, generators)
    states = list(lifted.initial_of.values())
    target = p * G.order ** p

    depth = separation.depth + 1
    orders = {}
    while True:
        level = level_perm_group(lifted, states, depth, cap, name=f"{G.name}.wreath{depth}")
        orders[str(depth)] = level.order
        if level.order == target or depth >= depth_cap + 1:
            break
        depth += 1
    logger.info("%s: wreath lift has order %d at depth %d (target %d)", G.name, level.order, depth, target)

    report.checks.extend([
        Check('state_closure', True, lifted.is_state_closed()),
        Check('level1_transitive', True, lifted.first_level_transitive(states)),
        Check('wreath_order', True, level.order == target,
              witness={'split_element': a, 'depth': depth, 'orders': orders, 'target': target}),
    ])
    return lifted, report


@dataclass
class AnalysisReport:
    group: str
    order: int
    degree: int
    p: int
    exponent: int
    abelian: bool
    center_order: int
    derived_order: int
    maximal_subgroups: int
    profile: PowerProfile
    powerful: bool
    potent: bool
    regular: Optional[bool]
    obstruction: bool
    search: Optional[SearchResult] = None
    search_note: str = ''

    @property
    def self_similar(self) -> Optional[bool]:
        if self.obstruction:
            return False
        return None if self.search is None else self.search.self_similar

    def to_dict(self) -> dict:
        search = None
        if self.search is not None:
            search = self.search.summary()
            search['endos'] = [endo.describe() for endo in self.search.endos]
        return {
            'group': self.group,
            'order': self.order,
            'degree': self.degree,
            'p': self.p,
            'exponent': self.exponent,
            'abelian': self.abelian,
            'center_order': self.center_order,
            'derived_order': self.derived_order,
            'maximal_subgroups': self.maximal_subgroups,
            'power_profile': self.profile.to_dict(),
            'power_abelian': self.profile.power_abelian,
            'powerful': self.powerful,
            'potent': self.potent,
            'regular': self.regular,
            'derived_obstruction': self.obstruction,
            'self_similar': self.self_similar,
            'search': search,
            'search_note': self.search_note,
        }


def analyze_group(G: GroupTable, config: Optional[RunConfig] = None, p: Optional[int] = None,
                  run_search: bool = True, all_endos: bool = True) -> AnalysisReport:
    """Power structure, predicates, the derived obstruction and (optionally) the search."""
    config = config or RunConfig()
    p = p or group_prime(G)
    if p is None:
        raise NotAPGroup(f"{G.name} has order {G.order}, not a prime power", order=G.order)
    profile = power_profile(G, p)
    obstruction = derived_obstruction(G, p)
    report = AnalysisReport(
        group=G.name, order=G.order, degree=G.degree, p=p, exponent=G.exponent,
        abelian=G.is_abelian, center_order=center(G).order, derived_order=derived_subgroup(G).order,
        maximal_subgroups=len(maximal_subgroups(G, p)), profile=profile,
        powerful=is_powerful(G, p), potent=is_potent(G, p), regular=is_regular(G, p),
        obstruction=obstruction,
    )
    if not run_search:
        report.search_note = 'search not requested'
    elif obstruction and config.skip_search_on_obstruction:
        report.search_note = 'skipped: [H,H] = [G,G] for every maximal H'
    else:
        budget = config.budget_for(G.order)
        report.search = search_simple_endos(G, p, budget=budget, extension_budget=budget * 50,
                                            stop_at_first=not all_endos)
        if not report.search.exhausted and all_endos:
            report.search_note = f'budget of {budget} homomorphisms reached'
    return report


@dataclass
class SuiteEntry:
    name: str
    analysis: Optional[AnalysisReport] = None
    group_report: Optional[TheoremReport] = None
    endo_reports: List[TheoremReport] = field(default_factory=list)
    wreath_report: Optional[TheoremReport] = None
    error: Optional[Dict[str, Any]] = None

    def reports(self) -> List[TheoremReport]:
        found = [self.group_report] if self.group_report else []
        found.extend(self.endo_reports)
        if self.wreath_report:
            found.append(self.wreath_report)
        return found

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'analysis': self.analysis.to_dict() if self.analysis else None,
            'group_checks': self.group_report.to_dict() if self.group_report else None,
            'endo_reports': [report.to_dict() for report in self.endo_reports],
            'wreath': self.wreath_report.to_dict() if self.wreath_report else None,
            'error': self.error,
        }


@dataclass
class SuiteResult:
    entries: List[SuiteEntry]
    errors: Dict[str, int] = field(default_factory=dict)

    @property
    def reports(self) -> List[TheoremReport]:
        return [report for entry in self.entries for report in entry.reports()]

    @property
    def violations(self) -> int:
        return sum(len(report.violations) for report in self.reports)

    def summary(self) -> dict:
        per_check: Dict[str, Dict[str, int]] = {}
        for report in self.reports:
            for check in report.checks:
                counts = per_check.setdefault(check.name, {'checked': 0, 'hypotheses_met': 0,
                                                           'conclusions_held': 0, 'violations': 0})
                counts['checked'] += 1
                counts['hypotheses_met'] += int(check.hypothesis_met)
                counts['conclusions_held'] += int(check.hypothesis_met and check.conclusion_holds)
                counts['violations'] += int(check.violated)
        return {
            'groups': len(self.entries),
            'failed_groups': sum(1 for entry in self.entries if entry.error),
            'endomorphisms_checked': sum(len(entry.endo_reports) for entry in self.entries),
            'checks': dict(sorted(per_check.items())),
            'violations': self.violations,
            'errors': dict(sorted(self.errors.items())),
        }

    def to_dict(self) -> dict:
        return {'entries': [entry.to_dict() for entry in self.entries], 'summary': self.summary()}


def run_suite(names: Optional[Iterable[str]] = None, config: Optional[RunConfig] = None,
              wreath: bool = True) -> SuiteResult:
    """
    Analyse every selected catalog group and run all checks on every simple
    endomorphism found. Errors are recorded per group and never stop the run.
    """
    config = config or RunConfig()
    handler = ErrorHandler(logging.getLogger('selfsim.suite'))
    entries = []
    for name in (names if names is not None else DEFAULT_SUITE):
        entry = SuiteEntry(name)
        entries.append(entry)
        try:
            _run_entry(entry, config, wreath)
        except SelfSimError as e:
            handler.handle_error(e, {'group': name})
            entry.error = handler.describe(e)
        reports = entry.reports()
        logger.info("%s: %d endomorphisms checked, %d violations", name, len(entry.endo_reports),
                    sum(len(report.violations) for report in reports))
        for report in reports:
            for check in report.violations:
                logger.error("%s: %s violated %s", name, check.name, report.subject)
    return SuiteResult(entries, handler.get_error_summary())


def _run_entry(entry: SuiteEntry, config: RunConfig, wreath: bool):
    catalog_entry = get_entry(entry.name)
    G = build(catalog_entry, config.closure_cap, config.table_limit)
    p = catalog_entry.p
    analysis = analyze_group(G, config, p)
    entry.analysis = analysis
    entry.group_report = group_checks(G, p, analysis)
    if analysis.search is None:
        return
    checker = EndoChecker(G, p, config.depth_cap, analysis.profile, config.property_samples)
    entry.endo_reports = [checker.run(endo) for endo in analysis.search.endos]
    if wreath and analysis.search.endos and p * G.order ** p <= WREATH_ORDER_LIMIT:
        for endo in analysis.search.endos:
            if find_split_witness(endo) is not None or endo.H.is_trivial():
                _, entry.wreath_report = wreath_lift(G, endo, config.depth_cap, config.closure_cap)
                break
