"""Command line interface: catalog, analysis, search, automata and verification."""

import json
import logging
from pathlib import Path
from typing import Any, List, Optional

import click

from .catalog import CATALOG, DEFAULT_SUITE, GREEK_STATE_NAMES, NAMED_ENDOS, build, get_entry, list_entries
from .config import RunConfig
from .error_handler import (
    ConfigurationError, ErrorHandler, GroupFileError, NotAPGroup, SelfSimError, UnknownCatalogEntry,
)
from .group_core import GroupTable, group_prime
from .group_io import endo_from_dict, group_to_dict, load_group, read_json, save_group
from .logger import setup_logger
from .morphism import VirtualEndomorphism, search_simple_endos
from .tree_rep import MealyAutomaton, act, build_automaton, default_transversal, split_transversal
from .verify import (
    AnalysisReport, TheoremReport, analyze_group, check_exponent_transfer, check_restriction,
    check_split_lemma, check_theorem1, check_theorem2, run_suite, wreath_lift,
)

logger = logging.getLogger(__name__)

THEOREMS = ('1', '2', 'split', 'transfer', 'restriction', 'wreath')


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + '\n'


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, 'w', encoding='utf-8') as handle:
            handle.write(text)
        logger.info("wrote %s", out)
    else:
        click.echo(text, nl=False)


def _config(ctx: click.Context) -> RunConfig:
    return ctx.obj['config']


def load_group_ref(ref: str, config: RunConfig) -> GroupTable:
    """A catalog name or the path of a group file."""
    if ref in CATALOG:
        return build(get_entry(ref), config.closure_cap, config.table_limit)
    if Path(ref).is_file():
        return load_group(ref, config.closure_cap, config.table_limit)
    raise UnknownCatalogEntry(f"{ref!r} is neither a catalog group nor a group file",
                              known=', '.join(CATALOG))


def load_endo_ref(ref: str, G: GroupTable) -> VirtualEndomorphism:
    """A named endomorphism (e.g. example23) or the path of an endomorphism file."""
    if ref in NAMED_ENDOS:
        return NAMED_ENDOS[ref](G)
    data = read_json(ref)
    declared = data.get('group')
    if isinstance(declared, str) and declared in CATALOG and declared != G.name:
        logger.warning("endomorphism file names group %s but %s was given", declared, G.name)
    endo = endo_from_dict(data, G)
    endo.label = endo.label or Path(ref).stem
    return endo


def _prime(G: GroupTable) -> int:
    p = group_prime(G)
    if p is None:
        raise NotAPGroup(f"{G.name} has order {G.order}, not a prime power", order=G.order)
    return p


def _first_simple(G: GroupTable, config: RunConfig) -> VirtualEndomorphism:
    p = _prime(G)
    result = search_simple_endos(G, p, budget=config.budget_for(G.order), stop_at_first=True)
    if not result.endos:
        raise GroupFileError(f"no simple virtual endomorphism found for {G.name}; pass --endo")
    return result.endos[0]


@click.group()
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='JSON configuration file (see config/default_config.json).')
@click.option('--closure-cap', type=int, default=None, help='Largest group materialised.')
@click.option('--table-limit', type=int, default=None, help='Largest order with a full product table.')
@click.option('--depth-cap', type=int, default=None, help='Deepest tree level examined.')
@click.option('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR.')
@click.option('--log-file', default=None, help='Also log to this file.')
@click.pass_context
def cli(ctx, config_path, closure_cap, table_limit, depth_cap, log_level, log_file):
    """Self-similarity of finite p-groups via simple virtual endomorphisms."""
    ctx.ensure_object(dict)
    try:
        config = RunConfig.from_env()
        if config_path:
            from config_manager import ConfigManager
            manager = ConfigManager(config_path)
            config = manager.to_run_config(config)
            ctx.obj['suite_groups'] = manager.get_section('suite').get('groups')
        config = config.with_overrides(closure_cap=closure_cap, table_limit=table_limit,
                                       depth_cap=depth_cap, log_level=log_level, log_file=log_file)
    except ValueError as e:
        raise ConfigurationError(f"invalid configuration: {e}")
    setup_logger(config.log_level, config.log_file)
    ctx.obj['config'] = config


@cli.group()
def catalog():
    """Built-in groups."""


@catalog.command('list')
@click.option('--out', default=None)
def catalog_list(out):
    rows = [{'name': e.name, 'p': e.p, 'order': e.expected_order, 'exponent': e.expected_exponent,
             'tags': list(e.tags)} for e in list_entries()]
    _emit(dump_json(rows), out)
    return 0


@catalog.command('show')
@click.argument('name')
@click.option('--out', default=None)
@click.pass_context
def catalog_show(ctx, name, out):
    entry = get_entry(name)
    G = build(entry, _config(ctx).closure_cap, _config(ctx).table_limit)
    data = entry.to_dict()
    data['group'] = group_to_dict(G)
    data['built_order'] = G.order
    data['built_exponent'] = G.exponent
    _emit(dump_json(data), out)
    return 0


@catalog.command('export')
@click.argument('name')
@click.option('--out', required=True, help='Group file to write.')
@click.pass_context
def catalog_export(ctx, name, out):
    G = build(get_entry(name), _config(ctx).closure_cap, _config(ctx).table_limit)
    save_group(G, out)
    return 0


@cli.command()
@click.argument('group')
@click.option('--out', default=None)
@click.pass_context
def elements(ctx, group, out):
    """Element id <-> permutation dictionary."""
    G = load_group_ref(group, _config(ctx))
    rows = [{'id': x, 'label': G.label_of(x), 'cycles': G.perm(x).cycle_string(),
             'images': G.perms[x].tolist(), 'order': int(G.order_of[x])} for x in range(G.order)]
    _emit(dump_json({'group': G.name, 'order': G.order, 'elements': rows}), out)
    return 0


def _analysis_text(report: AnalysisReport) -> str:
    lines = [
        f"group:              {report.group}",
        f"order:              {report.order} (p = {report.p})",
        f"exponent:           {report.exponent}",
        f"power abelian:      {report.profile.power_abelian}",
        f"powerful / potent:  {report.powerful} / {report.potent}",
        f"regular:            {report.regular}",
        f"derived obstruction: {report.obstruction}",
        f"self-similar:       {report.self_similar}",
        '',
        report.profile.to_frame().to_string(),
    ]
    return '\n'.join(lines) + '\n'


@cli.command()
@click.argument('group')
@click.option('--search/--no-search', default=False, help='Also search for simple endomorphisms.')
@click.option('--format', 'fmt', type=click.Choice(['json', 'text']), default=None)
@click.option('--out', default=None)
@click.pass_context
def analyze(ctx, group, search, fmt, out):
    """Power profile, exponent, predicates and the derived obstruction."""
    config = _config(ctx)
    G = load_group_ref(group, config)
    report = analyze_group(G, config, run_search=search)
    fmt = fmt or ('text' if config.output_format == 'text' else 'json')
    _emit(_analysis_text(report) if fmt == 'text' else dump_json(report.to_dict()), out)
    return 0


@cli.command('search-selfsim')
@click.argument('group')
@click.option('--all', 'all_endos', is_flag=True, help='Collect every simple endomorphism.')
@click.option('--budget', type=int, default=None, help='Stop after this many homomorphisms.')
@click.option('--out', default=None)
@click.pass_context
def search_selfsim(ctx, group, all_endos, budget, out):
    """Search maximal subgroups and homomorphisms for simple virtual endomorphisms."""
    config = _config(ctx)
    G = load_group_ref(group, config)
    p = _prime(G)
    budget = budget if budget is not None else config.budget_for(G.order)
    result = search_simple_endos(G, p, budget=budget, extension_budget=budget * 50,
                                 stop_at_first=not all_endos)
    data = result.summary()
    data['endos'] = [endo.describe() for endo in result.endos]
    _emit(dump_json(data), out)
    return 0


@cli.command('emit-automaton')
@click.argument('group')
@click.option('--endo', 'endo_ref', default=None, help='Endomorphism file or a named one (example23).')
@click.option('--transversal', 'split_element', type=int, default=None,
              help='Element a outside H; T = {1, a, ..., a^(p-1)}.')
@click.option('--full', is_flag=True, help='One state per group element instead of the generator closure.')
@click.option('--format', 'fmt', type=click.Choice(['json', 'dot']), default='json')
@click.option('--out', default=None)
@click.pass_context
def emit_automaton(ctx, group, endo_ref, split_element, full, fmt, out):
    """Mealy automaton of the tree representation."""
    config = _config(ctx)
    G = load_group_ref(group, config)
    endo = load_endo_ref(endo_ref, G) if endo_ref else _first_simple(G, config)
    T = split_transversal(G, endo.H, split_element) if split_element is not None else default_transversal(endo)
    automaton = build_automaton(endo, T)
    if not full:
        automaton, _ = automaton.reachable(sorted(automaton.initial_of.values()))
    if endo.label == 'example23':
        automaton = automaton.relabel(GREEK_STATE_NAMES)
    if fmt == 'dot':
        _emit(automaton.to_dot(G.name), out)
    else:
        data = automaton.to_dict()
        data['transversal'] = list(T.reps)
        _emit(dump_json(data), out)
    return 0


@cli.command('act')
@click.option('--automaton', 'automaton_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--state', required=True, help='State id, label or initial name.')
@click.option('--word', required=True, help="Letters, e.g. 0102 (comma separated when p > 10).")
@click.option('--out', default=None)
def act_command(automaton_path, state, word, out):
    """Image of a tree word under one state."""
    data = read_json(automaton_path)
    try:
        automaton = MealyAutomaton.from_dict(data)
        s = automaton.state(state)
        image = act(automaton, s, word)
    except (KeyError, ValueError, TypeError) as e:
        raise GroupFileError(f"cannot act: {e}", path=automaton_path)
    _emit(dump_json({'state': s, 'word': word, 'image': image}), out)
    return 0


@cli.command()
@click.argument('group')
@click.option('--endo', 'endo_ref', default=None)
@click.option('--out', default=None)
@click.pass_context
def wreath(ctx, group, endo_ref, out):
    """Lift a self-similar action of G to G wr C_p and check its order."""
    config = _config(ctx)
    G = load_group_ref(group, config)
    endo = load_endo_ref(endo_ref, G) if endo_ref else _first_simple(G, config)
    automaton, report = wreath_lift(G, endo, config.depth_cap, config.closure_cap)
    data = report.to_dict()
    data['automaton_states'] = automaton.n_states if automaton else None
    _emit(dump_json(data), out)
    return 1 if report.violations else 0


def _theorem_report(theorem: str, G: GroupTable, endo: VirtualEndomorphism,
                    config: RunConfig) -> TheoremReport:
    if theorem == 'wreath':
        return wreath_lift(G, endo, config.depth_cap, config.closure_cap)[1]
    return {
        '1': check_theorem1,
        '2': check_theorem2,
        'split': check_split_lemma,
        'transfer': check_exponent_transfer,
        'restriction': check_restriction,
    }[theorem](G, endo)


@cli.command()
@click.option('--suite', type=click.Choice(['default']), default=None)
@click.option('--groups', default=None, help='Comma separated catalog names instead of the default suite.')
@click.option('--theorem', type=click.Choice(THEOREMS), default=None)
@click.option('--group', 'group_ref', default=None)
@click.option('--endo', 'endo_ref', default=None)
@click.option('--no-wreath', is_flag=True, help='Skip the wreath lifts in the suite.')
@click.option('--out', default=None)
@click.pass_context
def verify(ctx, suite, groups, theorem, group_ref, endo_ref, no_wreath, out):
    """Run the theorem checks; exit code 1 when any conclusion fails."""
    config = _config(ctx)
    if theorem:
        if not group_ref:
            raise click.UsageError('--theorem needs --group')
        G = load_group_ref(group_ref, config)
        if endo_ref:
            endos = [load_endo_ref(endo_ref, G)]
        else:
            result = search_simple_endos(G, _prime(G), budget=config.budget_for(G.order))
            endos = result.endos
        reports = [_theorem_report(theorem, G, endo, config) for endo in endos]
        violations = sum(len(r.violations) for r in reports)
        _emit(dump_json({'reports': [r.to_dict() for r in reports], 'violations': violations}), out)
        return 1 if violations else 0

    if suite is None and groups is None:
        raise click.UsageError('give --suite default, --groups or --theorem')
    names: List[str] = groups.split(',') if groups else list(_suite_groups(ctx))
    result = run_suite(names, config, wreath=not no_wreath)
    _emit(dump_json(result.to_dict()), out)
    summary = result.summary()
    logger.info("suite: %d groups, %d endomorphisms, %d violations",
                summary['groups'], summary['endomorphisms_checked'], summary['violations'])
    return 1 if result.violations else 0


def _suite_groups(ctx) -> List[str]:
    return list(ctx.obj.get('suite_groups') or DEFAULT_SUITE)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code: 0 ok, 1 violations, 2 errors."""
    handler = ErrorHandler(logging.getLogger('selfsim.cli'))
    try:
        result = cli.main(args=argv, prog_name='selfsim', standalone_mode=False)
    except click.exceptions.Abort:
        return 2
    except click.ClickException as e:
        e.show()
        return 2
    except (SelfSimError, ValueError) as e:
        code = handler.handle_error(e)
        click.echo(dump_json({'error': handler.describe(e)}), err=True, nl=False)
        return code
    if isinstance(result, int):
        return result
    return 0
