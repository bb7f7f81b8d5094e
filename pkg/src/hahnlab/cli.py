"""
Command-line interface for hahnlab.
"""

import itertools
import logging
import sys
import time
from typing import Optional

import click
from click.core import ParameterSource
from click.shell_completion import get_completion_class

from hahnlab import __version__
from hahnlab.coefficients import FieldSpec
from hahnlab.completions import complete_config_keys, complete_formats, complete_recipes, complete_scenarios
from hahnlab.config import (RUN_KEYS, _VALID_KEYS, delete_config, get_config, list_config, run_config,
                            set_config, validate_file)
from hahnlab.exponents import BasisContext, RefinementBudgetExceeded, format_exponent
from hahnlab.formatter import export_file, format_output
from hahnlab.parser import parse_exponent, parse_series_literal
from hahnlab.runner import build_scenario, exit_code, get_available_scenarios, run_all
from hahnlab.series import TermBudgetExceeded, format_terms

_LOG_LEVELS = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warning': logging.WARNING,
    'error': logging.ERROR,
}


def setup_logging(verbose: int) -> None:
    """Configure the root logger once; -v is INFO, -vv DEBUG, else the log_level key."""
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = _LOG_LEVELS.get((get_config('log_level') or 'warning').lower(), logging.WARNING)
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format='%(asctime)s %(levelname)-7s %(name)s: %(message)s',
    )
    logging.getLogger().setLevel(level)


def print_progress(scenario_id: str, status: str) -> None:
    """Print progress update for a scenario."""
    click.echo(f"  {scenario_id:20} {status}", err=True)


@click.group()
@click.version_option(version=__version__, prog_name='hahnlab')
@click.option('--verbose', '-v', count=True, help='Log progress to stderr (-vv for debug)')
@click.pass_context
def main(ctx, verbose: int) -> None:
    """
    hahnlab - exact valuation experiments over Hahn series fields.

    Examples:

        # Run every scenario and print a text report
        hahnlab verify

        # One scenario at p=5, JSON report to a file
        hahnlab verify -s monster-5-2 -p 5 -f json -o monster.json

        # Inspect a series literal inside a scenario
        hahnlab parse --expr "a(2)" --scenario example-5-1-1

        # List scenarios
        hahnlab list-scenarios
    """
    ctx.ensure_object(dict)
    ctx.obj['verbose'] = verbose
    setup_logging(verbose)


@main.command()
@click.option('--scenario', '-s', 'scenarios', multiple=True, shell_complete=complete_scenarios,
              help='Scenario id(s) to run (default: all)')
@click.option('--prime', '-p', default=3, type=click.IntRange(min=2), help='Characteristic p (default: 3)')
@click.option('--levels', '-l', default=5, type=click.IntRange(min=1), help='Number of approximation levels (default: 5)')
@click.option('--budget', '-b', default=256, type=click.IntRange(min=1),
              help='Refinement budget for exponent comparisons (default: 256)')
@click.option('--term-budget', default=10000, type=click.IntRange(min=1),
              help='Maximum series items drawn per query (default: 10000)')
@click.option('--window-extra', default=2, type=click.IntRange(min=1),
              help='Extra levels used for truncation windows (default: 2)')
@click.option('--format', '-f', 'output_format', type=click.Choice(['json', 'text']), default='text',
              shell_complete=complete_formats, help='Report format')
@click.option('--output', '-o', 'output_file', default=None, help='Write the report to a file instead of stdout')
@click.option('--workers', '-w', default=4, type=click.IntRange(min=1), help='Scenarios run in parallel (default: 4)')
@click.option('--quiet', '-q', is_flag=True, help='Suppress progress output')
@click.pass_context
def verify(
    ctx,
    scenarios: tuple,
    prime: int,
    levels: int,
    budget: int,
    term_budget: int,
    window_extra: int,
    output_format: str,
    output_file: Optional[str],
    workers: int,
    quiet: bool,
) -> None:
    """
    Run scenario checks and report PASS, FAIL or INCONCLUSIVE for each.

    Exit status is 0 when every check passes, 1 when any fails and 3 when
    the worst outcome is INCONCLUSIVE.
    """
    # Apply config defaults for options not explicitly provided
    src = ctx.get_parameter_source
    given = {'prime': prime, 'levels': levels, 'budget': budget, 'term_budget': term_budget,
             'window_extra': window_extra, 'workers': workers}
    overrides = {k: v for k, v in given.items() if k in RUN_KEYS and src(k) == ParameterSource.COMMANDLINE}
    if src('output_format') != ParameterSource.COMMANDLINE:
        cfg_format = get_config('format')
        if cfg_format and cfg_format in ('json', 'text'):
            output_format = cfg_format

    scenario_list = None
    if scenarios:
        scenario_list = []
        for s in scenarios:
            scenario_list.extend([x.strip() for x in s.split(',') if x.strip()])

    try:
        config = run_config(**overrides)
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)

    if not quiet:
        click.echo(f"\nRunning scenarios (p={config.prime}, levels={config.levels})...", err=True)
        click.echo("-" * 40, err=True)

    start_time = time.time()
    progress_callback = None if quiet else print_progress

    try:
        reports = run_all(scenario_list, config, progress_callback=progress_callback)
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)

    if not quiet:
        click.echo("-" * 40, err=True)
        click.echo(f"  Duration: {time.time() - start_time:.1f}s\n", err=True)

    try:
        output_content = format_output(reports, output_format)
    except Exception as e:
        click.echo(f"Error formatting output: {e}", err=True)
        sys.exit(1)

    if output_file:
        try:
            export_file(output_content, output_file)
            if not quiet:
                click.echo(f"Report saved to: {output_file}", err=True)
        except OSError as e:
            click.echo(f"Error writing output: {e}", err=True)
            sys.exit(1)
    else:
        click.echo(output_content, nl=False)

    sys.exit(exit_code(reports))


@main.command('list-scenarios')
def list_scenarios() -> None:
    """List registered scenarios with their titles."""
    scenarios = get_available_scenarios()
    click.echo(f"\nAvailable scenarios ({len(scenarios)}):\n")
    for i, scenario_id in enumerate(scenarios, 1):
        try:
            title = build_scenario(scenario_id).title
        except ValueError as e:
            title = f"(unavailable at default settings: {e})"
        click.echo(f"  {i:3}. {scenario_id:16} {title}")
    click.echo()


@main.command()
@click.option('--expr', '-e', default=None, shell_complete=complete_recipes, help='Series literal, e.g. "t^(-1) + 2*t^(-1/3)"')
@click.option('--exponent', '-x', default=None, help='Exponent literal, e.g. "(-1/3)*pi + 2*r3"')
@click.option('--scenario', '-s', default=None, shell_complete=complete_scenarios,
              help='Resolve named series (a(2), alpha, ...) against this scenario')
@click.option('--prime', '-p', default=3, type=click.IntRange(min=2), help='Characteristic p (default: 3)')
@click.option('--degree', '-m', default=1, type=click.IntRange(min=1),
              help='Coefficient field degree without a scenario (default: 1)')
@click.option('--terms', '-n', 'max_terms', default=8, type=click.IntRange(min=1), help='Number of terms to show')
@click.option('--below', default=None, help='Only show terms with exponent below this literal')
@click.option('--name', 'show_names', is_flag=True, help='List the named series of --scenario')
@click.pass_context
def parse(ctx, expr, exponent, scenario, prime, degree, max_terms, below, show_names):
    """
    Parse a series or exponent literal and print its leading terms.

    \b
    Examples:
      hahnlab parse --expr "t^((-1/3)*pi) + 2*t^(-1/3)"
      hahnlab parse --exponent "-1/3 - r2"
      hahnlab parse --expr "alpha" --scenario monster-5-2 --below 0
      hahnlab parse --scenario asd-6-3 --name
    """
    if not expr and not exponent and not show_names:
        click.echo("Error: Provide --expr, --exponent or --name", err=True)
        sys.exit(1)

    try:
        if scenario:
            given = {'prime': prime} if ctx.get_parameter_source('prime') == ParameterSource.COMMANDLINE else {}
            built = build_scenario(scenario, run_config(**given))
            field, context, names = built.base_field, built.context, built.recipes
        else:
            field, context, names = FieldSpec(prime, degree), BasisContext(prime), {}
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)

    if show_names:
        if not names:
            click.echo("  No named series (use --scenario)")
        for name in sorted(names):
            suffix = '(k)' if names[name].indexed else ''
            click.echo(f"  {name}{suffix}")

    try:
        if exponent:
            click.echo(f"  exponent: {format_exponent(parse_exponent(exponent, context))}")
        if expr:
            series = parse_series_literal(expr, field, context, names)
            bound = parse_exponent(below, context) if below else None
            shown = list(itertools.islice(series.terms(bound), max_terms))
            click.echo(f"  terms:     {format_terms(shown)}{' + ...' if len(shown) == max_terms else ''}")
            valuation = series.val()
            click.echo(f"  valuation: {'infinity' if valuation is None else format_exponent(valuation)}")
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)
    except (TermBudgetExceeded, RefinementBudgetExceeded) as e:
        click.echo(f"Error: budget exhausted: {e}", err=True)
        sys.exit(3)


@main.group(invoke_without_command=True)
@click.pass_context
def config(ctx):
    """Manage hahnlab configuration (~/.hahnlab/config).

    \b
    Valid keys:
      prime         Prime characteristic
      levels        Positive integer
      budget        Comparison refinement budget
      term_budget   Series items drawn per query
      window_extra  Extra levels for windows
      workers       Positive integer
      format        json | text
      log_level     debug | info | warning | error

    \b
    Examples:
      hahnlab config set prime 5
      hahnlab config get prime
      hahnlab config list
      hahnlab config delete prime
    """
    if ctx.invoked_subcommand is None:
        ctx.invoke(config_list)


@config.command('set')
@click.argument('key', shell_complete=complete_config_keys)
@click.argument('value')
def config_set(key, value):
    """Set a configuration value."""
    try:
        set_config(key, value)
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)
    click.echo(f"  {key}={value}")


@config.command('get')
@click.argument('key', shell_complete=complete_config_keys)
def config_get(key):
    """Get a configuration value."""
    value = get_config(key)
    if value is None:
        click.echo(f"  {key} is not set")
    else:
        click.echo(f"  {key}={value}")


@config.command('list')
def config_list():
    """List all configuration values."""
    errors = validate_file()
    if errors:
        click.echo("  Warning: invalid entries found in config file (ignored):", err=True)
        for line_num, error in errors:
            click.echo(f"    Line {line_num}: {error}", err=True)
        click.echo()

    cfg = list_config()
    if not cfg:
        click.echo("  No configuration set.\n")
        click.echo("  Valid keys:")
        for k in sorted(_VALID_KEYS):
            allowed = _VALID_KEYS[k]
            if allowed is None:
                hint = "<value>"
            elif allowed in ("integer", "prime"):
                hint = f"<{allowed}>"
            else:
                hint = " | ".join(allowed)
            click.echo(f"    {k:<14} {hint}")
        click.echo("\n  Usage: hahnlab config set <key> <value>")
        return
    for k in sorted(cfg):
        click.echo(f"  {k}={cfg[k]}")


@config.command('delete')
@click.argument('key', shell_complete=complete_config_keys)
def config_delete(key):
    """Delete a configuration value."""
    if get_config(key) is None:
        click.echo(f"  {key} is not set")
    else:
        delete_config(key)
        click.echo(f"  Deleted {key}")


@config.command('validate')
def config_validate():
    """Check the config file and exit 1 on bad lines."""
    errors = validate_file()
    if not errors:
        click.echo("  Config OK")
        return
    for line_num, error in errors:
        click.echo(f"  Line {line_num}: {error}", err=True)
    sys.exit(1)


@main.command()
@click.argument('shell', type=click.Choice(['bash', 'zsh', 'fish']))
def completion(shell):
    """Generate shell completion script.

    \b
    Activate for your shell:
      eval "$(hahnlab completion bash)"     # add to ~/.bashrc
      eval "$(hahnlab completion zsh)"      # add to ~/.zshrc
      hahnlab completion fish > ~/.config/fish/completions/hahnlab.fish
    """
    comp_cls = get_completion_class(shell)
    comp = comp_cls(main, {}, "hahnlab", "_HAHNLAB_COMPLETE")
    click.echo(comp.source())


if __name__ == '__main__':
    main()
