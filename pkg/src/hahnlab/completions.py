"""
Shell completion functions for hahnlab CLI.

Each function takes (ctx, param, incomplete) and returns a list of
CompletionItem objects. All functions are wrapped in try/except so
completion never crashes the shell.
"""

from click.shell_completion import CompletionItem

_FORMATS = ("json", "text")


def complete_scenarios(ctx, param, incomplete):
    """Complete scenario ids from the registry."""
    try:
        from hahnlab.runner import get_available_scenarios
        return [
            CompletionItem(s)
            for s in get_available_scenarios()
            if s.startswith(incomplete)
        ]
    except Exception:
        return []


def complete_formats(ctx, param, incomplete):
    """Complete report formats."""
    return [
        CompletionItem(f)
        for f in _FORMATS
        if f.startswith(incomplete)
    ]


def complete_config_keys(ctx, param, incomplete):
    """Complete configuration key names."""
    try:
        from hahnlab.config import _VALID_KEYS
        return [
            CompletionItem(k)
            for k in sorted(_VALID_KEYS)
            if k.startswith(incomplete)
        ]
    except Exception:
        return []


def complete_recipes(ctx, param, incomplete):
    """Complete named series of the scenario given by --scenario."""
    try:
        from hahnlab.runner import build_scenario
        scenario_id = ctx.params.get("scenario")
        if not scenario_id:
            return []
        names = build_scenario(scenario_id).recipes
        return [
            CompletionItem(name, help="indexed: name(k)" if recipe.indexed else None)
            for name, recipe in sorted(names.items())
            if name.startswith(incomplete)
        ]
    except Exception:
        return []
