"""
Utility functions shared across the kicked-top modules.
"""

import copy

import numpy as np

PLUS = "+"
MINUS = "-"
OUTCOME_BITS = {PLUS: 1, MINUS: 0}


def _outcome_bit(outcome, history):
    if isinstance(outcome, str):
        if outcome not in OUTCOME_BITS:
            raise ValueError(f"Invalid history character {outcome!r} in {history!r} (expected '+' or '-')")
        return OUTCOME_BITS[outcome]
    if isinstance(outcome, (bool, int, np.integer)) and outcome in (0, 1):
        return int(outcome)
    raise ValueError(f"Invalid history outcome {outcome!r} in {history!r} (expected '+', '-', 0 or 1)")


def parse_history(history):
    """
    Converts a measurement history into a tuple of bits.

    Accepts a string of '+'/'-' characters or a sequence whose items are
    '+'/'-' strings or the integers 0/1. '+' (J_z >= 0) maps to 1, '-' to 0.

    Returns:
        tuple: bits, first measurement first
    """
    if isinstance(history, str):
        history = history.strip()
    return tuple(_outcome_bit(outcome, history) for outcome in history)


def history_key(bits):
    """Packs bits into an integer, most-significant bit = first measurement."""
    key = 0
    for b in bits:
        key = (key << 1) | b
    return key


def history_to_string(key, depth):
    """Unpacks an integer history key of the given depth into a '+'/'-' string."""
    key = int(key)
    return "".join(PLUS if (key >> (depth - 1 - i)) & 1 else MINUS for i in range(depth))


def format_number(value, digits=17):
    """Formats a float with a fixed number of significant digits (CSV fields)."""
    return f"{float(value):.{digits}g}"


def apply_overrides(config, modifications):
    """
    Returns a copy of a nested config with dotted-path overrides applied.

    Args:
        config: Nested configuration dict
        modifications: Dict of {"section.key": value}

    Returns:
        dict: Modified configuration
    """
    config = copy.deepcopy(config)

    for path, value in modifications.items():
        keys = path.split(".")
        current = config
        for key in keys[:-1]:
            current = current.setdefault(key, {})
        current[keys[-1]] = value

    return config


def flatten_config(config, prefix=""):
    """Maps the dotted path of every leaf in a nested config dict to its value."""
    flat = {}
    for key, value in config.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten_config(value, path + "."))
        else:
            flat[path] = value
    return flat
