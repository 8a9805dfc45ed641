"""
Run settings shared by the library and the command line tool

A setting is taken from, in decreasing priority, an override set on
:obj:`config` (``config["MARGIN_TOL"] = 1e-6``), an environment variable named
``CONSENSUS_LAB_<ITEM>`` (``CONSENSUS_LAB_SEED=7`` changes the default seed) or
``default_config``.
"""
from os import environ

__all__ = ["config"]

ENV_PREFIX = "CONSENSUS_LAB_"

# fallback values, environment strings are cast to their types
default_config = {
    "SEED": 0,
    # tolerance of the balanced/normal/symmetric structural checks
    "STRUCT_TOL": 1e-9,
    # band around zero in which determinants and root real parts are marginal
    "MARGIN_TOL": 1e-7,
    # eigenvalues with |lambda| <= ZERO_SNAP_RTOL * ||L|| are set to exactly 0
    "ZERO_SNAP_RTOL": 1e-8,
    "BOUND_TOL": 1e-9,
    "ORACLE_MAX_DIM": 5000,
    "STATE_OVERFLOW": 1e12,
    "SIM_STEP": 0.01,
    "SIM_HORIZON": 200.0,
    "MAX_NODES": 10000,
    "RATE_TOL": 1e-3,
    "JOBS": 1,
}

_TRUE_STRINGS = {"1", "true", "yes", "on"}


def _cast_like(value, default):
    if default is None or isinstance(value, type(default)):
        return value
    if isinstance(default, bool):
        return value.strip().lower() in _TRUE_STRINGS
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)

    return value


def lookup_defaults(item):
    """
    Look ``item`` up in ``default_config``

    Parameters
    ----------
    item : str
        Configuration to lookup (case insensitive)

    Returns
    -------
    Any
        Configuration, ``None`` if ``item`` has no default
    """
    return default_config.get(item.upper())


def lookup_env(item):
    """
    Look ``item`` up in the environment

    The variable read is ``CONSENSUS_LAB_<ITEM>``. Its value is cast to the type
    of the matching default, if there is one.

    Parameters
    ----------
    item : str
        Configuration to lookup

    Returns
    -------
    Any
        Configuration, ``None`` if the environment variable is not set

    Raises
    ------
    ValueError
        The environment variable cannot be cast to the type of the default
    """
    env_var = ENV_PREFIX + item.upper()
    value = environ.get(env_var)
    if value is None:
        return None

    try:
        return _cast_like(value, lookup_defaults(item))
    except ValueError:
        raise ValueError(
            "Could not interpret {}={!r} as {}".format(
                env_var, value, type(lookup_defaults(item)).__name__
            )
        )


class ConfigStore:
    """
    Case insensitive view over overrides, the environment and the defaults

    A key resolves to the first source that knows it:

        #. ``.overrides``, filled by item assignment
        #. ``CONSENSUS_LAB_<KEY>`` environment variables
        #. ``default_config``

    Unknown keys resolve to ``None``.
    """

    def __init__(self):
        self.overrides = {}
        self.config_lookups = [lookup_env, lookup_defaults]

    def __getitem__(self, item):
        key = item.upper()
        if key in self.overrides:
            return self.overrides[key]

        found = (lookup(key) for lookup in self.config_lookups)
        return next((value for value in found if value is not None), None)

    def __setitem__(self, key, value):
        self.overrides[key.upper()] = value

    def get(self, item, default=None):
        """
        Get a configuration value, falling back to ``default`` if it is unset
        """
        value = self[item]
        return default if value is None else value


config = ConfigStore()
