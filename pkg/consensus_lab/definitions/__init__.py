"""
Tables describing the supported graph families and reference gain sets.

The tables are stored as csv's in a `Data Package <https://frictionlessdata.io/
docs/creating-tabular-data-packages-in-python/>`_. The accompanying
``datapackage.json`` describes the meaning and type of every column.
"""
from pathlib import Path

import pandas as pd
from pandas_datapackage_reader import read_datapackage

from ..errors import DomainError

path = Path(__file__).parent

GRAPH_FAMILIES = read_datapackage(path, "graph_families").set_index("family")
""":obj:`pandas.DataFrame` Graph families known to ``consensus_lab.families``, indexed by tag
"""

REFERENCE_GAINS = read_datapackage(path, "reference_gains").set_index("name")
""":obj:`pandas.DataFrame` Named gain sets, one column per gain ``a0`` ... ``a4``
"""

FAMILY_TAGS = GRAPH_FAMILIES.index.tolist()
"""list: Tags of all supported graph families"""


def family_info(tag):
    """
    Get the definition row of a graph family

    Parameters
    ----------
    tag : str
        Family tag, e.g. ``"path_fuzz"``

    Returns
    -------
    dict
        Keys ``directed``, ``default_q`` (``None`` if not defined),
        ``enforces_degree_bound``, ``randomized`` and ``description``

    Raises
    ------
    DomainError
        ``tag`` is not a known family
    """
    if tag not in GRAPH_FAMILIES.index:
        raise DomainError(
            "Unknown graph family {!r}, expected one of {}".format(tag, FAMILY_TAGS)
        )

    row = GRAPH_FAMILIES.loc[tag]
    default_q = row["default_q"]

    return {
        "directed": bool(row["directed"]),
        "default_q": None if pd.isnull(default_q) else int(default_q),
        "enforces_degree_bound": bool(row["enforces_degree_bound"]),
        "randomized": bool(row["randomized"]),
        "description": row["description"],
    }


def reference_gain_values(name, n):
    """
    Get the first ``n`` gains ``a0, ..., a_{n-1}`` of a named gain set

    Raises
    ------
    DomainError
        The set is unknown or does not define ``n`` gains
    """
    if name not in REFERENCE_GAINS.index:
        raise DomainError(
            "Unknown gain set {!r}, expected one of {}".format(
                name, REFERENCE_GAINS.index.tolist()
            )
        )

    cols = ["a{}".format(k) for k in range(n)]
    missing = [c for c in cols if c not in REFERENCE_GAINS.columns]
    if missing:
        raise DomainError("Gain set {!r} stops before order {}".format(name, n))

    values = REFERENCE_GAINS.loc[name, cols]
    if values.isnull().any():
        raise DomainError("Gain set {!r} stops before order {}".format(name, n))

    return [float(v) for v in values]
