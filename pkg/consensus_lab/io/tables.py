"""
Writers for the plot-ready tables, reports and run manifests

All text output is utf-8 with ``\\n`` line endings so that reruns with the same
inputs give byte-identical files on every platform.
"""
import json

import yaml

from ..utils import FLOAT_FORMAT, format_float

NA_REP = "none"
"""str: Representation of missing values in CSV output"""


def write_frame_csv(df, filepath, na_rep=NA_REP, comment_lines=None):
    """
    Write a :obj:`pandas.DataFrame` as CSV

    Parameters
    ----------
    df : :obj:`pandas.DataFrame`
        Table to write, the index is dropped

    filepath : str
        Filepath of the file to write to.

    na_rep : str
        Representation of missing values

    comment_lines : list of str
        Lines appended after the table, each prefixed with ``# ``
    """
    with open(filepath, "w", encoding="utf-8", newline="\n") as fh:
        df.to_csv(
            fh,
            index=False,
            float_format=FLOAT_FORMAT,
            na_rep=na_rep,
            lineterminator="\n",
        )
        for line in comment_lines or []:
            fh.write("# {}\n".format(line))


def write_trace_csv(trace, filepath):
    """
    Write a simulation trace in long format followed by its summary line
    """
    summary = trace.summary()
    line = " ".join(
        "{}={}".format(k, _format_value(summary[k])) for k in sorted(summary)
    )
    write_frame_csv(trace.to_frame(), filepath, comment_lines=[line])


def _format_value(value):
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return NA_REP

    return str(value).lower() if isinstance(value, bool) else str(value)


def write_json(obj, filepath):
    with open(filepath, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_json(filepath):
    with open(filepath, encoding="utf-8") as fh:
        return json.load(fh)


def write_yaml(obj, filepath):
    with open(filepath, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(obj, fh, default_flow_style=False, sort_keys=True)


def read_yaml(filepath):
    with open(filepath, encoding="utf-8") as fh:
        return yaml.safe_load(fh)
