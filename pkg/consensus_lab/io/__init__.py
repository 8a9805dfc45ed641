"""
Reading and writing of consensus_lab files

Graph files and binary trace dumps are dispatched on their file name with
:func:`determine_tool`. Plot-ready tables, reports and run manifests are written
with the helpers in :mod:`consensus_lab.io.tables`.
"""
import re
from os.path import basename, exists

from ..errors import NoReaderWriterError
from .binout import TraceData, _TraceBinaryReader, _TraceBinaryWriter
from .graph_file import _GraphReader, _GraphWriter
from .tables import (
    read_json,
    read_yaml,
    write_frame_csv,
    write_json,
    write_trace_csv,
    write_yaml,
)

FILE_TOOLS = {
    "graph": {
        "regexp": r"^.*\.(graph|txt)$",
        "reader": _GraphReader,
        "writer": _GraphWriter,
    },
    "trace": {
        "regexp": r"^.*\.ctrace$",
        "reader": _TraceBinaryReader,
        "writer": _TraceBinaryWriter,
    },
}


def determine_tool(filepath, tool_to_get):
    """
    Determine the tool to use for reading/writing

    The file name (not the directory) is matched against the regular expressions
    of :data:`FILE_TOOLS`.

    Parameters
    ----------
    filepath : str
        Name of the file to read/write, including extension

    tool_to_get : {"reader", "writer"}
        The tool to get

    Returns
    -------
    class
        Reader or writer class

    Raises
    ------
    NoReaderWriterError
        No file type matches ``filepath`` or ``tool_to_get`` is invalid
    """
    if tool_to_get not in ("reader", "writer"):
        raise NoReaderWriterError(
            "Cannot get a {!r}, valid options are: 'reader', 'writer'".format(
                tool_to_get
            )
        )

    fbase = basename(str(filepath))
    for file_tools in FILE_TOOLS.values():
        if re.match(file_tools["regexp"], fbase):
            return file_tools[tool_to_get]

    regexp_list_str = "\n".join(
        "{}: {}".format(k, v["regexp"]) for k, v in FILE_TOOLS.items()
    )
    raise NoReaderWriterError(
        "Couldn't find appropriate {} for {}.\nThe file must be one of the "
        "following types and the filepath must match its corresponding regular "
        "expression:\n{}".format(tool_to_get, fbase, regexp_list_str)
    )


def _check_file_exists(filepath):
    if not exists(filepath):
        raise FileNotFoundError("Cannot find {}".format(filepath))


def read_graph(filepath):
    """
    Read a graph file

    Returns
    -------
    :obj:`consensus_lab.graph.Graph`

    Raises
    ------
    GraphFileError
        The file cannot be parsed, the message names the offending line
    """
    _check_file_exists(filepath)
    Reader = determine_tool(filepath, "reader")
    if Reader is not _GraphReader:
        raise NoReaderWriterError("{} is not a graph file".format(filepath))

    return Reader(filepath).read()


def write_graph(g, filepath):
    """Write ``g`` in the graph text format"""
    Writer = determine_tool(filepath, "writer")
    if Writer is not _GraphWriter:
        raise NoReaderWriterError("{} is not a graph file name".format(filepath))

    Writer().write(g, filepath)


def write_trace_binary(trace, filepath):
    """Write the stored samples of a trace as a ``*.ctrace`` dump"""
    Writer = determine_tool(filepath, "writer")
    if Writer is not _TraceBinaryWriter:
        raise NoReaderWriterError("{} is not a trace dump name".format(filepath))

    Writer().write(trace, filepath)


def read_trace_binary(filepath):
    """
    Read a ``*.ctrace`` dump

    Returns
    -------
    :obj:`consensus_lab.io.binout.TraceData`
    """
    _check_file_exists(filepath)
    Reader = determine_tool(filepath, "reader")
    if Reader is not _TraceBinaryReader:
        raise NoReaderWriterError("{} is not a trace dump".format(filepath))

    return Reader(filepath).read()


__all__ = [
    "FILE_TOOLS",
    "TraceData",
    "determine_tool",
    "read_graph",
    "read_json",
    "read_trace_binary",
    "read_yaml",
    "write_frame_csv",
    "write_graph",
    "write_json",
    "write_trace_binary",
    "write_trace_csv",
    "write_yaml",
]
