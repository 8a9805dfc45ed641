import filecmp
import re
from os.path import dirname, join

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose

from consensus_lab.errors import GraphFileError, NoReaderWriterError, TraceFileError
from consensus_lab.families import GraphFamily, generate, random_connected_graph
from consensus_lab.graph import Graph
from consensus_lab.io import (
    TraceData,
    determine_tool,
    read_graph,
    read_json,
    read_trace_binary,
    read_yaml,
    write_frame_csv,
    write_graph,
    write_json,
    write_trace_binary,
    write_trace_csv,
    write_yaml,
)
from consensus_lab.io.binout import (
    HEADER_DTYPE,
    MAGIC,
    _TraceBinaryReader,
    _TraceBinaryWriter,
)
from consensus_lab.io.graph_file import _GraphReader, _GraphWriter
from consensus_lab.sim import SimConfig, integrate
from consensus_lab.utils import format_float

TEST_DATA_DIR = join(dirname(__file__), "test_data")


def _write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


@pytest.mark.parametrize(
    "filepath, tool_to_get, expected",
    [
        ("ring.graph", "reader", _GraphReader),
        ("dir/ring.txt", "writer", _GraphWriter),
        ("run/trace.ctrace", "reader", _TraceBinaryReader),
        ("trace.ctrace", "writer", _TraceBinaryWriter),
    ],
)
def test_determine_tool(filepath, tool_to_get, expected):
    assert determine_tool(filepath, tool_to_get) == expected


def test_determine_tool_no_match():
    error_msg = re.escape("Couldn't find appropriate reader for ring.csv")
    with pytest.raises(NoReaderWriterError, match=error_msg):
        determine_tool("out/ring.csv", "reader")


def test_determine_tool_invalid_tool():
    error_msg = re.escape("Cannot get a 'parser', valid options are")
    with pytest.raises(NoReaderWriterError, match=error_msg):
        determine_tool("ring.graph", "parser")


def test_read_graph_file():
    g = read_graph(join(TEST_DATA_DIR, "weighted_ring.graph"))
    assert not g.directed
    assert g.N == 4
    assert g.undirected_edges() == [
        (0, 1, 1.0),
        (0, 3, 1.0),
        (1, 2, 0.5),
        (2, 3, 2.0),
    ]


def test_read_directed_graph_file():
    g = read_graph(join(TEST_DATA_DIR, "leader_chain.txt"))
    assert g.directed
    assert g.edges == ((0, 1, 1.0), (1, 2, 0.25))


def test_read_graph_missing_file():
    with pytest.raises(FileNotFoundError, match="Cannot find"):
        read_graph(join(TEST_DATA_DIR, "missing.graph"))


def test_read_graph_wrong_type(temp_dir):
    path = join(temp_dir, "trace.ctrace")
    _write_text(path, "")
    with pytest.raises(NoReaderWriterError, match="is not a graph file"):
        read_graph(path)


@pytest.mark.parametrize(
    "content, error_msg",
    [
        ("", "Empty graph file"),
        ("# only comments\n\n", "Empty graph file"),
        ("graph 3\n", "line 1: Header must be 'directed N' or 'undirected N'"),
        ("directed x\n", "line 1: Invalid node count 'x'"),
        ("directed 3\n1 2\n", "line 2: Expected 'i j w', got '1 2'"),
        ("directed 3\n1 b 1.0\n", "line 2: Node indices must be integers"),
        ("directed 3\n1 2 heavy\n", "line 2: Invalid weight 'heavy'"),
        ("directed 3\n\n1 4 1.0\n", "line 3: Node index out of range 1..3: 1 4"),
        ("directed 3\n2 2 1.0\n", "line 2: Self-loop at node 2"),
        ("directed 3\n1 2 -1\n", "line 2: Weight must be finite and nonnegative"),
        ("directed 3\n1 2 nan\n", "line 2: Weight must be finite and nonnegative"),
        ("directed 3\n1 2 1\n1 2 2\n", "line 3: Duplicate edge (1, 2)"),
        ("undirected 3\n1 2 1\n2 1 2\n", "line 3: Duplicate edge (2, 1)"),
    ],
)
def test_read_graph_errors(temp_dir, content, error_msg):
    path = join(temp_dir, "broken.graph")
    _write_text(path, content)
    with pytest.raises(GraphFileError, match=re.escape(error_msg)) as exc_info:
        read_graph(path)
    assert exc_info.value.filepath == path


def test_read_undirected_repeated_edge(temp_dir):
    path = join(temp_dir, "repeated.graph")
    _write_text(path, "undirected 2\n1 2 1.5\n2 1 1.5\n")
    assert read_graph(path) == Graph.from_undirected_edges(2, [(0, 1, 1.5)])


@pytest.mark.parametrize(
    "g",
    [
        generate(GraphFamily("path_fuzz", q=4), 9),
        generate(GraphFamily("directed_cycle"), 5),
        random_connected_graph(12, seed=3),
        Graph(3, [(0, 1, 0.1), (2, 1, 1 / 3)]),
    ],
)
def test_graph_write_read(temp_dir, g):
    path = join(temp_dir, "out.graph")
    write_graph(g, path)
    assert read_graph(path) == g


def test_write_graph_format(temp_dir):
    path = join(temp_dir, "chain.txt")
    write_graph(Graph(3, [(0, 1, 1.0), (1, 2, 0.25)]), path)
    with open(path, "rb") as fh:
        assert fh.read() == b"directed 3\n1 2 1.0\n2 3 0.25\n"


def test_write_graph_wrong_name(temp_dir, cycle_8):
    with pytest.raises(NoReaderWriterError, match="is not a graph file name"):
        write_graph(cycle_8, join(temp_dir, "ring.ctrace"))


@pytest.fixture
def short_trace(ring_gains, cycle_8):
    return integrate(SimConfig(ring_gains, cycle_8, horizon=0.05, seed=1))


def test_trace_binary(temp_dir, short_trace):
    path = join(temp_dir, "run.ctrace")
    write_trace_binary(short_trace, path)

    data = read_trace_binary(path)
    assert isinstance(data, TraceData)
    assert (data.n, data.agents) == (3, 8)
    assert_allclose(data.times, short_trace.times)
    assert np.array_equal(data.states, short_trace.states)

    with open(path, "rb") as fh:
        raw = fh.read()
    assert raw[:8] == MAGIC
    assert len(raw) == 8 + 16 + 8 * 6 + 8 * 6 * 3 * 8

    again = join(temp_dir, "again.ctrace")
    write_trace_binary(data, again)
    assert filecmp.cmp(path, again, shallow=False)


def test_trace_binary_truncated(temp_dir, short_trace):
    path = join(temp_dir, "run.ctrace")
    write_trace_binary(short_trace, path)
    with open(path, "rb") as fh:
        raw = fh.read()
    with open(path, "wb") as fh:
        fh.write(raw[:-4])

    with pytest.raises(TraceFileError, match="Truncated trace"):
        read_trace_binary(path)


@pytest.mark.parametrize(
    "raw, error_msg",
    [
        (b"NOTATRACE" + bytes(24), "Not a trace dump"),
        (
            MAGIC + np.array([(1, 1, 1)], HEADER_DTYPE).tobytes() + bytes(17),
            "Trailing bytes after the trace",
        ),
    ],
)
def test_trace_binary_malformed(temp_dir, raw, error_msg):
    path = join(temp_dir, "bad.ctrace")
    with open(path, "wb") as fh:
        fh.write(raw)
    with pytest.raises(TraceFileError, match=re.escape(error_msg)):
        read_trace_binary(path)


def test_write_frame_csv(temp_dir):
    path = join(temp_dir, "table.csv")
    df = pd.DataFrame(
        {"q": [2, 4], "critical_N": pd.array([9, None], dtype="Int64"), "x": [0.1, 1 / 3]}
    )
    write_frame_csv(df, path, comment_lines=["done"])
    with open(path, "rb") as fh:
        assert fh.read() == (
            b"q,critical_N,x\n2,9,0.10000000000000001\n"
            b"4,none,0.33333333333333331\n# done\n"
        )


def test_write_trace_csv(temp_dir, short_trace):
    path = join(temp_dir, "trace.csv")
    write_trace_csv(short_trace, path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()

    assert lines[0] == "t,agent,deriv_order,value"
    assert len(lines) == 1 + 6 * 8 * 3 + 1
    assert lines[-1].startswith("# classification=")
    assert "stopped_early=false" in lines[-1]
    final_metric = short_trace.summary()["final_metric"]
    assert "final_metric={}".format(format_float(final_metric)) in lines[-1]

    df = pd.read_csv(path, comment="#", float_precision="round_trip")
    assert_allclose(df["value"], short_trace.to_frame()["value"], rtol=0, atol=0)


def test_json_and_yaml(temp_dir):
    obj = {"b": [1, 2.5], "a": {"nested": None, "flag": True}}

    json_path = join(temp_dir, "report.json")
    write_json(obj, json_path)
    assert read_json(json_path) == obj
    with open(json_path, encoding="utf-8") as fh:
        text = fh.read()
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("}\n")

    yaml_path = join(temp_dir, "manifest.yaml")
    write_yaml(obj, yaml_path)
    assert read_yaml(yaml_path) == obj
