"""
Graph text files

The first content line is ``directed N`` or ``undirected N``, followed by one edge
per line, ``i j w``, with 1-based node indices and a decimal weight. Undirected
edges are listed once. Blank lines and lines starting with ``#`` are ignored.
Weights are written with :func:`repr`, which round-trips every float exactly.
"""
import math

from ..errors import DomainError, GraphFileError
from ..graph import Graph
from .base import _Reader, _Writer

HEADER_KINDS = ("directed", "undirected")


class _GraphReader(_Reader):
    def read(self):
        """
        Read the graph

        Returns
        -------
        :obj:`consensus_lab.graph.Graph`

        Raises
        ------
        GraphFileError
            The file cannot be parsed, the error message holds the line number
        """
        lines = self._content_lines()
        header = next(lines, None)
        if header is None:
            raise GraphFileError("Empty graph file", self.filepath)

        directed, N = self._process_header(*header)

        weights = {}
        for lineno, fields in lines:
            i, j, w = self._process_edge(lineno, fields, N)
            key = (i, j) if directed else (min(i, j), max(i, j))
            if key in weights:
                if directed or weights[key] != w:
                    raise GraphFileError(
                        "Duplicate edge ({}, {})".format(i + 1, j + 1),
                        self.filepath,
                        lineno,
                    )
                continue
            weights[key] = w

        edges = [(i, j, w) for (i, j), w in weights.items()]
        try:
            if directed:
                return Graph(N, edges, directed=True)
            return Graph.from_undirected_edges(N, edges)
        except DomainError as exc:
            raise GraphFileError(str(exc), self.filepath)

    def _process_header(self, lineno, fields):
        if len(fields) != 2 or fields[0].lower() not in HEADER_KINDS:
            raise GraphFileError(
                "Header must be 'directed N' or 'undirected N', got {!r}".format(
                    " ".join(fields)
                ),
                self.filepath,
                lineno,
            )
        try:
            N = int(fields[1])
        except ValueError:
            N = 0
        if N < 1:
            raise GraphFileError(
                "Invalid node count {!r}".format(fields[1]), self.filepath, lineno
            )

        return fields[0].lower() == "directed", N

    def _process_edge(self, lineno, fields, N):
        if len(fields) != 3:
            raise GraphFileError(
                "Expected 'i j w', got {!r}".format(" ".join(fields)),
                self.filepath,
                lineno,
            )
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphFileError(
                "Node indices must be integers, got {!r}".format(" ".join(fields[:2])),
                self.filepath,
                lineno,
            )
        try:
            w = float(fields[2])
        except ValueError:
            raise GraphFileError(
                "Invalid weight {!r}".format(fields[2]), self.filepath, lineno
            )

        if not (1 <= i <= N and 1 <= j <= N):
            raise GraphFileError(
                "Node index out of range 1..{}: {} {}".format(N, i, j),
                self.filepath,
                lineno,
            )
        if i == j:
            raise GraphFileError(
                "Self-loop at node {}".format(i), self.filepath, lineno
            )
        if not math.isfinite(w) or w < 0:
            raise GraphFileError(
                "Weight must be finite and nonnegative, got {!r}".format(fields[2]),
                self.filepath,
                lineno,
            )

        return i - 1, j - 1, w


class _GraphWriter(_Writer):
    def _write_content(self, g, output):
        output.write(
            "{} {}{}".format(
                "directed" if g.directed else "undirected", g.N, self._newline_char
            )
        )
        edges = g.edges if g.directed else g.undirected_edges()
        for i, j, w in edges:
            output.write("{} {} {!r}{}".format(i + 1, j + 1, w, self._newline_char))
