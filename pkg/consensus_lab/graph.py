"""
Weighted directed graphs, their Laplacians and structural facts.

An edge ``(i, j, w)`` means that agent ``i`` measures agent ``j`` with weight
``w``. Row ``i`` of the Laplacian therefore holds the out-degree
:math:`d^+_i = \\sum_j w_{ij}` on the diagonal and :math:`-w_{ij}` in column
``j``. Undirected graphs store both directions of every edge.

Node indices are 0-based throughout the API.
"""
import math
from dataclasses import dataclass
from typing import Optional

import networkx as nx
import numpy as np
import scipy.sparse

from .config import config
from .errors import DomainError

LAPLACIAN_KINDS = ("full", "grounded", "mirror")


class Graph:
    """
    Immutable weighted graph on nodes ``0, ..., N - 1``

    Parameters
    ----------
    N : int
        Number of nodes

    edges : iterable of tuple
        Edges ``(i, j, w)``. For undirected graphs both ``(i, j, w)`` and
        ``(j, i, w)`` must be present, use :meth:`from_undirected_edges` to
        avoid listing each pair twice.

    directed : bool
        Whether the graph is directed

    Raises
    ------
    DomainError
        The edges violate one of the graph invariants (self-loop, duplicate
        ordered pair, negative or non-finite weight, index out of range or
        missing reverse edge in an undirected graph)
    """

    def __init__(self, N, edges, directed=True):
        N = int(N)
        if N < 1:
            raise DomainError("A graph needs at least one node, got N={}".format(N))

        weights = {}
        for edge in edges:
            i, j, w = int(edge[0]), int(edge[1]), float(edge[2])
            if not (0 <= i < N and 0 <= j < N):
                raise DomainError(
                    "Edge ({}, {}) out of range for N={}".format(i, j, N)
                )
            if i == j:
                raise DomainError("Self-loop at node {}".format(i))
            if not math.isfinite(w) or w < 0:
                raise DomainError(
                    "Edge ({}, {}) has invalid weight {!r}, weights must be "
                    "finite and nonnegative".format(i, j, w)
                )
            if (i, j) in weights:
                raise DomainError("Duplicate edge ({}, {})".format(i, j))
            weights[(i, j)] = w

        if not directed:
            for (i, j), w in weights.items():
                if weights.get((j, i)) != w:
                    raise DomainError(
                        "Undirected graph is missing edge ({}, {}) with weight "
                        "{!r}".format(j, i, w)
                    )

        self._N = N
        self._directed = bool(directed)
        self._weights = weights
        self._edges = tuple((i, j, weights[(i, j)]) for i, j in sorted(weights))

    @classmethod
    def from_undirected_edges(cls, N, edges):
        """
        Build an undirected graph from a list of unordered edges ``(i, j, w)``
        """
        both = []
        for i, j, w in edges:
            both.append((i, j, w))
            both.append((j, i, w))

        return cls(N, both, directed=False)

    @property
    def N(self):
        """int: Number of nodes"""
        return self._N

    @property
    def directed(self):
        """bool: Whether the graph is directed"""
        return self._directed

    @property
    def edges(self):
        """tuple: Ordered edges ``(i, j, w)`` sorted by ``(i, j)``"""
        return self._edges

    @property
    def w_max(self):
        """float: Largest edge weight, 0 for an edgeless graph"""
        return max((w for _, _, w in self._edges), default=0.0)

    def weight(self, i, j):
        """Weight of edge ``(i, j)``, 0 if absent"""
        return self._weights.get((i, j), 0.0)

    def undirected_edges(self):
        """
        Edges ``(i, j, w)`` with ``i < j`` of an undirected graph
        """
        if self._directed:
            raise DomainError("undirected_edges requires an undirected graph")

        return [(i, j, w) for i, j, w in self._edges if i < j]

    def with_edge(self, i, j, w):
        """
        Return a copy with edge ``(i, j)`` added or re-weighted

        For undirected graphs the reverse edge is set too.
        """
        weights = dict(self._weights)
        weights[(i, j)] = w
        if not self._directed:
            weights[(j, i)] = w

        return Graph(
            self._N, [(a, b, v) for (a, b), v in weights.items()], self._directed
        )

    def adjacency(self):
        """
        Dense adjacency matrix ``A`` with ``A[i, j] = w_ij``
        """
        A = np.zeros((self._N, self._N))
        for i, j, w in self._edges:
            A[i, j] = w

        return A

    def sparse_adjacency(self):
        """
        Adjacency matrix as :class:`scipy.sparse.csr_matrix`
        """
        if not self._edges:
            return scipy.sparse.csr_matrix((self._N, self._N))

        rows, cols, vals = zip(*self._edges)
        return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(self._N, self._N))

    def out_degree(self):
        """Weighted out-degrees :math:`d^+_i`"""
        return self.adjacency().sum(axis=1)

    def in_degree(self):
        """Weighted in-degrees :math:`d^-_i`"""
        return self.adjacency().sum(axis=0)

    def neighborhood_sizes(self):
        """Number of nodes each node measures (edges with positive weight)"""
        sizes = np.zeros(self._N, dtype=int)
        for i, _, w in self._edges:
            if w > 0:
                sizes[i] += 1

        return sizes

    def to_networkx(self):
        """
        Convert to :class:`networkx.DiGraph` (or :class:`networkx.Graph` if
        undirected) with a ``weight`` edge attribute
        """
        G = nx.DiGraph() if self._directed else nx.Graph()
        G.add_nodes_from(range(self._N))
        G.add_weighted_edges_from(self._edges)

        return G

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented

        return (self._N, self._directed, self._edges) == (
            other._N,
            other._directed,
            other._edges,
        )

    def __hash__(self):
        return hash((self._N, self._directed, self._edges))

    def __repr__(self):
        return "<Graph N={} edges={} {}>".format(
            self._N,
            len(self._edges),
            "directed" if self._directed else "undirected",
        )


@dataclass(frozen=True, eq=False)
class LaplacianMatrix:
    """
    Laplacian of a graph together with its kind

    ``kind`` is one of ``"full"`` (:math:`L = D - A`), ``"grounded"``
    (:math:`L` with the leader's row and column removed) or ``"mirror"``
    (:math:`(L + L^T) / 2`).
    """

    matrix: np.ndarray
    kind: str
    name: str
    leader: Optional[int] = None

    @property
    def dimension(self):
        return self.matrix.shape[0]

    @property
    def norm(self):
        """Infinity norm of the matrix"""
        return float(np.linalg.norm(self.matrix, np.inf)) if self.dimension else 0.0

    def is_symmetric(self, tol=None):
        tol = config["STRUCT_TOL"] if tol is None else tol
        return bool(np.max(np.abs(self.matrix - self.matrix.T), initial=0.0) <= tol)

    def sparse(self):
        """The matrix as :class:`scipy.sparse.csr_matrix`"""
        return scipy.sparse.csr_matrix(self.matrix)


def _laplacian_name(g, kind, leader):
    parts = [kind, "N={}".format(g.N), "directed" if g.directed else "undirected"]
    if leader is not None:
        parts.append("leader={}".format(leader))

    return "L[{}]".format(", ".join(parts))


def build_laplacian(g, kind="full", leader=None):
    """
    Build a Laplacian of ``g``

    Parameters
    ----------
    g : :obj:`Graph`
        Graph

    kind : {"full", "grounded", "mirror"}
        Laplacian variant

    leader : int, optional
        Leader index, required for ``kind="grounded"``

    Returns
    -------
    :obj:`LaplacianMatrix`

    Raises
    ------
    DomainError
        Unknown kind, or missing/out of range leader for the grounded kind
    """
    if kind not in LAPLACIAN_KINDS:
        raise DomainError(
            "Unknown Laplacian kind {!r}, expected one of {}".format(
                kind, LAPLACIAN_KINDS
            )
        )

    A = g.adjacency()
    L = np.diag(A.sum(axis=1)) - A

    if kind == "mirror":
        L = (L + L.T) / 2
    elif kind == "grounded":
        leader = check_leader(g, leader)
        keep = [k for k in range(g.N) if k != leader]
        L = L[np.ix_(keep, keep)]

    L.setflags(write=False)

    return LaplacianMatrix(
        matrix=L,
        kind=kind,
        name=_laplacian_name(g, kind, leader if kind == "grounded" else None),
        leader=leader if kind == "grounded" else None,
    )


def check_leader(g, leader):
    """
    Check a leader index and return it as an int

    Raises
    ------
    DomainError
        ``leader`` is ``None`` or out of range
    """
    if leader is None:
        raise DomainError("A leader index is required")
    leader = int(leader)
    if not 0 <= leader < g.N:
        raise DomainError(
            "Leader index {} out of range for N={}".format(leader, g.N)
        )
    if g.N < 2:
        raise DomainError("Leader-follower mode needs at least two nodes")

    return leader


def mirror_graph(g):
    """
    Undirected graph with weights :math:`(w_{ij} + w_{ji}) / 2`

    The mirror of an undirected graph is the graph itself.
    """
    if not g.directed:
        return g

    A = g.adjacency()
    W = (A + A.T) / 2
    rows, cols = np.nonzero(np.triu(W, k=1))

    return Graph.from_undirected_edges(
        g.N, [(i, j, W[i, j]) for i, j in zip(rows.tolist(), cols.tolist())]
    )


@dataclass(frozen=True)
class StructuralFacts:
    balanced: bool
    normal: bool
    has_spanning_tree: bool
    strongly_connected: bool
    max_neighborhood: int
    diameter: Optional[int]


def has_spanning_tree(g):
    """
    Whether some node is reachable from every node along edge directions

    Equivalently, the condensation of ``g`` has a single sink component, which is
    the condition for the Laplacian to have a simple zero eigenvalue.
    """
    G = g.to_networkx()
    if not g.directed:
        return nx.is_connected(G)

    C = nx.condensation(G)
    sinks = [c for c in C.nodes if C.out_degree(c) == 0]

    return len(sinks) == 1


def leader_reachable(g, leader):
    """
    Whether every node reaches ``leader`` along edge directions
    """
    leader = check_leader(g, leader)
    G = g.to_networkx()
    if not g.directed:
        return nx.is_connected(G)

    return len(nx.ancestors(G, leader)) == g.N - 1


def structural_facts(g, tol=None):
    """
    Compute the structural facts of a graph

    Parameters
    ----------
    g : :obj:`Graph`
        Graph

    tol : float, optional
        Tolerance of the balanced and normal checks, defaults to
        ``config["STRUCT_TOL"]``

    Returns
    -------
    :obj:`StructuralFacts`
        ``diameter`` is taken on the mirror graph with unit hop lengths and is
        ``None`` if the mirror graph is disconnected
    """
    tol = config["STRUCT_TOL"] if tol is None else tol

    balanced = bool(np.max(np.abs(g.out_degree() - g.in_degree())) <= tol)

    L = build_laplacian(g).matrix
    commutator = L.T @ L - L @ L.T
    normal = bool(np.max(np.abs(commutator)) <= tol)

    G = g.to_networkx()
    strongly_connected = (
        nx.is_strongly_connected(G) if g.directed else nx.is_connected(G)
    )

    M = mirror_graph(g).to_networkx()
    diameter = nx.diameter(M) if nx.is_connected(M) else None

    return StructuralFacts(
        balanced=balanced,
        normal=normal,
        has_spanning_tree=has_spanning_tree(g),
        strongly_connected=bool(strongly_connected),
        max_neighborhood=int(g.neighborhood_sizes().max()),
        diameter=diameter,
    )
