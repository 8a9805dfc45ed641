"""
Graph family generators

Every family is a pure function of ``(family parameters, N)``. Randomized
families also depend on the seed (``config["SEED"]`` if the family has none), and
identical seeds give identical edge lists. The parameters of a family are held
fixed while ``N`` varies.
"""
import itertools
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .config import config
from .definitions import family_info
from .errors import DomainError, NumericError, ResourceError
from .graph import Graph
from .utils import resolve_seed


@dataclass(frozen=True)
class GraphFamily:
    """
    A graph family with fixed parameters

    Parameters
    ----------
    tag : str
        One of the tags in ``consensus_lab.definitions.FAMILY_TAGS``

    q : int, optional
        Neighbourhood bound. Defaults to the family's default (see
        ``graph_families.csv``), ``2 * r * d`` for the toric lattice.

    r : int
        Fuzz radius of the toric lattice

    d : int
        Dimension of the toric lattice

    M : int, optional
        Side of the toric lattice. If given, ``M ** d`` must equal ``N``.

    seed : int, optional
        Seed of randomized families, defaults to ``config["SEED"]``

    w : float
        Uniform edge weight
    """

    tag: str
    q: Optional[int] = None
    r: int = 1
    d: int = 1
    M: Optional[int] = None
    seed: Optional[int] = None
    w: float = 1.0

    def __post_init__(self):
        family_info(self.tag)
        if not (self.w > 0 and np.isfinite(self.w)):
            raise DomainError("Edge weight must be positive, got {}".format(self.w))
        if self.r < 1 or self.d < 1:
            raise DomainError(
                "Fuzz radius and dimension must be >= 1, got r={}, d={}".format(
                    self.r, self.d
                )
            )

    @property
    def info(self):
        return family_info(self.tag)

    @property
    def resolved_q(self):
        """int or None: Neighbourhood bound in force for this family"""
        if self.q is not None:
            return int(self.q)
        if self.tag == "toric_lattice":
            return 2 * self.r * self.d

        return self.info["default_q"]

    def with_q(self, q):
        """Copy of the family with another neighbourhood bound"""
        return replace(self, q=q)

    def to_dict(self):
        return {
            "tag": self.tag,
            "q": self.resolved_q,
            "r": self.r,
            "d": self.d,
            "M": self.M,
            "seed": self.seed,
            "w": self.w,
        }


def _even_q(family):
    q = family.resolved_q
    if q is None or q < 2 or q % 2:
        raise DomainError(
            "{} needs an even neighbourhood bound q >= 2, got {}".format(
                family.tag, q
            )
        )

    return q


def _path_fuzz(family, N):
    half = _even_q(family) // 2
    return [
        (i, j, family.w)
        for i in range(N)
        for j in range(i + 1, min(i + half, N - 1) + 1)
    ]


def _circulant_pairs(N, offsets):
    pairs = set()
    for i in range(N):
        for o in offsets:
            j = (i + o) % N
            if i != j:
                pairs.add((min(i, j), max(i, j)))

    return sorted(pairs)


def _cycle(family, N):
    half = _even_q(family) // 2
    return [(i, j, family.w) for i, j in _circulant_pairs(N, range(1, half + 1))]


def _directed_cycle(family, N):
    q = family.resolved_q
    if q is None or q < 1:
        raise DomainError("directed_cycle needs q >= 1, got {}".format(q))

    edges = set()
    for i in range(N):
        for o in range(1, q + 1):
            j = (i + o) % N
            if i != j:
                edges.add((i, j))

    return [(i, j, family.w) for i, j in sorted(edges)]


def lattice_side(N, d):
    """
    Side ``M`` of a ``d``-dimensional lattice with ``M ** d == N``

    Raises
    ------
    DomainError
        ``N`` is not a perfect ``d``-th power
    """
    M = int(round(N ** (1.0 / d)))
    for candidate in (M - 1, M, M + 1):
        if candidate >= 1 and candidate ** d == N:
            return candidate

    raise DomainError("N={} is not a perfect {}-th power".format(N, d))


def family_sizes(family, start, stop, step=1):
    """
    Sizes ``start, start + step, ..., <= stop`` at which ``family`` can be realized

    Only perfect ``d``-th powers are kept for the toric lattice.
    """
    Ns = range(int(start), int(stop) + 1, int(step))
    if family.tag != "toric_lattice":
        return list(Ns)

    valid = []
    for N in Ns:
        try:
            lattice_side(N, family.d)
        except DomainError:
            continue
        valid.append(N)

    return valid


def _toric_lattice(family, N):
    M = lattice_side(N, family.d)
    if family.M is not None and family.M != M:
        raise DomainError(
            "Lattice side M={} inconsistent with N={} and d={}".format(
                family.M, N, family.d
            )
        )

    shape = (M,) * family.d
    pairs = set()
    for i in range(N):
        coords = np.unravel_index(i, shape)
        for dim, o in itertools.product(range(family.d), range(1, family.r + 1)):
            shifted = list(coords)
            shifted[dim] = (shifted[dim] + o) % M
            j = int(np.ravel_multi_index(shifted, shape))
            if i != j:
                pairs.add((min(i, j), max(i, j)))

    return [(i, j, family.w) for i, j in sorted(pairs)]


def delaunay_points(N, seed):
    """
    Points of the seeded Delaunay family, uniform in the unit square

    The first ``N`` points of a larger set with the same seed are the ``N``
    point set.
    """
    return np.random.default_rng(seed).random((N, 2))


def _delaunay_planar(family, N):
    if N == 2:
        return [(0, 1, family.w)]

    points = delaunay_points(N, resolve_seed(family.seed))
    try:
        simplices = Delaunay(points).simplices
    except QhullError as exc:
        raise NumericError(
            "Delaunay triangulation failed: {}".format(exc),
            matrix_id="delaunay(N={}, seed={})".format(N, family.seed),
        )

    pairs = set()
    for simplex in simplices:
        for a, b in itertools.combinations(sorted(int(v) for v in simplex), 2):
            pairs.add((a, b))

    return [(i, j, family.w) for i, j in sorted(pairs)]


def _tree_path(family, N):
    return [(i, i + 1, family.w) for i in range(N - 1)]


def _star_tree(family, N):
    return [(0, i, family.w) for i in range(1, N)]


def _complete(family, N):
    return [(i, j, family.w) for i, j in itertools.combinations(range(N), 2)]


_GENERATORS = {
    "path_fuzz": _path_fuzz,
    "cycle": _cycle,
    "directed_cycle": _directed_cycle,
    "toric_lattice": _toric_lattice,
    "delaunay_planar": _delaunay_planar,
    "tree_path": _tree_path,
    "star_tree": _star_tree,
    "complete": _complete,
}


def _check_degree_bound(family, g):
    q = family.resolved_q
    realized = int(g.neighborhood_sizes().max())
    if q is None or realized <= q:
        return

    msg = "{} realization at N={} has a node with {} neighbours, more than q={}".format(
        family.tag, g.N, realized, q
    )
    if family.info["enforces_degree_bound"]:
        raise DomainError(msg)

    warnings.warn(msg)


def generate(family, N):
    """
    Realize a graph family at network size ``N``

    Parameters
    ----------
    family : :obj:`GraphFamily`
        Family with fixed parameters

    N : int
        Number of nodes, at least 2

    Returns
    -------
    :obj:`Graph`

    Raises
    ------
    DomainError
        ``N < 2`` or family parameters inconsistent with ``N`` (e.g. odd ``q``
        for the path fuzz, ``N`` not a perfect ``d``-th power for the toric
        lattice, neighbourhood bound exceeded for families which enforce it)

    ResourceError
        ``N`` exceeds ``config["MAX_NODES"]``

    Examples
    --------
    >>> g = generate(GraphFamily("path_fuzz", q=2), 5)
    >>> g.undirected_edges()
    [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]
    """
    N = int(N)
    if N < 2:
        raise DomainError("Graph families need N >= 2, got N={}".format(N))
    if N > config["MAX_NODES"]:
        raise ResourceError(
            "N={} exceeds MAX_NODES={}".format(N, config["MAX_NODES"])
        )

    edges = _GENERATORS[family.tag](family, N)
    if family.info["directed"]:
        g = Graph(N, edges, directed=True)
    else:
        g = Graph.from_undirected_edges(N, edges)

    _check_degree_bound(family, g)

    return g


def random_connected_graph(
    N, seed, extra_edge_probability=0.3, weight_range=(0.5, 2.0), unit_weights=False
):
    """
    Seeded random connected undirected graph

    A random spanning tree (each node attaches to a uniformly chosen earlier node
    of a random permutation) is completed with independent extra edges.

    Parameters
    ----------
    N : int
        Number of nodes

    seed : int
        Seed of :func:`numpy.random.default_rng`

    extra_edge_probability : float
        Probability of each non-tree pair being an edge

    weight_range : tuple of float
        Edge weights are uniform in this range

    unit_weights : bool
        Use weight 1 for every edge instead

    Returns
    -------
    :obj:`Graph`
    """
    rng = np.random.default_rng(seed)
    order = rng.permutation(N)
    pairs = set()
    for k in range(1, N):
        a, b = int(order[k]), int(order[rng.integers(0, k)])
        pairs.add((min(a, b), max(a, b)))

    for i, j in itertools.combinations(range(N), 2):
        if (i, j) not in pairs and rng.random() < extra_edge_probability:
            pairs.add((i, j))

    pairs = sorted(pairs)
    if unit_weights:
        weights = np.ones(len(pairs))
    else:
        weights = rng.uniform(weight_range[0], weight_range[1], size=len(pairs))

    return Graph.from_undirected_edges(
        N, [(i, j, float(w)) for (i, j), w in zip(pairs, weights)]
    )
