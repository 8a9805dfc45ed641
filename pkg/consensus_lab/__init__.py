from ._version import __version__  # noqa
from .families import GraphFamily, generate, random_connected_graph  # noqa
from .graph import Graph, build_laplacian  # noqa
from .scaling import (  # noqa
    SweepSpec,
    critical_N_vs_q,
    find_critical_N,
    find_node_addition,
)
from .sim import SimConfig, integrate  # noqa
from .spectral import connectivity_bound, spectrum  # noqa
from .stability import Gains, assess  # noqa


def critical_size(family, a, q=None, N_max=100, mode="leaderless", **kwargs):
    """
    Critical network size of a graph family for given gains

    Parameters
    ----------
    family : str
        Graph family tag, see ``consensus_lab.definitions.FAMILY_TAGS``

    a : sequence of float
        Gains ``a_0, ..., a_{n-1}``

    q : int, optional
        Neighbourhood bound, defaults to the family's default

    N_max : int
        Largest network size sampled

    mode : {"leaderless", "leader"}
        Consensus mode, the leader is node 0

    **kwargs
        Further parameters of :class:`consensus_lab.families.GraphFamily`

    Returns
    -------
    int or None
        Smallest sampled size at which the closed loop is not stable, ``None`` if
        it is stable up to ``N_max``
    """
    spec = SweepSpec(
        family=GraphFamily(family, q=q, **kwargs),
        gains=Gains(tuple(a)),
        N_max=N_max,
        mode=mode,
    )

    return find_critical_N(spec, stop_at_critical=True).critical_N
