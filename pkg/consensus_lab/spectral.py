"""
Laplacian spectra, algebraic connectivity and connectivity bounds.

The bounds implemented by :func:`connectivity_bound` are upper bounds on the
algebraic connectivity :math:`\\lambda_2` (or, for the leader-grounded kind, on
the smallest eigenvalue :math:`\\bar\\lambda_1` of the grounded Laplacian) which
shrink as the network grows:

- ``tree``: :math:`\\pi^2 w_{max} / (\\mathrm{diam} + 1)^2`
- ``planar``: :math:`8 q w_{max} / N`
- ``fuzz``: :math:`c / N^{2/d}` with
  :math:`c = d \\cdot 4 \\pi^2 w r (r + 1)(2r + 1) / 6`
- ``genus``: :math:`c_2 / N`
- ``leader_grounded``: :math:`q w_{max} / (N - 1)`
"""
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
import pandas as pd
import scipy.linalg

from .config import config
from .errors import DomainError, NumericError
from .families import generate
from .graph import build_laplacian, check_leader, mirror_graph, structural_facts
from .utils import map_jobs

BOUND_KINDS = ("fuzz", "planar", "genus", "tree", "leader_grounded")

BOUNDS_COLUMNS = [
    "family",
    "N",
    "q",
    "lambda2_real",
    "bound_kind",
    "bound_value",
    "satisfied",
]
"""list: Columns of the connectivity bounds CSV"""


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    Eigenvalues of a Laplacian ordered by nondecreasing real part

    Eigenvalues with :math:`|\\lambda| \\le` ``ZERO_SNAP_RTOL`` :math:`\\|L\\|` are
    set to exactly zero. Ties in the real part are ordered by imaginary part.
    """

    eigenvalues: np.ndarray
    matrix_id: str
    kind: str = "full"

    @property
    def multiplicity_of_zero(self):
        return int(np.count_nonzero(self.eigenvalues == 0))

    @property
    def lambda2_real(self):
        """
        Real part of the second eigenvalue, the algebraic connectivity

        For a grounded Laplacian use :attr:`lambda_min_real` instead.
        """
        if self.eigenvalues.size < 2:
            return math.nan

        return float(self.eigenvalues[1].real)

    @property
    def lambda_min_real(self):
        """Real part of the first eigenvalue"""
        return float(self.eigenvalues[0].real)

    @property
    def max_abs_imag(self):
        return float(np.max(np.abs(self.eigenvalues.imag), initial=0.0))

    def to_frame(self):
        """
        Spectrum as a :obj:`pandas.DataFrame` with 1-based index ``l``
        """
        return pd.DataFrame(
            {
                "l": np.arange(1, self.eigenvalues.size + 1),
                "lambda_re": self.eigenvalues.real,
                "lambda_im": self.eigenvalues.imag,
            }
        )


def spectrum(L):
    """
    Compute the spectrum of a Laplacian

    Symmetric matrices go to :func:`scipy.linalg.eigvalsh`, all others to
    :func:`scipy.linalg.eigvals`.

    Parameters
    ----------
    L : :obj:`consensus_lab.graph.LaplacianMatrix`
        Laplacian

    Returns
    -------
    :obj:`Spectrum`

    Raises
    ------
    NumericError
        The eigensolver did not converge or returned non-finite values
    """
    M = L.matrix
    try:
        if L.is_symmetric():
            vals = scipy.linalg.eigvalsh((M + M.T) / 2).astype(complex)
        else:
            vals = scipy.linalg.eigvals(M)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(
            "Eigenvalue computation failed: {}".format(exc), matrix_id=L.name
        )

    if not np.all(np.isfinite(vals)):
        raise NumericError("Eigensolver returned non-finite values", matrix_id=L.name)

    snap = config["ZERO_SNAP_RTOL"] * L.norm
    vals[np.abs(vals) <= snap] = 0
    vals = vals[np.lexsort((vals.imag, vals.real))]
    vals.setflags(write=False)

    return Spectrum(eigenvalues=vals, matrix_id=L.name, kind=L.kind)


def path_fuzz_lambda2_closed_form(N, q, w=1.0):
    """
    Closed form of the path fuzz algebraic connectivity

    .. math::

        \\lambda_2 = w \\sum_{k=1}^{q/2} 2 (1 - \\cos(\\pi k / N))

    This is exact for ``q = 2``. For larger ``q`` it is the algebraic
    connectivity of the path fuzz with reflecting ends and an upper bound for the
    path fuzz produced by :func:`consensus_lab.families.generate`.

    Raises
    ------
    DomainError
        ``q`` is odd, smaller than 2 or not smaller than ``2 * N``, or ``w`` is
        not positive
    """
    if q % 2 or q < 2:
        raise DomainError("q must be even and >= 2, got {}".format(q))
    if q >= 2 * N:
        raise DomainError("q must be smaller than 2N, got q={} N={}".format(q, N))
    if not w > 0:
        raise DomainError("w must be positive, got {}".format(w))

    k = np.arange(1, q // 2 + 1)
    return float(w * np.sum(2 * (1 - np.cos(np.pi * k / N))))


def fuzz_constant(d, r, w=1.0):
    """
    Constant of the r-fuzz lattice bound

    Obtained from :math:`1 - \\cos x \\le x^2 / 2` applied to the toric lattice
    spectrum, per dimension.
    """
    return d * 4 * math.pi ** 2 * w * r * (r + 1) * (2 * r + 1) / 6


def genus_constant(r=1, w=1.0):
    """
    Default constant of the bounded genus bound, the two-dimensional lattice value
    """
    return fuzz_constant(2, r, w)


def lambda2_real_via_mirror(g):
    """
    Real part of the algebraic connectivity of a normal graph via its mirror

    For normal Laplacians :math:`\\mathrm{Re}\\{\\lambda_2\\}` equals the
    algebraic connectivity of the mirror graph.

    Raises
    ------
    DomainError
        The Laplacian of ``g`` is not normal
    """
    if not structural_facts(g).normal:
        raise DomainError(
            "Laplacian is not normal, Re(lambda_2) cannot be read off the mirror graph"
        )

    return spectrum(build_laplacian(mirror_graph(g))).lambda2_real


@dataclass(frozen=True)
class BoundCertificate:
    kind: str
    bound_value: float
    computed_value: float
    satisfied: bool
    N: int
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "bound_kind": self.kind,
            "bound_value": self.bound_value,
            "lambda2_real": self.computed_value,
            "satisfied": self.satisfied,
            "N": self.N,
        }


def _certificate(kind, bound, computed, N, params):
    tol = config["BOUND_TOL"]
    return BoundCertificate(
        kind=kind,
        bound_value=float(bound),
        computed_value=float(computed),
        satisfied=bool(computed <= bound + tol),
        N=N,
        params=params,
    )


def certificate_row(cert, label, g, q=None):
    """
    Row of the bounds table for a certificate computed on ``g``

    ``q`` defaults to the realized maximum neighbourhood of ``g``.
    """
    if q is None:
        q = structural_facts(g).max_neighborhood

    return {
        "family": label,
        "N": cert.N,
        "q": q,
        "lambda2_real": cert.computed_value,
        "bound_kind": cert.kind,
        "bound_value": cert.bound_value,
        "satisfied": cert.satisfied,
    }


def _lambda2(g):
    return spectrum(build_laplacian(g)).lambda2_real


def connectivity_bound(g, kind, **params):
    """
    Evaluate a connectivity bound on a graph

    Parameters
    ----------
    g : :obj:`consensus_lab.graph.Graph`
        Graph

    kind : {"fuzz", "planar", "genus", "tree", "leader_grounded"}
        Bound to evaluate

    **params
        ``q`` (``planar``, ``leader_grounded``; defaults to the realized maximum
        neighbourhood), ``d`` and ``r`` (``fuzz``, default 1), ``w`` (``fuzz``,
        defaults to ``g.w_max``), ``c2`` (``genus``, defaults to
        :func:`genus_constant`), ``leader`` (``leader_grounded``, default 0)

    Returns
    -------
    :obj:`BoundCertificate`

    Raises
    ------
    DomainError
        Unknown kind or the graph does not satisfy the bound's hypothesis
        (not a tree, not planar, directed graph for the leader-grounded bound)
    """
    N = g.N
    if kind == "tree":
        G = mirror_graph(g).to_networkx()
        if not nx.is_tree(G):
            raise DomainError("Tree bound requires a tree, the graph has a cycle")
        diameter = nx.diameter(G)
        bound = math.pi ** 2 * g.w_max / (diameter + 1) ** 2
        return _certificate(kind, bound, _lambda2(g), N, {"diameter": diameter})

    if kind == "planar":
        is_planar, _ = nx.check_planarity(mirror_graph(g).to_networkx())
        if not is_planar:
            raise DomainError("Planar bound requires a planar graph")
        q = params.get("q") or structural_facts(g).max_neighborhood
        bound = 8 * q * g.w_max / N
        return _certificate(kind, bound, _lambda2(g), N, {"q": q})

    if kind == "fuzz":
        d = params.get("d", 1)
        r = params.get("r", 1)
        w = params.get("w") or g.w_max
        c = fuzz_constant(d, r, w)
        bound = c / N ** (2.0 / d)
        return _certificate(kind, bound, _lambda2(g), N, {"d": d, "r": r, "c": c})

    if kind == "genus":
        c2 = params.get("c2") or genus_constant(params.get("r", 1), g.w_max)
        return _certificate(kind, c2 / N, _lambda2(g), N, {"c2": c2})

    if kind == "leader_grounded":
        if g.directed:
            raise DomainError("Leader-grounded bound requires an undirected graph")
        leader = check_leader(g, params.get("leader", 0))
        q = params.get("q") or structural_facts(g).max_neighborhood
        lambda_bar_1 = spectrum(build_laplacian(g, "grounded", leader)).lambda_min_real
        bound = q * g.w_max / (N - 1)
        return _certificate(kind, bound, lambda_bar_1, N, {"q": q, "leader": leader})

    raise DomainError(
        "Unknown bound kind {!r}, expected one of {}".format(kind, BOUND_KINDS)
    )


def sweep_connectivity(family, Ns, kind, jobs=1, **params):
    """
    Evaluate a connectivity bound over realizations of a graph family

    Parameters
    ----------
    family : :obj:`consensus_lab.families.GraphFamily`
        Family

    Ns : iterable of int
        Network sizes

    kind : str
        Bound kind, see :func:`connectivity_bound`

    jobs : int
        Number of worker threads

    **params
        Passed to :func:`connectivity_bound`. For ``fuzz`` the lattice
        dimension and radius default to the family's ``d`` and ``r``.

    Returns
    -------
    :obj:`pandas.DataFrame`
        Columns of :data:`BOUNDS_COLUMNS`, one row per ``N``
    """
    if kind == "fuzz":
        params.setdefault("d", family.d)
        params.setdefault("r", family.r if family.tag == "toric_lattice" else None)
        if params["r"] is None:
            params["r"] = (family.resolved_q or 2) // 2

    def _row(N):
        g = generate(family, N)
        cert = connectivity_bound(g, kind, **params)
        return certificate_row(cert, family.tag, g, family.resolved_q)

    rows = map_jobs(_row, [int(N) for N in Ns], jobs=jobs)

    return pd.DataFrame(rows, columns=BOUNDS_COLUMNS)
