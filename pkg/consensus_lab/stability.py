"""
Stability of n-th order consensus

Each agent is a chain of ``n`` integrators driven by

.. math::

    x_i^{(n)} = -\\sum_j w_{ij} \\sum_{k=0}^{n-1} a_k (x_i^{(k)} - x_j^{(k)})

so the closed loop is :math:`\\dot\\xi = \\mathcal{A}\\xi` with
:math:`\\mathcal{A} = S \\otimes I - e_n a^T \\otimes L`. For a normal Laplacian
the closed loop decouples into one mode per eigenvalue :math:`\\lambda_l` with
characteristic polynomial

.. math::

    p_l(s) = s^n + a_{n-1}\\lambda_l s^{n-1} + \\dots + a_1\\lambda_l s + a_0\\lambda_l

Substituting :math:`\\mu = -js` maps the open left half plane onto
:math:`\\mathrm{Im}\\{\\mu\\} > 0`, where the complex Routh-Hurwitz determinant chain
applies. :func:`eigen_oracle` computes the spectrum of the full closed loop and
is the ground truth the chain is checked against.
"""
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from numpy.polynomial import Polynomial

from .config import config
from .errors import DomainError, NumericError, ResourceError
from .graph import (
    build_laplacian,
    check_leader,
    has_spanning_tree,
    leader_reachable,
)
from .spectral import spectrum

MODES = ("leaderless", "leader")
METHODS = ("auto", "determinant", "oracle")

# (-j) ** k, exact
_MINUS_J_POWERS = (1, -1j, -1, 1j)


@dataclass(frozen=True)
class Gains:
    """
    Gains ``a_0, ..., a_{n-1}`` of the consensus law

    Raises
    ------
    DomainError
        No gains, or a gain which is negative or not finite
    """

    a: Tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if not a:
            raise DomainError("At least one gain is required (n >= 1)")
        for k, v in enumerate(a):
            if not math.isfinite(v) or v < 0:
                raise DomainError(
                    "Gain a{} must be finite and nonnegative, got {!r}".format(k, v)
                )
        object.__setattr__(self, "a", a)

    @classmethod
    def from_string(cls, text, n=None):
        """
        Parse comma separated gains, e.g. ``"0.5,1,1"``

        Parameters
        ----------
        text : str
            Gains ``a0,a1,...``

        n : int, optional
            Expected order, checked against the number of gains

        Raises
        ------
        DomainError
            A gain cannot be parsed or the number of gains is not ``n``
        """
        try:
            values = [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise DomainError("Could not parse gains {!r}".format(text))

        if n is not None and len(values) != n:
            raise DomainError(
                "Expected {} gains for order n={}, got {} ({!r})".format(
                    n, n, len(values), text
                )
            )

        return cls(tuple(values))

    @property
    def n(self):
        """int: Order of the integrator chain"""
        return len(self.a)

    @property
    def a_max(self):
        return max(self.a)

    @property
    def admissible_candidate(self):
        """bool: ``a_{n-1} > 0``, required for any stability claim"""
        return self.a[-1] > 0

    def truncate(self, n):
        """The first ``n`` gains"""
        if not 1 <= n <= self.n:
            raise DomainError("Cannot truncate {} gains to n={}".format(self.n, n))

        return Gains(self.a[:n])

    def as_array(self):
        return np.array(self.a)

    def __str__(self):
        return ",".join("{!r}".format(v) for v in self.a)


def mode_char_poly(gains, lam):
    """
    Characteristic polynomial of the mode with Laplacian eigenvalue ``lam``

    Returns
    -------
    :obj:`numpy.polynomial.Polynomial`
        Complex coefficients in ascending powers of ``s``: ``a_k * lam`` for
        ``k < n`` and 1 for ``s ** n``

    Examples
    --------
    >>> mode_char_poly(Gains((0.5, 1, 1)), 1).coef
    array([0.5+0.j, 1. +0.j, 1. +0.j, 1. +0.j])
    """
    lam = complex(lam)
    coef = np.array([a_k * lam for a_k in gains.a] + [1], dtype=complex)

    return Polynomial(coef)


@dataclass(frozen=True, eq=False)
class ComplexPoly:
    """
    Monic polynomial :math:`\\mu^n + \\sum_k (f_k + j g_k) \\mu^k`

    ``coefficients`` are in ascending powers, the last one is exactly 1.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=complex)
        if coef.size < 1 or coef[-1] != 1:
            raise DomainError("ComplexPoly must be monic, got {}".format(coef))
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)

    @property
    def n(self):
        return self.coefficients.size - 1

    @property
    def f(self):
        """Real parts ``f_0, ..., f_{n-1}``"""
        return self.coefficients[:-1].real

    @property
    def g(self):
        """Imaginary parts ``g_0, ..., g_{n-1}``"""
        return self.coefficients[:-1].imag

    def roots(self):
        return Polynomial(self.coefficients).roots()


def to_mu_polynomial(p):
    """
    Substitute :math:`\\mu = -js` into a monic polynomial in ``s``

    The coefficient of :math:`s^{n-k}` is multiplied by :math:`(-j)^k`, so roots
    with :math:`\\mathrm{Re}\\{s\\} < 0` map to roots with
    :math:`\\mathrm{Im}\\{\\mu\\} > 0`.

    Parameters
    ----------
    p : :obj:`numpy.polynomial.Polynomial`
        Monic polynomial in ``s``

    Returns
    -------
    :obj:`ComplexPoly`

    Raises
    ------
    DomainError
        ``p`` is not monic
    """
    coef = np.asarray(p.coef, dtype=complex)
    n = coef.size - 1
    if coef[-1] != 1:
        raise DomainError(
            "Expected a monic polynomial, leading coefficient {}".format(coef[-1])
        )

    mu = np.array(
        [coef[m] * _MINUS_J_POWERS[(n - m) % 4] for m in range(n + 1)], dtype=complex
    )

    return ComplexPoly(mu)


def _lu_det(M):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M)

    swaps = np.count_nonzero(piv != np.arange(piv.size))
    det = np.prod(np.diag(lu))

    return float(-det if swaps % 2 else det)


def hurwitz_matrix(p, k):
    """
    The ``2k x 2k`` matrix whose determinant is :math:`\\Delta_{2k}`

    Even rows hold ``[1, f_{n-1}, ..., f_0, 0, ...]`` and odd rows
    ``[0, g_{n-1}, ..., g_0, 0, ...]``, both shifted right by one column per row
    pair.
    """
    n = p.n
    size = 2 * k
    F = np.zeros(2 * n)
    G = np.zeros(2 * n)
    F[0] = 1
    F[1 : n + 1] = p.f[::-1]
    G[1 : n + 1] = p.g[::-1]

    M = np.zeros((size, size))
    for i in range(k):
        M[2 * i, i:] = F[: size - i]
        M[2 * i + 1, i:] = G[: size - i]

    return M


def hurwitz_chain(p):
    """
    Signed Routh-Hurwitz determinants of a monic complex polynomial

    All roots of ``p`` lie in :math:`\\mathrm{Im}\\{\\mu\\} > 0` if and only if
    every returned value is positive.

    Parameters
    ----------
    p : :obj:`ComplexPoly`
        Polynomial in :math:`\\mu`

    Returns
    -------
    :obj:`numpy.ndarray`
        :math:`(-1)^k \\Delta_{2k}` for ``k = 1, ..., n``. The first value is
        :math:`-g_{n-1}`.

    Raises
    ------
    DomainError
        ``p`` has degree 0
    """
    if p.n < 1:
        raise DomainError("The Routh-Hurwitz chain needs degree >= 1")

    return np.array(
        [(-1) ** k * _lu_det(hurwitz_matrix(p, k)) for k in range(1, p.n + 1)]
    )


def _top_three(gains):
    if gains.n < 3:
        raise DomainError(
            "Condition needs n >= 3 (a_{{n-3}} undefined), got n={}".format(gains.n)
        )

    return gains.a[-1], gains.a[-2], gains.a[-3]


def second_hurwitz_condition(gains, lam):
    """
    Second Routh-Hurwitz condition in closed form

    .. math::

        a_{n-1} \\mathrm{Re}^2 (a_{n-1} a_{n-2} \\mathrm{Re} - a_{n-3})
        + a_{n-2} \\mathrm{Im}^2 (a_{n-1}^2 \\mathrm{Re} - a_{n-2})

    Its sign equals the sign of the second signed determinant of the chain.

    Raises
    ------
    DomainError
        ``n < 3``
    """
    a1, a2, a3 = _top_three(gains)
    re, im = complex(lam).real, complex(lam).imag

    return a1 * re ** 2 * (a1 * a2 * re - a3) + a2 * im ** 2 * (a1 ** 2 * re - a2)


def undirected_condition(gains, lam):
    """
    :math:`a_{n-1} a_{n-2} \\lambda - a_{n-3}` for a real eigenvalue

    Raises
    ------
    DomainError
        ``n < 3`` or ``lam`` has a nonzero imaginary part
    """
    a1, a2, a3 = _top_three(gains)
    if complex(lam).imag != 0:
        raise DomainError(
            "undirected_condition needs a real eigenvalue, got {}".format(lam)
        )

    return a1 * a2 * complex(lam).real - a3


def closed_loop_matrix(gains, L):
    """
    Dense closed-loop matrix :math:`S \\otimes I - e_n a^T \\otimes L`

    The state is stacked by derivative order, ``[x, x', ..., x^(n-1)]``.
    """
    n = gains.n
    dim = L.dimension
    shift = np.eye(n, k=1)
    last_row = np.zeros((n, n))
    last_row[-1, :] = gains.a

    return np.kron(shift, np.eye(dim)) - np.kron(last_row, np.asarray(L.matrix))


@dataclass(frozen=True, eq=False)
class OracleResult:
    eigenvalues: np.ndarray
    zero_mode_count: int
    max_real_part: float
    zero_tol: float
    matrix_id: str


def eigen_oracle(gains, L, exclude_zero_modes=None):
    """
    Full spectrum of the closed loop

    Parameters
    ----------
    gains : :obj:`Gains`
        Gains

    L : :obj:`consensus_lab.graph.LaplacianMatrix`
        Full or grounded Laplacian

    exclude_zero_modes : int, optional
        Number of smallest-modulus eigenvalues left out of ``max_real_part``.
        Defaults to ``n`` for a full Laplacian (the consensus modes) and 0 for a
        grounded one.

    Returns
    -------
    :obj:`OracleResult`
        ``zero_mode_count`` counts eigenvalues below a threshold that accounts
        for the ``n``-fold Jordan block of each zero eigenvalue of ``L``:
        ``max(ZERO_SNAP_RTOL * ||A||, 10 * (eps * ||A||) ** (1 / n))``

    Raises
    ------
    ResourceError
        The closed loop dimension exceeds ``config["ORACLE_MAX_DIM"]``

    NumericError
        The eigensolver failed
    """
    n = gains.n
    dim = L.dimension * n
    if dim > config["ORACLE_MAX_DIM"]:
        raise ResourceError(
            "Closed loop dimension {} exceeds ORACLE_MAX_DIM={}".format(
                dim, config["ORACLE_MAX_DIM"]
            )
        )

    matrix_id = "closed loop n={} of {}".format(n, L.name)
    A = closed_loop_matrix(gains, L)
    try:
        vals = scipy.linalg.eigvals(A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError("Eigenvalue computation failed: {}".format(exc), matrix_id)

    if not np.all(np.isfinite(vals)):
        raise NumericError("Eigensolver returned non-finite values", matrix_id)

    norm = float(np.linalg.norm(A, np.inf)) if dim else 0.0
    zero_tol = max(
        config["ZERO_SNAP_RTOL"] * norm,
        10 * (np.finfo(float).eps * max(norm, 1.0)) ** (1.0 / n),
    )

    if exclude_zero_modes is None:
        exclude_zero_modes = 0 if L.kind == "grounded" else n

    by_modulus = vals[np.argsort(np.abs(vals), kind="stable")]
    rest = by_modulus[exclude_zero_modes:]
    max_real_part = float(np.max(rest.real)) if rest.size else -math.inf

    return OracleResult(
        eigenvalues=vals[np.lexsort((vals.imag, vals.real))],
        zero_mode_count=int(np.count_nonzero(np.abs(vals) <= zero_tol)),
        max_real_part=max_real_part,
        zero_tol=zero_tol,
        matrix_id=matrix_id,
    )


@dataclass(frozen=True, eq=False)
class ModeVerdict:
    """
    Verdict on a single mode

    ``l`` is the 1-based position of the eigenvalue in the Laplacian spectrum.
    ``source`` is ``"determinant"`` when the verdict comes from the
    Routh-Hurwitz chain and ``"oracle"`` when it comes from root finding only
    (``det_signed`` is then empty).
    """

    l: int
    eigenvalue: complex
    det_signed: Tuple[float, ...]
    hurwitz_stable: bool
    marginal: bool
    oracle_max_real_part: float
    source: str = "determinant"

    def to_dict(self):
        return {
            "l": self.l,
            "lambda_re": float(self.eigenvalue.real),
            "lambda_im": float(self.eigenvalue.imag),
            "det_signed": [float(v) for v in self.det_signed],
            "stable": bool(self.hurwitz_stable),
            "marginal": bool(self.marginal),
            "oracle_max_real_part": float(self.oracle_max_real_part),
            "source": self.source,
        }


@dataclass(frozen=True, eq=False)
class StabilityReport:
    gains: Gains
    N: int
    mode: str
    verdicts: Tuple[ModeVerdict, ...]
    system_stable: bool
    zero_mode_count: int
    method: str
    matrix_id: str
    leader: Optional[int] = None
    graph: Optional[object] = field(default=None, repr=False)

    @property
    def status(self):
        """``"stable"``, ``"unstable"`` or ``"marginal"``"""
        if self.system_stable:
            return "stable"
        if any(not v.hurwitz_stable and not v.marginal for v in self.verdicts):
            return "unstable"

        return "marginal"

    @property
    def lambda2_real(self):
        """Real part of the smallest included eigenvalue"""
        if not self.verdicts:
            return math.nan

        return float(min(v.eigenvalue.real for v in self.verdicts))

    @property
    def max_real_part(self):
        """Largest root real part over the included modes, the closed loop's rate"""
        if not self.verdicts:
            return -math.inf

        return float(max(v.oracle_max_real_part for v in self.verdicts))

    def to_dict(self):
        out = {
            "gains": list(self.gains.a),
            "n": self.gains.n,
            "N": self.N,
            "mode": self.mode,
            "per_mode": [v.to_dict() for v in self.verdicts],
            "system_stable": bool(self.system_stable),
            "status": self.status,
            "zero_mode_count": int(self.zero_mode_count),
            "method": self.method,
        }
        if self.leader is not None:
            out["leader"] = self.leader + 1

        return out


def _exact_zero_roots(p):
    coef = p.coef
    count = 0
    while count < coef.size - 1 and coef[count] == 0:
        count += 1

    return count


def _is_normal(M, tol):
    return bool(np.max(np.abs(M.T @ M - M @ M.T), initial=0.0) <= tol)


def _determinant_verdict(gains, l, lam, tol):
    p = mode_char_poly(gains, lam)
    chain = hurwitz_chain(to_mu_polynomial(p))
    roots = p.roots()
    max_re = float(np.max(roots.real))
    marginal = bool(np.min(np.abs(chain)) <= tol or abs(max_re) <= tol)

    return ModeVerdict(
        l=l,
        eigenvalue=complex(lam),
        det_signed=tuple(float(v) for v in chain),
        hurwitz_stable=bool(np.all(chain > 0)),
        marginal=marginal,
        oracle_max_real_part=max_re,
        source="determinant",
    )


def _oracle_verdict(gains, l, lam, tol):
    roots = mode_char_poly(gains, lam).roots()
    max_re = float(np.max(roots.real))

    return ModeVerdict(
        l=l,
        eigenvalue=complex(lam),
        det_signed=(),
        hurwitz_stable=max_re < 0,
        marginal=abs(max_re) <= tol,
        oracle_max_real_part=max_re,
        source="oracle",
    )


def assess(gains, g, mode="leaderless", leader=None, method="auto"):
    """
    Decide stability of the closed loop for given gains and graph

    Parameters
    ----------
    gains : :obj:`Gains`
        Gains

    g : :obj:`consensus_lab.graph.Graph`
        Graph

    mode : {"leaderless", "leader"}
        Leaderless consensus (modes ``l = 2, ..., N`` of ``L``) or
        leader-follower consensus (modes ``l = 1, ..., N - 1`` of the grounded
        Laplacian)

    leader : int, optional
        Leader index (0-based), required for ``mode="leader"``

    method : {"auto", "determinant", "oracle"}
        ``"auto"`` uses the determinant chain when the Laplacian is normal and
        the closed-loop eigenvalue oracle otherwise

    Returns
    -------
    :obj:`StabilityReport`

    Raises
    ------
    DomainError
        No spanning tree (leaderless), leader not reachable (leader mode), or
        ``method="determinant"`` on a non-normal Laplacian

    NumericError
        The determinant chain and the root oracle disagree on a mode outside the
        margin band

    Examples
    --------
    >>> from consensus_lab.families import GraphFamily, generate
    >>> assess(Gains((0.5, 1, 1)), generate(GraphFamily("cycle"), 9)).status
    'unstable'
    """
    if mode not in MODES:
        raise DomainError("Unknown mode {!r}, expected one of {}".format(mode, MODES))
    if method not in METHODS:
        raise DomainError(
            "Unknown method {!r}, expected one of {}".format(method, METHODS)
        )

    if mode == "leaderless":
        if not has_spanning_tree(g):
            raise DomainError(
                "Graph has no spanning tree, so its Laplacian does not have a "
                "simple zero eigenvalue and consensus is impossible"
            )
        L = build_laplacian(g)
        leader = None
    else:
        leader = check_leader(g, leader)
        if not leader_reachable(g, leader):
            raise DomainError(
                "Not every agent is connected to leader {} by a directed path".format(
                    leader
                )
            )
        L = build_laplacian(g, "grounded", leader)

    tol = config["MARGIN_TOL"]
    normal = _is_normal(np.asarray(L.matrix), config["STRUCT_TOL"])
    if method == "auto":
        method = "determinant" if normal else "oracle"
    elif method == "determinant" and not normal:
        raise DomainError(
            "The determinant chain needs a normal Laplacian, {} is not".format(L.name)
        )

    eigenvalues = spectrum(L).eigenvalues
    skip = 1 if mode == "leaderless" else 0
    included = list(enumerate(eigenvalues, start=1))[skip:]

    if method == "determinant":
        verdicts = tuple(
            _determinant_verdict(gains, l, lam, tol) for l, lam in included
        )
        for v in verdicts:
            if not v.marginal and v.hurwitz_stable != (v.oracle_max_real_part < 0):
                raise NumericError(
                    "Routh-Hurwitz chain {} and root oracle (max real part {}) "
                    "disagree for mode l={}".format(
                        v.det_signed, v.oracle_max_real_part, v.l
                    ),
                    matrix_id=L.name,
                )
        zero_mode_count = sum(
            _exact_zero_roots(mode_char_poly(gains, lam)) for lam in eigenvalues
        )
    else:
        verdicts = tuple(_oracle_verdict(gains, l, lam, tol) for l, lam in included)
        oracle = eigen_oracle(gains, L)
        modes_stable = all(v.hurwitz_stable for v in verdicts)
        if abs(oracle.max_real_part) > tol and modes_stable != (
            oracle.max_real_part < 0
        ):
            raise NumericError(
                "Per-mode roots and closed-loop spectrum (max real part {}) "
                "disagree".format(oracle.max_real_part),
                matrix_id=oracle.matrix_id,
            )
        zero_mode_count = oracle.zero_mode_count

    return StabilityReport(
        gains=gains,
        N=g.N,
        mode=mode,
        verdicts=verdicts,
        system_stable=all(v.hurwitz_stable for v in verdicts),
        zero_mode_count=zero_mode_count,
        method=method,
        matrix_id=L.name,
        leader=leader,
        graph=g,
    )


def leader_follower_size_bound(gains, q, w_max=1.0):
    """
    Smallest ``N`` at which leader-follower consensus is guaranteed unstable

    The grounded Laplacian satisfies :math:`\\bar\\lambda_1 \\le q w_{max} / (N - 1)`
    and stability of the slowest mode needs
    :math:`a_{n-1} a_{n-2} \\bar\\lambda_1 > a_{n-3}`, so every
    :math:`N > a_{n-1} a_{n-2} q w_{max} / a_{n-3} + 1` is unstable.

    Raises
    ------
    DomainError
        ``n < 3`` or :math:`a_{n-3} = 0`
    """
    a1, a2, a3 = _top_three(gains)
    if a3 <= 0:
        raise DomainError("No finite bound when a_{n-3} = 0")

    return int(math.floor(a1 * a2 * q * w_max / a3)) + 2
