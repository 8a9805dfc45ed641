"""
Critical network size sweeps

A sweep realizes a graph family with fixed parameters at growing ``N`` and
assesses the closed loop for fixed gains at every sampled size. The critical
network size is the smallest sampled ``N`` at which the closed loop is not
stable.
"""
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd

from .definitions import reference_gain_values
from .errors import DomainError
from .families import GraphFamily, family_sizes, generate
from .stability import MODES, Gains, StabilityReport, assess
from .utils import map_jobs, resolve_jobs

MAX_GAIN_COLUMNS = 5

SWEEP_COLUMNS = (
    ["family", "q", "n"]
    + ["a{}".format(k) for k in range(MAX_GAIN_COLUMNS)]
    + ["N", "lambda2_real", "stable"]
)
"""list: Columns of the per-N sweep CSV"""

SUMMARY_COLUMNS = ["q", "n", "critical_N"]
"""list: Columns of the critical network size summary CSV"""

VS_Q_COLUMNS = SUMMARY_COLUMNS + ["monotone"]
"""list: Columns of :func:`critical_N_vs_q`"""


def reference_gains(name, n):
    """
    Named reference gains truncated to order ``n``

    ``"path_sweep"`` holds :math:`a_0 = 0.1, a_1 = 0.8, a_2 = a_3 = a_4 = 1`,
    ``"ring_transition"`` holds :math:`(0.5, 1, 1)`.
    """
    return Gains(tuple(reference_gain_values(name, n)))


@dataclass(frozen=True)
class SweepSpec:
    """
    Sweep of a graph family over ``N = N_min, N_min + step, ..., <= N_max``

    ``leader`` is the 0-based leader index used in ``"leader"`` mode.
    """

    family: GraphFamily
    gains: Gains
    N_min: int = 2
    N_max: int = 100
    step: int = 1
    mode: str = "leaderless"
    leader: int = 0

    def __post_init__(self):
        if self.N_min < 2:
            raise DomainError("N_min must be >= 2, got {}".format(self.N_min))
        if self.step < 1:
            raise DomainError("step must be >= 1, got {}".format(self.step))
        if self.N_max < self.N_min:
            raise DomainError(
                "N_max={} is smaller than N_min={}".format(self.N_max, self.N_min)
            )
        if self.mode not in MODES:
            raise DomainError(
                "Unknown mode {!r}, expected one of {}".format(self.mode, MODES)
            )

    def sizes(self, start=None, stop=None, step=None):
        """
        Sampled sizes, restricted to perfect ``d``-th powers for toric lattices
        """
        start = self.N_min if start is None else start
        stop = self.N_max if stop is None else stop
        step = self.step if step is None else step
        return family_sizes(self.family, start, stop, step)


@dataclass(frozen=True)
class SweepRecord:
    N: int
    lambda2_real: float
    system_stable: bool
    status: str


@dataclass
class ScalingResult:
    spec: SweepSpec
    records: List[SweepRecord] = field(default_factory=list)
    critical_N: Optional[int] = None
    monotone_flag: bool = True

    def to_frame(self):
        """
        Per-N records in the layout of :data:`SWEEP_COLUMNS`
        """
        gains = list(self.spec.gains.a) + [np.nan] * (
            MAX_GAIN_COLUMNS - self.spec.gains.n
        )
        rows = []
        for rec in self.records:
            row = {
                "family": self.spec.family.tag,
                "q": self.spec.family.resolved_q,
                "n": self.spec.gains.n,
                "N": rec.N,
                "lambda2_real": rec.lambda2_real,
                "stable": rec.system_stable,
            }
            row.update(
                {"a{}".format(k): v for k, v in enumerate(gains[:MAX_GAIN_COLUMNS])}
            )
            rows.append(row)

        return pd.DataFrame(rows, columns=SWEEP_COLUMNS)

    def summary(self):
        """``{"q", "n", "critical_N"}`` row of the summary table"""
        return {
            "q": self.spec.family.resolved_q,
            "n": self.spec.gains.n,
            "critical_N": self.critical_N,
        }


def _assess_size(spec, method):
    assess_method = "oracle" if method == "oracle" else "auto"

    def _evaluate(N):
        g = generate(spec.family, N)
        leader = spec.leader if spec.mode == "leader" else None
        report = assess(spec.gains, g, spec.mode, leader, method=assess_method)
        return SweepRecord(
            N=N,
            lambda2_real=report.lambda2_real,
            system_stable=report.system_stable,
            status=report.status,
        )

    return _evaluate


def _first_unstable(records):
    for k, rec in enumerate(records):
        if not rec.system_stable:
            return k

    return None


def _sweep(evaluate, Ns, jobs, stop_at_critical):
    if not stop_at_critical:
        return map_jobs(evaluate, Ns, jobs=jobs)

    chunk = 4 * resolve_jobs(jobs)
    records = []
    for start in range(0, len(Ns), chunk):
        records.extend(map_jobs(evaluate, Ns[start : start + chunk], jobs=jobs))
        if _first_unstable(records) is not None:
            break

    return records


def find_critical_N(spec, jobs=1, method="determinant", stop_at_critical=False):
    """
    Find the critical network size of a sweep

    Parameters
    ----------
    spec : :obj:`SweepSpec`
        Sweep

    jobs : int
        Number of worker threads, results are merged in ``N`` order

    method : {"determinant", "oracle"}
        ``"determinant"`` assesses with the Routh-Hurwitz chain (falling back to
        the eigenvalue oracle for non-normal Laplacians), ``"oracle"`` with the
        closed-loop spectrum only

    stop_at_critical : bool
        Stop sampling once an unstable size is found. ``monotone_flag`` then only
        covers the evaluated sizes.

    Returns
    -------
    :obj:`ScalingResult`
        ``critical_N`` is ``None`` if every sampled size is stable

    Notes
    -----
    With ``step > 1`` the bracket between the last stable sample and the first
    unstable one is re-sampled with step 1, so the critical size is exact as
    long as stability does not change twice within one coarse step.
    """
    if method not in ("determinant", "oracle"):
        raise DomainError(
            "Unknown method {!r}, expected 'determinant' or 'oracle'".format(method)
        )

    evaluate = _assess_size(spec, method)
    records = _sweep(evaluate, spec.sizes(), jobs, stop_at_critical)

    k = _first_unstable(records)
    if spec.step > 1 and k is not None and k > 0:
        gap = spec.sizes(start=records[k - 1].N + 1, stop=records[k].N - 1, step=1)
        refined = map_jobs(evaluate, gap, jobs=jobs)
        records = sorted(records + refined, key=lambda rec: rec.N)
        k = _first_unstable(records)

    result = ScalingResult(spec=spec, records=records)
    if k is None:
        return result

    result.critical_N = records[k].N
    result.monotone_flag = all(not rec.system_stable for rec in records[k:])
    if not result.monotone_flag:
        restabilized = [rec.N for rec in records[k:] if rec.system_stable]
        warnings.warn(
            "Stability is not monotone in N for {}: unstable at N={} but stable "
            "again at N={}".format(spec.family.tag, result.critical_N, restabilized)
        )

    return result


@dataclass(frozen=True)
class NodeAddition:
    """A stable closed loop on ``N`` nodes that one more node makes unstable"""

    N: int
    before: StabilityReport
    after: StabilityReport


def find_node_addition(spec, margin=0.0, method="determinant"):
    """
    First size at which adding a single node destroys stability

    Consecutive realizations ``N`` and ``N + 1`` of ``spec.family`` are assessed
    for ``N_min <= N < N_max``. For the seeded Delaunay family the ``N + 1``
    point set extends the ``N`` point set, so the pair differs by one agent.

    Parameters
    ----------
    spec : :obj:`SweepSpec`
        Family, gains, mode and size range; ``step`` is ignored

    margin : float
        Required distance of the largest root real part from zero on both
        sides, so that the transition is visible in a finite simulation

    method : {"determinant", "oracle"}
        See :func:`find_critical_N`

    Returns
    -------
    :obj:`NodeAddition` or None
        ``None`` if no pair in the range qualifies
    """
    if method not in ("determinant", "oracle"):
        raise DomainError(
            "Unknown method {!r}, expected 'determinant' or 'oracle'".format(method)
        )
    if margin < 0:
        raise DomainError("margin must be >= 0, got {}".format(margin))
    if spec.family.tag == "toric_lattice":
        raise DomainError("Toric lattices are only realized at perfect powers of N")

    assess_method = "oracle" if method == "oracle" else "auto"
    leader = spec.leader if spec.mode == "leader" else None

    def _report(N):
        g = generate(spec.family, N)
        return assess(spec.gains, g, spec.mode, leader, method=assess_method)

    before = _report(spec.N_min)
    for N in range(spec.N_min, spec.N_max):
        after = _report(N + 1)
        if (
            before.system_stable
            and before.max_real_part < -margin
            and not after.system_stable
            and after.max_real_part > margin
        ):
            return NodeAddition(N=N, before=before, after=after)
        before = after

    return None


def critical_N_vs_q(
    template,
    qs,
    ns,
    gains,
    N_max=200,
    jobs=1,
    mode="leaderless",
    method="determinant",
    full_sweep=False,
):
    """
    Critical network size as a function of neighbourhood bound and order

    Parameters
    ----------
    template : :obj:`consensus_lab.families.GraphFamily`
        Family whose ``q`` is replaced by each entry of ``qs``

    qs : iterable of int
        Neighbourhood bounds

    ns : iterable of int
        Orders; the gains are truncated to each order

    gains : :obj:`consensus_lab.stability.Gains`
        Gains of at least order ``max(ns)``

    N_max : int
        Largest size sampled

    full_sweep : bool
        Sample every size up to ``N_max`` instead of stopping at the first
        unstable chunk, so that ``monotone`` covers the whole range

    Returns
    -------
    :obj:`pandas.DataFrame`
        Columns ``q, n, critical_N, monotone``; ``critical_N`` is missing when
        the system stays stable up to ``N_max``. ``monotone`` is ``False`` if a
        size after the critical one is stable again, each such sweep also
        raises a ``UserWarning``.
    """
    rows = []
    for q in qs:
        for n in ns:
            spec = SweepSpec(
                family=template.with_q(q),
                gains=gains.truncate(n),
                N_max=N_max,
                mode=mode,
            )
            result = find_critical_N(
                spec, jobs=jobs, method=method, stop_at_critical=not full_sweep
            )
            rows.append(dict(result.summary(), monotone=result.monotone_flag))

    out = pd.DataFrame(rows, columns=VS_Q_COLUMNS)
    out["critical_N"] = out["critical_N"].astype("Int64")

    return out
