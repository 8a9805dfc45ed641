"""
Time integration of the closed loop

The state is held as an ``(n, m)`` array, row ``k`` holding the ``k``-th
derivative of every agent. In leaderless mode ``m = N``; in leader mode the
leader is removed and the followers' states are measured relative to it
(the grounded Laplacian acts on them), so ``m = N - 1``.

Integration is classical fixed-step fourth order Runge-Kutta. Laplacian products
use the sparse Laplacian, the dense closed-loop matrix is never formed.
"""
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from .config import config
from .errors import DomainError
from .graph import Graph, build_laplacian, check_leader
from .stability import MODES, Gains
from .utils import resolve_seed

CLASSIFICATIONS = ("consensus", "diverging", "undecided")

TRACE_COLUMNS = ["t", "agent", "deriv_order", "value"]
"""list: Columns of the long-format trace CSV"""

# fractions of the horizon used by the classification
ENVELOPE_WINDOW = 0.1
RATE_WINDOW = 0.25
CONSENSUS_FACTOR = 1e-6
DIVERGENCE_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class SimConfig:
    """
    Configuration of a simulation

    Parameters
    ----------
    gains : :obj:`consensus_lab.stability.Gains`
        Gains

    graph : :obj:`consensus_lab.graph.Graph`
        Graph

    mode : {"leaderless", "leader"}
        Consensus mode

    leader : int, optional
        Leader index (0-based), required in leader mode

    step : float, optional
        Time step, defaults to ``config["SIM_STEP"]``

    horizon : float, optional
        Final time, defaults to ``config["SIM_HORIZON"]``

    seed : int, optional
        Seed of the random initial accelerations, defaults to ``config["SEED"]``

    amplitude : float
        Initial accelerations are uniform in ``[-amplitude, amplitude]``

    initial_state : array_like, optional
        Explicit ``(n, m)`` initial state, replaces the random initial condition

    record_every : int
        Store every ``record_every``-th state (the consensus metric is evaluated
        at every step)
    """

    gains: Gains
    graph: Graph
    mode: str = "leaderless"
    leader: Optional[int] = None
    step: Optional[float] = None
    horizon: Optional[float] = None
    seed: Optional[int] = None
    amplitude: float = 1.0
    initial_state: Optional[np.ndarray] = field(default=None, repr=False)
    record_every: int = 1

    def __post_init__(self):
        if self.step is None:
            object.__setattr__(self, "step", float(config["SIM_STEP"]))
        if self.horizon is None:
            object.__setattr__(self, "horizon", float(config["SIM_HORIZON"]))
        object.__setattr__(self, "seed", resolve_seed(self.seed))

        if not self.step > 0:
            raise DomainError("Time step must be positive, got {}".format(self.step))
        if self.horizon < self.step:
            raise DomainError(
                "Horizon {} is shorter than the time step {}".format(
                    self.horizon, self.step
                )
            )
        if self.mode not in MODES:
            raise DomainError(
                "Unknown mode {!r}, expected one of {}".format(self.mode, MODES)
            )
        if self.mode == "leader":
            object.__setattr__(self, "leader", check_leader(self.graph, self.leader))
        if self.record_every < 1:
            raise DomainError("record_every must be >= 1")

        if self.initial_state is not None:
            x0 = np.array(self.initial_state, dtype=float)
            if x0.shape != (self.gains.n, self.agent_count):
                raise DomainError(
                    "Initial state has shape {}, expected {}".format(
                        x0.shape, (self.gains.n, self.agent_count)
                    )
                )
            object.__setattr__(self, "initial_state", x0)

    @property
    def agent_count(self):
        return self.graph.N - 1 if self.mode == "leader" else self.graph.N

    @property
    def agent_labels(self):
        """1-based labels of the simulated agents"""
        labels = np.arange(1, self.graph.N + 1)
        if self.mode == "leader":
            labels = np.delete(labels, self.leader)

        return labels

    @property
    def steps(self):
        return int(round(self.horizon / self.step))

    def initial(self):
        """
        Initial state: explicit, or zero apart from random values in derivative
        order ``min(2, n - 1)``
        """
        if self.initial_state is not None:
            return self.initial_state.copy()

        n = self.gains.n
        x0 = np.zeros((n, self.agent_count))
        rng = np.random.default_rng(self.seed)
        x0[min(2, n - 1)] = rng.uniform(-self.amplitude, self.amplitude, x0.shape[1])

        return x0

    def to_dict(self):
        return {
            "gains": list(self.gains.a),
            "n": self.gains.n,
            "N": self.graph.N,
            "mode": self.mode,
            "leader": None if self.leader is None else self.leader + 1,
            "step": self.step,
            "horizon": self.horizon,
            "seed": self.seed,
            "amplitude": self.amplitude,
            "explicit_initial_state": self.initial_state is not None,
            "record_every": self.record_every,
        }


@dataclass(frozen=True, eq=False)
class SimTrace:
    config: SimConfig
    times: np.ndarray
    states: np.ndarray
    metric_times: np.ndarray
    metric: np.ndarray
    classification: str
    growth_rate: float
    stopped_early: bool

    @property
    def xi(self):
        """Stacked state, ``(n * m, samples)``, ordered by derivative order"""
        return self.states.reshape(self.states.shape[0], -1).T

    def to_frame(self):
        """
        Long-format trace with columns :data:`TRACE_COLUMNS`
        """
        samples, n, m = self.states.shape
        return pd.DataFrame(
            {
                "t": np.repeat(self.times, m * n),
                "agent": np.tile(np.repeat(self.config.agent_labels, n), samples),
                "deriv_order": np.tile(np.arange(n), samples * m),
                "value": self.states.transpose(0, 2, 1).ravel(),
            },
            columns=TRACE_COLUMNS,
        )

    def summary(self):
        return {
            "classification": self.classification,
            "growth_rate": None if math.isnan(self.growth_rate) else self.growth_rate,
            "stopped_early": self.stopped_early,
            "final_time": float(self.metric_times[-1]),
            "initial_metric": float(self.metric[0]),
            "final_metric": float(self.metric[-1]),
        }


def consensus_metric(x, mode):
    """
    Largest deviation from the reference over agents and derivative orders

    The reference is agent 1 in leaderless mode and the leader (zero in grounded
    coordinates) in leader mode.
    """
    if x.size == 0:
        return 0.0
    if mode == "leader":
        return float(np.max(np.abs(x)))

    return float(np.max(np.abs(x - x[:, :1])))


def _rhs_factory(gains, L):
    a = gains.as_array()

    def rhs(x):
        out = np.empty_like(x)
        out[:-1] = x[1:]
        out[-1] = -(L @ (a @ x))
        return out

    return rhs


def classify(metric_times, metric, overflow=False):
    """
    Classify a consensus metric time series

    The envelope is the running maximum of the metric over a trailing window of
    10% of the horizon; the growth rate is the least-squares slope of its
    logarithm over the final 25%.

    Returns
    -------
    tuple
        ``(classification, growth_rate)``
    """
    rate_tol = config["RATE_TOL"]
    if overflow:
        return "diverging", math.nan

    samples = metric.size
    m0, m_end = metric[0], metric[-1]
    if m_end == 0:
        return "consensus", -math.inf

    window = max(1, int(round(ENVELOPE_WINDOW * samples)))
    envelope = pd.Series(metric).rolling(window, min_periods=1).max().to_numpy()

    start = int((1 - RATE_WINDOW) * (samples - 1))
    tail_t, tail_env = metric_times[start:], envelope[start:]
    if tail_t.size >= 2 and np.all(tail_env > 0):
        growth_rate = float(np.polyfit(tail_t, np.log(tail_env), 1)[0])
    else:
        growth_rate = math.nan

    last = int((1 - ENVELOPE_WINDOW) * (samples - 1))
    increasing = envelope[-1] > envelope[last]

    if not increasing and (m_end < CONSENSUS_FACTOR * m0 or growth_rate < -rate_tol):
        return "consensus", growth_rate
    if increasing and (m_end > DIVERGENCE_FACTOR * m0 or growth_rate > rate_tol):
        return "diverging", growth_rate

    return "undecided", growth_rate


def integrate(cfg):
    """
    Integrate the closed loop with fixed-step fourth order Runge-Kutta

    Parameters
    ----------
    cfg : :obj:`SimConfig`
        Configuration

    Returns
    -------
    :obj:`SimTrace`
        Integration stops early, classified as diverging, if the state norm
        exceeds ``config["STATE_OVERFLOW"]``
    """
    if cfg.mode == "leader":
        L = build_laplacian(cfg.graph, "grounded", cfg.leader).sparse()
    else:
        L = build_laplacian(cfg.graph).sparse()

    rhs = _rhs_factory(cfg.gains, L)
    h = cfg.step
    overflow_at = config["STATE_OVERFLOW"]

    x = cfg.initial()
    times, states = [0.0], [x.copy()]
    metric = np.empty(cfg.steps + 1)
    metric[0] = consensus_metric(x, cfg.mode)
    overflow = False
    done = 0

    for k in range(1, cfg.steps + 1):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        done = k

        metric[k] = consensus_metric(x, cfg.mode)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > overflow_at:
            overflow = True
            times.append(k * h)
            states.append(x.copy())
            break

        if k % cfg.record_every == 0 or k == cfg.steps:
            times.append(k * h)
            states.append(x.copy())

    metric = metric[: done + 1]
    metric_times = np.arange(done + 1) * h
    classification, growth_rate = classify(metric_times, metric, overflow=overflow)
    if classification == "undecided":
        warnings.warn(
            "Simulation of {} agents up to t={} is undecided (growth rate {})".format(
                cfg.graph.N, metric_times[-1], growth_rate
            )
        )

    return SimTrace(
        config=cfg,
        times=np.array(times),
        states=np.array(states),
        metric_times=metric_times,
        metric=metric,
        classification=classification,
        growth_rate=growth_rate,
        stopped_early=overflow,
    )


@dataclass(frozen=True)
class AgreementRecord:
    classification: str
    system_stable: bool
    report_status: str
    excluded: bool
    agreement: Optional[bool]

    def to_dict(self):
        return {
            "classification": self.classification,
            "system_stable": self.system_stable,
            "report_status": self.report_status,
            "excluded": self.excluded,
            "agreement": self.agreement,
        }


def classify_against_report(trace, report):
    """
    Compare a simulation with a stability report of the same configuration

    Undecided traces are excluded (``agreement`` is ``None``).

    Raises
    ------
    DomainError
        Gains, graph, mode or leader of the trace and the report differ
    """
    cfg = trace.config
    if report.graph is not None and report.graph != cfg.graph:
        raise DomainError("Trace and report were computed on different graphs")
    if (
        cfg.gains != report.gains
        or cfg.mode != report.mode
        or cfg.graph.N != report.N
        or (cfg.leader if cfg.mode == "leader" else None) != report.leader
    ):
        raise DomainError(
            "Trace ({}, mode={}) and report ({}, mode={}) configurations differ".format(
                cfg.gains, cfg.mode, report.gains, report.mode
            )
        )

    excluded = trace.classification == "undecided"
    agreement = None
    if not excluded:
        agreement = (trace.classification == "consensus") == report.system_stable

    return AgreementRecord(
        classification=trace.classification,
        system_stable=report.system_stable,
        report_status=report.status,
        excluded=excluded,
        agreement=agreement,
    )
