"""Time-dependent coupling schedules: constant drive and counterintuitive
Gaussian pulse pairs for adiabatic (dark-state) transfer.

The pulse pair is ordered so the receiver-side coupling g_B peaks first
(at t_center) and the sender-side coupling g_A peaks t_delay later; adiabatic
following of the resulting dark state keeps the lossy mediator nearly empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .qspace import PureQubitSpec, link_layout, partial_trace, product_state

__all__ = [
    "ConstantSchedule",
    "StirapSchedule",
    "CouplingSchedule",
    "default_stirap",
    "default_stirap_window",
    "tune_stirap",
    "stirap_grid_search",
]

# Adiabaticity g0*T and pulse overlap t_delay/T used when nothing is specified.
DEFAULT_ADIABATICITY = 100.0
DEFAULT_DELAY_RATIO = 1.2


@dataclass(frozen=True)
class ConstantSchedule:
    """Couplings held at g0_a, g0_b for all times."""

    g0_a: float
    g0_b: float

    def __post_init__(self) -> None:
        if self.g0_a < 0 or self.g0_b < 0:
            raise ValueError("peak couplings must be >= 0")

    def g_a_at(self, t: float) -> float:
        return self.g0_a

    def g_b_at(self, t: float) -> float:
        return self.g0_b


@dataclass(frozen=True)
class StirapSchedule:
    """Gaussian pulse pair g_B(t) = g0_b exp(-(t-t_center)^2/T^2),
    g_A(t) = g0_a exp(-(t-t_center-t_delay)^2/T^2).

    t_center locates the g_B peak inside the simulation window so the whole
    protocol fits in t >= 0; it defaults to 3*T.
    """

    g0_a: float
    g0_b: float
    pulse_width: float
    t_delay: float
    t_center: float = -1.0  # sentinel: resolved to 3*pulse_width

    def __post_init__(self) -> None:
        if self.g0_a < 0 or self.g0_b < 0:
            raise ValueError("peak couplings must be >= 0")
        if self.pulse_width <= 0:
            raise ValueError("pulse_width must be > 0")
        if self.t_delay <= 0:
            raise ValueError("t_delay must be > 0")
        if self.t_center < 0:
            object.__setattr__(self, "t_center", 3.0 * self.pulse_width)

    def g_a_at(self, t: float) -> float:
        x = (t - self.t_center - self.t_delay) / self.pulse_width
        return self.g0_a * math.exp(-x * x)

    def g_b_at(self, t: float) -> float:
        x = (t - self.t_center) / self.pulse_width
        return self.g0_b * math.exp(-x * x)

    def window(self) -> tuple[float, float]:
        return default_stirap_window(self)


CouplingSchedule = Union[ConstantSchedule, StirapSchedule]


def default_stirap(
    g0: float,
    *,
    adiabaticity: float = DEFAULT_ADIABATICITY,
    delay_ratio: float = DEFAULT_DELAY_RATIO,
    g0_b: float | None = None,
) -> StirapSchedule:
    """Pulse pair with width T = adiabaticity/g0 and delay = delay_ratio*T."""
    if g0 <= 0:
        raise ValueError("g0 must be > 0")
    width = adiabaticity / g0
    return StirapSchedule(
        g0_a=g0,
        g0_b=g0 if g0_b is None else g0_b,
        pulse_width=width,
        t_delay=delay_ratio * width,
    )


def default_stirap_window(schedule: StirapSchedule) -> tuple[float, float]:
    """[t0, t1] outside which both envelopes are below exp(-9) of peak."""
    if not isinstance(schedule, StirapSchedule):
        raise ValueError("window is only defined for StirapSchedule")
    t0 = max(0.0, schedule.t_center - 3.0 * schedule.pulse_width)
    t1 = schedule.t_center + schedule.t_delay + 3.0 * schedule.pulse_width
    return (t0, t1)


def stirap_grid_search(
    params,
    width_grid: Sequence[float],
    delay_grid: Sequence[float],
    *,
    mode_dim: int = 2,
    dt: float | None = None,
) -> list[dict]:
    """Evaluate end-of-window transfer fidelity for every (T, t_delay) pair.

    Each grid point transmits the excited state |1> through the link built
    from `params` and records the fidelity against |1> at the window end.
    """
    # Imported here to avoid a circular import with the dynamics module.
    from . import dynamics

    if len(width_grid) == 0 or len(delay_grid) == 0:
        raise ValueError("grids must be non-empty")
    layout = link_layout(mode_dim=mode_dim)
    target = PureQubitSpec(theta=math.pi)
    rho0 = product_state([target, None, None], layout)
    collapse = dynamics.standard_collapse(params, layout)
    records = []
    for width in width_grid:
        for delay in delay_grid:
            schedule = StirapSchedule(
                g0_a=params.g_a, g0_b=params.g_b, pulse_width=width, t_delay=delay
            )
            _, t1 = default_stirap_window(schedule)
            step = dt if dt is not None else dynamics.default_dt(params, schedule)
            try:
                traj = dynamics.evolve(
                    rho0, layout, params, schedule, collapse, (0.0, t1), step,
                    sample_every=max(1, int(round(t1 / step)) // 50), target=target,
                )
            except dynamics.IntegrationError as err:
                raise dynamics.IntegrationError(
                    f"grid point (T={width:g}, t_delay={delay:g}): {err}", t=err.t
                ) from err
            rho_b = partial_trace(traj.final_state, layout.n_sites - 1, layout)
            fid = float(np.real(rho_b[1, 1]))
            records.append(
                {"pulse_width": width, "t_delay": delay, "window": t1, "fidelity": fid}
            )
    return records


def tune_stirap(
    params,
    width_grid: Sequence[float],
    delay_grid: Sequence[float],
    *,
    mode_dim: int = 2,
    dt: float | None = None,
) -> tuple[float, float]:
    """Best (pulse_width, t_delay) by final transfer fidelity.

    Ties are broken by smaller total window duration, then by smaller width.
    """
    records = stirap_grid_search(params, width_grid, delay_grid, mode_dim=mode_dim, dt=dt)
    best = min(records, key=lambda r: (-r["fidelity"], r["window"], r["pulse_width"]))
    return (best["pulse_width"], best["t_delay"])
