"""Transfer-quality metrics: target fidelity, entanglement fidelity,
Haar-average fidelity, and coherent information.

Channel-level quantities are obtained operationally: an idle reference qubit
R is prepended to the link, prepared maximally entangled with the source
qubit A, and the joint system is evolved with R untouched by the Hamiltonian
and by every collapse channel. Entropies of the reduced (B) and (R, B) states
then give the coherent information I = S(B') - S(R'B'), the second term being
the entropy exchange realized through purification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import dynamics
from .protocols import CouplingSchedule
from .qspace import (
    PureQubitSpec,
    Qubit,
    SystemLayout,
    partial_trace,
    product_state,
    von_neumann_entropy,
)

__all__ = [
    "ChannelProbe",
    "transfer_fidelity",
    "run_channel_probe",
    "coherent_information",
    "entanglement_fidelity",
    "haar_qubit_specs",
    "average_fidelity",
]

FIDELITY_SLACK = 1e-9  # raw overlaps may be outside [0, 1] by at most this


def _clamp_fidelity(value: float) -> float:
    if value < -FIDELITY_SLACK or value > 1.0 + FIDELITY_SLACK:
        raise ValueError(f"fidelity {value!r} outside [0, 1] beyond numerical slack")
    return min(1.0, max(0.0, value))


def transfer_fidelity(rho_b: np.ndarray, target: PureQubitSpec) -> float:
    """Overlap <psi_t| rho_B |psi_t> with the intended pure state."""
    rho_b = np.asarray(rho_b, dtype=complex)
    if rho_b.shape != (2, 2):
        raise ValueError(f"expected a 2x2 qubit state, got shape {rho_b.shape}")
    ket = target.ket()
    return _clamp_fidelity(float(np.real(ket.conj() @ rho_b @ ket)))


def bell_phi_plus() -> np.ndarray:
    """|Phi+><Phi+| on two qubits."""
    ket = np.zeros(4, dtype=complex)
    ket[0] = ket[3] = 1.0 / math.sqrt(2.0)
    return np.outer(ket, ket.conj())


@dataclass
class ChannelProbe:
    """Reference-extended link state before and after evolution.

    layout is the link layout with the idle reference qubit R prepended at
    site 0; joint_initial restricted to (R, A) is the Bell state |Phi+>.
    """

    layout: SystemLayout
    joint_initial: np.ndarray
    evolved_joint: Optional[np.ndarray] = None
    trajectory: Optional[dynamics.Trajectory] = None

    @property
    def site_b(self) -> int:
        return self.layout.n_sites - 1


def _probe_initial(layout: SystemLayout) -> tuple[SystemLayout, np.ndarray]:
    probe_layout = SystemLayout((Qubit(),) + layout.sites)
    rest_dim = layout.total_dim // 2  # everything after qubit A
    ket = np.zeros(probe_layout.total_dim, dtype=complex)
    rest_ground = np.zeros(rest_dim, dtype=complex)
    rest_ground[0] = 1.0
    for z in (0, 1):
        e = np.zeros(2, dtype=complex)
        e[z] = 1.0
        ket += np.kron(np.kron(e, e), rest_ground) / math.sqrt(2.0)
    return probe_layout, np.outer(ket, ket.conj())


def run_channel_probe(
    params: dynamics.LinkParams,
    schedule: CouplingSchedule,
    t_final: float,
    dt: Optional[float] = None,
    *,
    layout: Optional[SystemLayout] = None,
    collapse: Optional[Sequence[dynamics.CollapseChannel]] = None,
    sample_every: int = 100,
    g_hop: float = 0.0,
) -> ChannelProbe:
    """Evolve the reference-extended link and return the filled probe.

    The link Hamiltonian and collapse channels are lifted as I_R (x) X, so the
    reference qubit is strictly idle.
    """
    from .qspace import link_layout

    if layout is None:
        layout = link_layout()
    if dt is None:
        dt = dynamics.default_dt(params, schedule)
    if collapse is None:
        collapse = dynamics.standard_collapse(params, layout)

    probe_layout, joint0 = _probe_initial(layout)
    eye_r = np.eye(2, dtype=complex)
    terms = dynamics.hamiltonian_terms(params, layout, g_hop=g_hop)
    lifted_terms = dynamics.HamiltonianTerms(
        h_static=np.kron(eye_r, terms.h_static),
        h_a=np.kron(eye_r, terms.h_a),
        h_b=np.kron(eye_r, terms.h_b),
    )
    lifted_collapse = [
        dynamics.CollapseChannel(np.kron(eye_r, ch.operator), ch.rate) for ch in collapse
    ]
    traj = dynamics.evolve(
        joint0, probe_layout, params, schedule, lifted_collapse,
        (0.0, t_final), dt, sample_every=sample_every, terms=lifted_terms,
    )
    return ChannelProbe(
        layout=probe_layout,
        joint_initial=joint0,
        evolved_joint=traj.final_state,
        trajectory=traj,
    )


def _reduced(probe: ChannelProbe, joint: Optional[np.ndarray], keep) -> np.ndarray:
    state = probe.evolved_joint if joint is None else joint
    if state is None:
        raise ValueError("probe has not been evolved")
    return partial_trace(state, keep, probe.layout)


def coherent_information(probe: ChannelProbe, joint: Optional[np.ndarray] = None) -> float:
    """I = S(rho_B') - S(rho_RB') in bits for the evolved probe state."""
    rho_b = _reduced(probe, joint, probe.site_b)
    rho_rb = _reduced(probe, joint, (0, probe.site_b))
    return von_neumann_entropy(rho_b) - von_neumann_entropy(rho_rb)


def entanglement_fidelity(probe: ChannelProbe, joint: Optional[np.ndarray] = None) -> float:
    """Overlap of the reduced (R, B) state with the initial Bell state.

    B is read in the calibrated receiver frame, so the ideal lossless link
    scores 1.
    """
    rho_rb = _reduced(probe, joint, (0, probe.site_b))
    frame = np.kron(np.eye(2, dtype=complex), dynamics.RECEIVER_FRAME)
    rho_rb = frame @ rho_rb @ frame
    return _clamp_fidelity(float(np.real(np.trace(bell_phi_plus() @ rho_rb))))


def haar_qubit_specs(n_samples: int, seed: int) -> list[PureQubitSpec]:
    """Haar-uniform pure qubit states: theta = arccos(1 - 2u), phi uniform."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random(n_samples)
    v = rng.random(n_samples)
    return [
        PureQubitSpec(theta=float(np.arccos(1.0 - 2.0 * ui)), phi=float(2.0 * math.pi * vi))
        for ui, vi in zip(u, v)
    ]


def average_fidelity(
    link_run: Callable[[PureQubitSpec], np.ndarray],
    n_samples: int = 500,
    seed: int = 0,
) -> float:
    """Mean transfer fidelity over Haar-random inputs sent through the link.

    link_run maps an input state spec to the received 2x2 qubit state.
    """
    total = 0.0
    for spec in haar_qubit_specs(n_samples, seed):
        total += transfer_fidelity(link_run(spec), spec)
    return total / n_samples


def make_link_run(
    params: dynamics.LinkParams,
    schedule: CouplingSchedule,
    t_final: float,
    dt: Optional[float] = None,
    *,
    mode_dim: int = 2,
) -> Callable[[PureQubitSpec], np.ndarray]:
    """End-to-end single-link channel: place the input on A, evolve, read B."""
    from .qspace import link_layout

    layout = link_layout(mode_dim=mode_dim)
    collapse = dynamics.standard_collapse(params, layout)
    terms = dynamics.hamiltonian_terms(params, layout)
    step = dt if dt is not None else dynamics.default_dt(params, schedule)
    n_steps = max(1, int(round(t_final / step)))

    def run(spec: PureQubitSpec) -> np.ndarray:
        rho0 = product_state([spec] + [None] * (layout.n_sites - 1), layout)
        traj = dynamics.evolve(
            rho0, layout, params, schedule, collapse, (0.0, t_final), step,
            sample_every=n_steps, terms=terms,
        )
        return dynamics.receiver_frame(
            partial_trace(traj.final_state, layout.n_sites - 1, layout)
        )

    return run
