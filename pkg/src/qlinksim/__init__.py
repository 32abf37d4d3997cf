"""qlinksim: Lindblad-level simulation of mediated qubit-to-qubit links."""

from .qspace import (
    InvalidStateError,
    Mode,
    PureQubitSpec,
    Qubit,
    SystemLayout,
    check_density_matrix,
    embed,
    link_layout,
    local_operator,
    partial_trace,
    product_state,
    purity,
    von_neumann_entropy,
)
from .protocols import (
    ConstantSchedule,
    StirapSchedule,
    default_stirap,
    default_stirap_window,
    tune_stirap,
)
from .dynamics import (
    CollapseChannel,
    IntegrationError,
    LinkParams,
    Trajectory,
    default_dt,
    evolve,
    hamiltonian_at,
    lindblad_rhs,
    propagator_oracle,
    receiver_frame,
    standard_collapse,
)
from .metrics import (
    ChannelProbe,
    average_fidelity,
    coherent_information,
    entanglement_fidelity,
    run_channel_probe,
    transfer_fidelity,
)
from .network import (
    ChainResult,
    LinkSpec,
    MediumModel,
    SweepPoint,
    distance_sweep,
    effective_kappa,
    run_chain,
    run_hop,
)

__version__ = "0.1.0"

__all__ = [
    "CollapseChannel",
    "ChainResult",
    "ChannelProbe",
    "ConstantSchedule",
    "IntegrationError",
    "InvalidStateError",
    "LinkParams",
    "LinkSpec",
    "MediumModel",
    "Mode",
    "PureQubitSpec",
    "Qubit",
    "StirapSchedule",
    "SweepPoint",
    "SystemLayout",
    "Trajectory",
    "average_fidelity",
    "check_density_matrix",
    "coherent_information",
    "default_dt",
    "default_stirap",
    "default_stirap_window",
    "distance_sweep",
    "effective_kappa",
    "embed",
    "entanglement_fidelity",
    "evolve",
    "hamiltonian_at",
    "lindblad_rhs",
    "link_layout",
    "local_operator",
    "partial_trace",
    "product_state",
    "propagator_oracle",
    "purity",
    "receiver_frame",
    "run_chain",
    "run_channel_probe",
    "run_hop",
    "standard_collapse",
    "transfer_fidelity",
    "tune_stirap",
    "von_neumann_entropy",
]
