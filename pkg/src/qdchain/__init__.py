"""Coherent one- and two-electron transport in a chain of tunnel-coupled quantum dots."""

from .analytic import (
    SpectrumSpec,
    effective_pair_coupling,
    optimal_1e_amplitude,
    optimal_2e_amplitude,
    spectrum,
    uniform_1e_amplitude,
)
from .entangler import (
    ExchangePulse,
    ProtocolSchedule,
    SpinPairState,
    default_schedule,
    entangler_chain,
    exchange_unitary,
    pulse_area,
    run_protocol,
    width_for_area,
)
from .hamiltonian import SectorHamiltonian, build_1e, build_2e
from .hilbert import (
    SectorBasis,
    Spin,
    StateVector,
    index_2e,
    occupation_1e,
    occupation_2e,
    pair_from_index,
)
from .model import (
    ChainParams,
    DisorderSpec,
    MaterialParams,
    estimate_parameters,
    load_chain,
    optimal_couplings,
    sample_disorder,
    validate_regime,
)
from .montecarlo import (
    DetectorSignal,
    InitialState,
    TrajectoryRecord,
    detector_signal,
    master_equation_oracle,
    run_ensemble,
    run_trajectory,
)
from .propagate import EvolutionPlan, IntegrationError, evolve, survival_probability

__version__ = "0.1.0"
