"""Ground-state cooling analysis for a cavity-cooled chain of mechanical
resonators with cold-damping feedback.

Three mutually verifying solvers compute the steady-state phonon
numbers: frequency-domain spectral quadrature for any chain length, a
closed-form evaluation for two resonators, and a state-space Lyapunov
solve of the augmented feedback loop.
"""

from .chain import (
    CoolingResult,
    FrequencyResponse,
    QuadratureOptions,
    assemble_response,
    phonon_numbers,
    solve,
    spectrum,
    stability_check,
)
from .errors import (
    BracketError,
    ConfigError,
    DomainError,
    DominoError,
    NumericalError,
    OptimizationError,
    PoleError,
    StabilityError,
    UnsupportedMode,
)
from .params import (
    ChainParams,
    PhysicalParams,
    chain_from,
    load_config,
    nbar_from_temperature,
    to_dimensionless,
)
from .stability import StabilityReport
from .sweep import (
    Axis,
    SweepSpec,
    SwitchPoint,
    find_switch_point,
    optimize_cooling,
    run_sweep,
    set_param,
)
from .twomode import (
    EffectiveResponse,
    NoiseBreakdown,
    cooling_rates_resonant,
    effective_response,
    exact_phonon_numbers,
    noise_breakdown,
    position_spectrum_twomode,
)

__version__ = "1.0.0"

__all__ = [
    "Axis",
    "BracketError",
    "ChainParams",
    "ConfigError",
    "CoolingResult",
    "DomainError",
    "DominoError",
    "EffectiveResponse",
    "FrequencyResponse",
    "NoiseBreakdown",
    "NumericalError",
    "OptimizationError",
    "PhysicalParams",
    "PoleError",
    "QuadratureOptions",
    "StabilityError",
    "StabilityReport",
    "SweepSpec",
    "SwitchPoint",
    "UnsupportedMode",
    "assemble_response",
    "chain_from",
    "cooling_rates_resonant",
    "effective_response",
    "exact_phonon_numbers",
    "find_switch_point",
    "load_config",
    "nbar_from_temperature",
    "noise_breakdown",
    "optimize_cooling",
    "phonon_numbers",
    "position_spectrum_twomode",
    "run_sweep",
    "set_param",
    "solve",
    "spectrum",
    "stability_check",
    "to_dimensionless",
]
