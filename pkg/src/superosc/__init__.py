"""Superoscillatory band-limited signals and the weak-value machinery behind them.

Units: hbar = 1 everywhere; spin operators are sigma / 2.
"""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    ConditioningWarning,
    DuplicatePointsError,
    OrthogonalSelectionError,
    QuadratureError,
    RankDeficientError,
    SingularityError,
    SuperoscError,
)
from .signal import BandLimitedSpectrum, SampledField, dft_oracle, energy, evaluate_spectrum  # noqa: E402
from .synthesis import (  # noqa: E402
    MinEnergyInterpolator,
    YieldOptimizer,
    elementary_so,
    min_energy_interpolant,
    optimize_yield,
    synthesize_from_kernel,
)
from .analysis import (  # noqa: E402
    PlaneWaveEnsemble,
    detect_so_regions,
    local_wavenumber,
    measure_yield,
    random_wave,
    so_fraction_closed,
    so_fraction_mc,
)
from .weakvalue import (  # noqa: E402
    HermitianOperator,
    PointerModel,
    TwoStateVector,
    expectation,
    pointer_final_state,
    spin_tail_mc,
    superweak_probability,
    weak_value,
)
from .vortex import VortexProbe, superkick_distribution, superkick_fft_oracle  # noqa: E402
