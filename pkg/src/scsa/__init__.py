"""Semi-classical signal analysis (SCSA).

A nonnegative pulse ``y`` is read as the potential well of the Schrodinger
operator ``-d^2/dx^2 - chi*y``; the signal is then rebuilt from the
operator's bound states as ``(4/chi) * sum kappa_n * psi_n^2``.
"""

from .core import (
    Fixed,
    ScsaResult,
    Selection,
    Sweep,
    TargetN,
    TraceRow,
    analyze,
    count_bound_states,
    error_metrics,
    mass,
    momentums,
    reconstruct,
    select_chi,
)
from .errors import (
    ConvergenceFailure,
    GridMismatch,
    HypothesisViolation,
    MatrixTooLarge,
    NonFiniteSample,
    NonPositiveChi,
    NonPositiveSpacing,
    NonUniformGrid,
    PropositionViolation,
    ReportError,
    ScsaError,
    SignalError,
    TargetUnreachable,
    TooFewSamples,
)
from .operator import DiscretizedOperator, Form, Scheme, assemble, weyl_estimate
from .oracles import (
    PoschlTellerSpec,
    brute_force_spectrum,
    poschl_teller_spectrum,
    sech2_on_window,
    sech2_signal,
)
from .signal import (
    Signal,
    ValidationReport,
    baseline_shift,
    from_samples,
    parse_csv,
    read_csv,
    validate,
    write_csv,
)
from .solver import (
    SolverConfig,
    SpectralDecomposition,
    eigen_count,
    negative_spectrum,
    sturm_counts,
)

__version__ = "0.1.0"
