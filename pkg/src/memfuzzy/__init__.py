"""Memristor-crossbar simulator for hardware fuzzy membership functions."""
from .device import (
    DeviceParams,
    DeviceState,
    apply_bias,
    closed_form_memristance,
    memristance,
    state_for_memristance,
)
from .crossbar import HIGH_Z, CrossbarArray, add_drives, read, singleton_drive, singleton_read, write_pulse
from .compiler import (
    Gaussian,
    LayoutMeta,
    MembershipSpec,
    OutOfDomainError,
    PiecewiseLinear,
    QuantizationGrid,
    Tabulated,
    TargetMatrix,
    Trapezoidal,
    Triangular,
    compile_antidiagonal,
    compile_rows,
    quantize,
    sample_mf,
)
from .programming import (
    NonConvergence,
    ProgramConfig,
    ProgramReport,
    estimate_pulses,
    measure_cell,
    program_cell,
    program_matrix,
)
from .inference import (
    FuzzyNumber,
    QueryResult,
    UnrepresentableMembership,
    evolve_cell,
    fuzzy_number_query,
    membership_query,
    stored_curve,
)

__version__ = "0.1.0"
