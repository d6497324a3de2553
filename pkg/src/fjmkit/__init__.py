"""fjmkit: design and analysis toolkit for micro-sized fiber jamming modules.

Predict jammed/unjammed stiffness and the stiffness-variation ratio from
fiber count, fiber size, and packing density; pack fibers into membranes;
fit measured force-deflection curves; sweep the design space.
"""

__version__ = "0.1.0"

from .curves import CurveMeta, ForceDeflectionCurve
from .errors import (
    ConfigurationError,
    DegenerateCurveError,
    FjmError,
    InsufficientDataError,
    InvalidArgumentError,
    MalformedCurveError,
    NoFeasibleDesignError,
    OutOfModelError,
)
from .explorer import (
    Constraints,
    DesignPoint,
    SweepGrid,
    TableRow,
    generate_table,
    select_optimal,
    sweep,
    write_sweep_csv,
    write_table_csv,
)
from .fitting import (
    CurveFitReport,
    aggregate_reports,
    calibrate_friction,
    compute_variation,
    detect_knee,
    fit_jammed,
    fit_unjammed,
)
from .geometry import (
    CirclePackingLayout,
    PackingResult,
    fiber_count_for_density,
    max_fibers_in_circle,
    min_enclosing_ratio,
    packing_density,
)
from .config import ToolConfig, default_config, parse_config, validate_config
from .mechanics import (
    EpsilonEstimate,
    FiberSpec,
    FjmConfig,
    FrictionGroup,
    FrictionModel,
    JammingState,
    MembraneSpec,
    PhaseParams,
    StiffnessReport,
    epsilon_model,
    estimate_epsilon,
    inertia_jammed,
    inertia_unjammed,
    load_bundled_friction_model,
    predict_curve,
    stiffness_report,
    tip_stiffness,
    variation_ratio,
)

__all__ = [
    "__version__",
    # errors
    "FjmError",
    "InvalidArgumentError",
    "MalformedCurveError",
    "InsufficientDataError",
    "DegenerateCurveError",
    "OutOfModelError",
    "ConfigurationError",
    "NoFeasibleDesignError",
    # geometry
    "CirclePackingLayout",
    "PackingResult",
    "max_fibers_in_circle",
    "min_enclosing_ratio",
    "packing_density",
    "fiber_count_for_density",
    # mechanics
    "FiberSpec",
    "MembraneSpec",
    "FjmConfig",
    "JammingState",
    "PhaseParams",
    "StiffnessReport",
    "FrictionGroup",
    "FrictionModel",
    "EpsilonEstimate",
    "inertia_unjammed",
    "inertia_jammed",
    "tip_stiffness",
    "variation_ratio",
    "estimate_epsilon",
    "epsilon_model",
    "stiffness_report",
    "predict_curve",
    "load_bundled_friction_model",
    # curves
    "ForceDeflectionCurve",
    "CurveMeta",
    # fitting
    "CurveFitReport",
    "detect_knee",
    "fit_jammed",
    "fit_unjammed",
    "compute_variation",
    "calibrate_friction",
    "aggregate_reports",
    # explorer
    "SweepGrid",
    "DesignPoint",
    "Constraints",
    "TableRow",
    "generate_table",
    "sweep",
    "select_optimal",
    "write_sweep_csv",
    "write_table_csv",
    # config
    "ToolConfig",
    "validate_config",
    "parse_config",
    "default_config",
]
