"""Generalized Gorringe-Leach motions: integration, invariants, periods and duality."""

from .core import (
    DragKind,
    DragProfile,
    EquationSpec,
    PseudoState,
    TrueState,
    h_type,
    k_type,
    make_equation,
)
from .duality import (
    DualMap,
    certify_hooke_kepler,
    dual_exponent,
    dual_residual,
    dualize_trajectory,
    make_dual_map,
    round_trip,
)
from .dynamics import to_pseudo, to_true
from .errors import (
    DegenerateClass,
    DomainError,
    GLError,
    InsufficientEvents,
    NonConvergent,
    PoleAtC,
    PoleError,
    SingularityApproach,
    StepLimitExceeded,
    Unbound,
    WrongClass,
)
from .integrate import (
    Frame,
    IntegratorConfig,
    Trajectory,
    check_closure,
    detect_apsides,
    integrate,
    measure_radial_period,
)
from .invariants import drift, invariant_set
from .periods import (
    apsidal_radii,
    period_closed_form,
    period_legendre_form,
    period_quadrature,
    state_on_orbit,
)
from .specfun import gamma_fn, hyp2f1, legendre_p

__version__ = "0.1.0"
