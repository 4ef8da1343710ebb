"""Gaussian covariance-matrix toolkit for deciding separability of measurements behind noisy channels."""

from .channels import (
    CanonicalForm,
    CanonicalKind,
    ChannelSpec,
    GaussianChannel,
    HolevoType,
    Primitive,
    amp,
    amp_then_loss,
    apply_channel,
    b1,
    build,
    classify,
    compose,
    dual,
    dual_spec,
    identity_channel,
    is_entanglement_breaking,
    loss,
    noise,
    rotate,
    spec,
    squeeze,
    to_amp_then_loss,
)
from .criteria import (
    StandardFormParams,
    duan_entangled,
    duan_value,
    extract_standard_form,
    log_negativity,
    partial_transpose,
    ppt_margin,
    ppt_separable,
)
from .decision import (
    ALL_SEPARABLE,
    INSEPARABLE_EXISTS,
    DecisionReport,
    KappaMu,
    all_measurements_separable,
    amp_loss_annihilates,
    amp_loss_to_kappa_mu,
    decision_consistency,
    dual_povm_check,
    fz_annihilates,
)
from .exceptions import (
    DegenerateMarginalError,
    GaussepError,
    NotStandardFormError,
    UnphysicalError,
    UnsupportedChannelError,
)
from .gaussian_core import (
    GaussianState,
    apply_symplectic,
    beamsplitter,
    is_physical,
    omega,
    random_pure_state,
    symplectic_eigenvalues,
    thermal_state,
    two_mode_squeezed_vacuum,
    vacuum_state,
)
from .measurements import MeasurementSpec, condition_on_measurement, cv_bell, heterodyne_pair, povm_element_state
from .swapping import SwapParams, SwapResult, product_measurement_no_swap, simulate_swap, threshold_scan

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
