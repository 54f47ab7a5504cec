"""Quantum-channel numerics for noise inverses, implementability and negativity."""

__version__ = "0.1.0"

from .channel import (  # noqa: E402
    ChoiOperator,
    KrausChannel,
    MixedUnitaryDecomposition,
    StateOperator,
    apply,
    choi_from_kraus,
    choi_from_mixed_unitary,
    compose,
    identity_channel,
    inverse,
    is_cp,
    is_hp,
    is_tp,
    map_partial_transpose,
    reshuffle,
    tensor,
)
from .measures import (  # noqa: E402
    bloch_vector,
    eta_upper,
    log_negativity,
    mu_from_weights,
    nu_bounds,
    nu_orthogonal,
    purity,
    separability_necessary,
)
from .noise import (  # noqa: E402
    NoiseFamily,
    build_channel,
    build_inverse,
    max_entangled_delta,
    mu_inverse,
    nu_inverse,
)
from .sampling import EnsembleSpec  # noqa: E402
