"""Graph signal processing: shifts, graph Fourier transform, filtering and sampling."""

__version__ = "0.1.0"

from graphsp.errors import GSPError, InputError, NumericError
from graphsp.graph import (
    DENSE_THRESHOLD,
    Graph,
    ShiftKind,
    ShiftOperator,
    cycle_graph,
    from_edge_list,
    knn_graph,
    relabel,
    shift,
)
from graphsp.spectral import (
    SpectralBasis,
    eigendecompose,
    gft,
    igft,
    order_frequencies,
    rayleigh_quotient,
    spectral_radius,
    total_variation,
)
from graphsp.filtering import (
    ChebyshevFilter,
    Custom,
    FilterKernel,
    Heat,
    IdealHighPass,
    IdealLowPass,
    Polynomial,
    Tikhonov,
    apply_exact,
    apply_polynomial,
    check_shift_invariance,
    chebyshev_apply,
    chebyshev_fit,
    impulse_response,
    spectral_upper_bound,
)
from graphsp.sampling import (
    BandlimitedModel,
    SamplingSet,
    detect_outliers,
    greedy_select,
    random_bandlimited,
    reconstruct,
    uniqueness_check,
)
