"""Incoherent quantum operations: classification, Kraus reduction, qubit
state-conversion regions and Gibbs-preserving variants."""

from .bloch import BlochVector, as_bloch, bloch_of, compose, density, x_flip, z_rotation
from .channel import (
    Channel,
    ChannelClass,
    OperatorClass,
    apply,
    channels_equal,
    choi,
    choi_distance,
    classify_channel,
    classify_operator,
    column_counts,
    creates_coherence,
    io_kraus_bound,
    is_trace_preserving,
    kraus_rank,
    load_channel,
    loads_channel,
    dumps_channel,
    permutation_lower_bound_channel,
    save_channel,
    sio_kraus_bound,
)
from .conversion import (
    InfeasibleConversion,
    Regime,
    boundary_channel,
    boundary_point,
    construct_channel,
    feasible,
    region_csv,
)
from .estimators import ConversionRegion, GibbsConversionRegion, KrausReducer
from .gibbs import (
    InfiniteGapLimit,
    InfiniteTemperatureLimit,
    gibbs_boundary_channel,
    gibbs_feasible,
    gibbs_params,
    gibbs_region,
    gibbs_region_csv,
    s_perp_max,
    sz_range,
)
from .oracle import SamplerConfig, brute_force_feasible, region_cloud
from .reduction import mix_kraus, reduce_by_shape, reduce_qubit_io, reduce_qubit_sio

__version__ = "0.1.0"
