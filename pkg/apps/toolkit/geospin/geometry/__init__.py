"""Metrics, connection, geospin matrix, curvature and Ricci flow."""

from geospin.geometry.connection import (
    ChristoffelAtPoint,
    christoffel_at,
    christoffel_trace,
    connection_one_form_coeffs,
    log_volume_gradient,
    metric_compatibility_residual,
)
from geospin.geometry.curvature import (
    CurvatureBundle,
    curvature_at,
    identity_chain_residual,
    is_einstein,
    metric_rate_along,
    w_r_from_metric_rate,
)
from geospin.geometry.geospin import (
    GeospinMatrix,
    LoweredGeospin,
    covariant_derivative,
    covariant_derivative_lowered,
    geodesic_quadratic_term,
    geospin_lowered,
    geospin_matrix,
    split_diag_offdiag,
)
from geospin.geometry.manifest import dump_manifest, field_from_manifest, load_manifest
from geospin.geometry.manifold import (
    ChartPoint,
    IndexPosition,
    MetricAtPoint,
    MetricField,
    TangentVector,
    inner_product,
    lower_index,
    metric_at,
    norm,
    raise_index,
    sample_point,
)
from geospin.geometry.ricci_flow import RicciFlowTrajectory, corollary_check, ricci_flow_integrate
from geospin.geometry.zoo import builtin_manifold, list_manifolds

__all__ = [
    "ChartPoint",
    "ChristoffelAtPoint",
    "CurvatureBundle",
    "GeospinMatrix",
    "IndexPosition",
    "LoweredGeospin",
    "MetricAtPoint",
    "MetricField",
    "RicciFlowTrajectory",
    "TangentVector",
    "builtin_manifold",
    "christoffel_at",
    "christoffel_trace",
    "connection_one_form_coeffs",
    "corollary_check",
    "covariant_derivative",
    "covariant_derivative_lowered",
    "curvature_at",
    "dump_manifest",
    "field_from_manifest",
    "geodesic_quadratic_term",
    "geospin_lowered",
    "geospin_matrix",
    "identity_chain_residual",
    "inner_product",
    "is_einstein",
    "list_manifolds",
    "load_manifest",
    "log_volume_gradient",
    "lower_index",
    "metric_at",
    "metric_compatibility_residual",
    "metric_rate_along",
    "norm",
    "raise_index",
    "ricci_flow_integrate",
    "sample_point",
    "split_diag_offdiag",
    "w_r_from_metric_rate",
]
