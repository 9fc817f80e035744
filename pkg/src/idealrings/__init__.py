"""Monte Carlo sampling of ideal rings with shape statistics and knot analysis."""

from idealrings.experiments import (
    ConvergenceReport,
    EnsembleComparison,
    build_id,
    run_convergence,
    run_trefoil_study,
)
from idealrings.geometry import (
    OpenChain,
    Ring,
    Subsegment,
    center_of_mass,
    closure_defect,
    end_to_end_sq,
    mean_subsegment_rg_sq,
    radius_of_gyration_sq,
    squared_end_to_end,
    subsegment_rg_sq,
    vertices,
)
from idealrings.io import (
    MalformedInputError,
    read_polygons,
    read_polygons_json,
    read_polygons_text,
    write_polygons_json,
    write_polygons_text,
)
from idealrings.knots import (
    ClosureSpectrum,
    DegenerateProjectionError,
    Diagram,
    KnotClass,
    KnotLengthResult,
    alexander_determinant,
    classify_ring,
    closure_spectrum,
    is_trefoil_segment,
    knot_length,
    project,
)
from idealrings.sampler import (
    MixPolicy,
    RngStream,
    chain_for_index,
    crankshaft,
    hedgehog_start,
    mix,
    ring_for_index,
    sample_open_chain,
    sample_ring,
    sample_unit_sphere,
)
from idealrings.stats import (
    ProfileAccumulator,
    ShapeProfile,
    StreamingMoments,
    analytic_com_sq,
    analytic_e2e,
    analytic_edge_product,
    analytic_open_e2e,
    analytic_open_rg,
    analytic_rg,
    analytic_subseg_com_sq,
    analytic_subseg_rg,
    e2e_divergence_k,
    effective_length_from_max_e2e,
    effective_length_from_rg,
    estimate_edge_product,
    estimate_profile,
    read_profile_csv,
    rg_divergence_k,
    write_profile_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ClosureSpectrum",
    "ConvergenceReport",
    "DegenerateProjectionError",
    "Diagram",
    "EnsembleComparison",
    "KnotClass",
    "KnotLengthResult",
    "MalformedInputError",
    "MixPolicy",
    "OpenChain",
    "ProfileAccumulator",
    "Ring",
    "RngStream",
    "ShapeProfile",
    "StreamingMoments",
    "Subsegment",
    "alexander_determinant",
    "analytic_com_sq",
    "analytic_e2e",
    "analytic_edge_product",
    "analytic_open_e2e",
    "analytic_open_rg",
    "analytic_rg",
    "analytic_subseg_com_sq",
    "analytic_subseg_rg",
    "build_id",
    "center_of_mass",
    "chain_for_index",
    "classify_ring",
    "closure_defect",
    "closure_spectrum",
    "crankshaft",
    "e2e_divergence_k",
    "effective_length_from_max_e2e",
    "effective_length_from_rg",
    "end_to_end_sq",
    "estimate_edge_product",
    "estimate_profile",
    "hedgehog_start",
    "is_trefoil_segment",
    "knot_length",
    "mean_subsegment_rg_sq",
    "mix",
    "project",
    "radius_of_gyration_sq",
    "read_polygons",
    "read_polygons_json",
    "read_polygons_text",
    "read_profile_csv",
    "rg_divergence_k",
    "ring_for_index",
    "run_convergence",
    "run_trefoil_study",
    "sample_open_chain",
    "sample_ring",
    "sample_unit_sphere",
    "squared_end_to_end",
    "subsegment_rg_sq",
    "vertices",
    "write_polygons_json",
    "write_polygons_text",
    "write_profile_csv",
    "__version__",
]
