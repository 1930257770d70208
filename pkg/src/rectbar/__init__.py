"""Rectangle barcodes of interlevel persistence for filtered GF(2) complexes."""

from ._backend import BACKEND
from .barcode import (
    Bar,
    Rectangle,
    RectangleBarcode,
    VerificationError,
    rectangle_barcode,
    rectangle_multiplicity_oracle,
    sublevel_barcode,
    verify_decomposition,
)
from .complex import (
    FilteredComplex,
    Generator,
    Window,
    fixture_h_sphere,
    fixture_heart_circle,
    fixture_torus,
    parse,
    perturb,
    random_complex,
    scale,
    serialize,
    shift,
    validate,
)
from .distance import (
    are_delta_interleaved,
    bottleneck_distance,
    bottleneck_distance_1d,
    grid_interleaving_oracle,
    is_delta_trivial,
    stability_experiment,
)
from .interlevel import (
    check_middle_exactness,
    check_weak_exactness,
    comparison_rank,
    critical_values,
    interlevel_homology,
    rank_table,
    structure_map_rank,
)
from .invariants import (
    boundary_depth,
    invariant_report,
    non_cycle_depth,
    spectral_invariant_set,
    spectral_spread,
    spectral_spread_generator,
    spread_bruteforce,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Bar",
    "FilteredComplex",
    "Generator",
    "Rectangle",
    "RectangleBarcode",
    "VerificationError",
    "Window",
    "are_delta_interleaved",
    "bottleneck_distance",
    "bottleneck_distance_1d",
    "boundary_depth",
    "check_middle_exactness",
    "check_weak_exactness",
    "comparison_rank",
    "critical_values",
    "fixture_h_sphere",
    "fixture_heart_circle",
    "fixture_torus",
    "grid_interleaving_oracle",
    "interlevel_homology",
    "invariant_report",
    "is_delta_trivial",
    "non_cycle_depth",
    "parse",
    "perturb",
    "random_complex",
    "rank_table",
    "rectangle_barcode",
    "rectangle_multiplicity_oracle",
    "scale",
    "serialize",
    "shift",
    "spectral_invariant_set",
    "spectral_spread",
    "spectral_spread_generator",
    "spread_bruteforce",
    "stability_experiment",
    "structure_map_rank",
    "sublevel_barcode",
    "validate",
    "verify_decomposition",
]
