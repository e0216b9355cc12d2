"""Lemniscate fingerprints: conformal welding for polynomial lemniscates."""
import os as _os

# LEMNIPRINT_THREADS caps BLAS/OpenMP threads; must be set before numpy loads
_threads = _os.environ.get("LEMNIPRINT_THREADS")
if _threads and _threads.isdigit():
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .approx import (  # noqa: E402
    AtomicMeasure,
    TrigPolynomial,
    approximate_diffeo,
    atoms_from_density,
    fit_positive_trig,
)
from .blaschke import (  # noqa: E402
    BlaschkeProduct,
    CircleDiffeo,
    MobiusAut,
    blaschke_critical_points,
    blaschke_critical_values,
    canonical_forms,
    eval_boundary,
    mobius_compose,
    nth_root_diffeo,
)
from .conformal import (  # noqa: E402
    InteriorMap,
    JordanCurveSamples,
    exterior_angle,
    interior_riemann,
    invert_interior,
    trace_lemniscate,
)
from .errors import *  # noqa: E402,F401,F403
from .fingerprint import (  # noqa: E402
    c1_distance,
    hausdorff_distance,
    lemniscate_fingerprint,
    normalize_triple,
)
from .polynomial import (  # noqa: E402
    AffineMap,
    ComplexPolynomial,
    CriticalData,
    ProperLemniscate,
    affine_image,
    affine_pullback,
    component_count_oracle,
    critical_data,
    is_proper,
    lambda_project,
    normalize_EL,
    psi_from_critical_points,
    rotate_EL,
)
from .weld import count_classes, reconstruct, recover_affine, solve_psi  # noqa: E402

__version__ = "0.1.0"
