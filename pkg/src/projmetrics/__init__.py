"""Projection-averaged metrics on convex bodies.

Bodies are vertex lists; subspaces carry orthonormal bases; every random
draw is addressed by (seed, stream, counter) so results are independent of
worker count.
"""

from .bodies import (
    Interval,
    VPolytope,
    bounding_radius,
    distance_to_hull,
    hull_2d,
    line_fiber,
    load_body,
    membership,
    polygon_area,
    polygon_clip,
    save_body,
    support,
)
from .constructions import (
    NeedleSpec,
    ScheduleRow,
    augment,
    block_bounds,
    cross_section,
    needle_exact_volume,
    prism_needle,
    spindle_needle,
    thm1_sequence,
    thm2_sequence,
    thm3_sequence,
)
from .grassmann import (
    GoodnessCertificate,
    Subspace,
    axis_split,
    axis_subspace,
    full_space,
    goodness,
    haar_sample,
    project_body,
    project_point,
)
from .metrics import (
    MetricEstimate,
    SamplingPlan,
    delta_j,
    fiber_profile,
    hausdorff,
    intrinsic_volume,
    projected_volume,
    symdiff_volume,
)
from .numerics import (
    RngStream,
    ball_volume,
    flag_coefficient,
    gram_jacobian,
    gram_schmidt,
    needle_bound_constant,
    rng_gaussian,
    rng_uniform,
    singular_min,
)

__version__ = "0.1.0"
