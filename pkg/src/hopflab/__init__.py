"""Numerical lab for Hopf hypersurfaces in CP^n and CH^n.

Space-form models, finite-difference shape operators, tubes and their
predicted spectra, focal radii, and projective duality of algebraic
hypersurfaces.
"""

__version__ = "0.1.0"

from .space_forms import (  # noqa: E402
    CH,
    CP,
    ModelPoint,
    SpaceForm,
    TangentVector,
    distance,
    geodesic_F,
    metric_g,
)
from .hypersurface import (  # noqa: E402
    HypersurfacePatch,
    ShapeSpectrum,
    hopf_report,
    lemma4_residuals,
    miquel_check,
    shape_operator,
    spectrum,
    structure_tensors,
)
from .polynomial import AlgebraicHypersurface, load_polynomial, parse_polynomial  # noqa: E402
from .tubes import (  # noqa: E402
    BaseSubmanifold,
    TubeSpec,
    focal_radii,
    jacobian_rank,
    predicted_spectrum,
    rank_sweep,
    singular_blowup_probe,
    tube_chart_algebraic,
)
from .duality import (  # noqa: E402
    biduality_spot_check,
    gauss_point,
    singular_locus_probe,
    tube_duality_check,
)
