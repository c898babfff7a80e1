"""Band spectra of rational-flux Floquet operator families.

The package builds the kicked-rotor / Harper family of q-by-q matrix
functions over the circle, computes their band spectra, tracks
eigenvalue paths around one period to extract the induced monodromy
permutation, and supplies the polynomial toolbox that underpins those
computations: resultants and discriminants, Euclidean GCD with Bezout
cofactors, Newton polygons, Puiseux branch expansions, and cluster
factorization by contour integrals.
"""

from .series import (
    INFINITE_ORD,
    TruncatedSeries,
    series_from_function,
)
from .poly import (
    ComplexPoly,
    SeriesPoly,
    discriminant,
    euclid_gcd_bezout,
    is_simple,
    poly_derivative,
    poly_roots,
    series_poly_discriminant,
    sylvester_matrix,
    sylvester_resultant,
)
from .newton import (
    HenselFactorization,
    NewtonPolygonData,
    PuiseuxBranch,
    conjugacy_check,
    hensel_split,
    newton_polygon,
    puiseux_branches,
    quadratic_cr_classify,
)
from .floquet import (
    CharPolySamples,
    MatrixSample,
    OperatorFamily,
    char_poly_coeffs,
    char_poly_samples,
    gauss_circulant,
    harper_matrix,
    kh_matrix,
    kick_diagonal,
    ordkr_matrix,
    reduced_poly_samples,
    skr_matrix,
    uh_matrix,
)
from .spectra import (
    SpectrumBands,
    band_count,
    band_measure,
    butterfly_sweep,
    eigen_phases,
    farey_fractions,
    hausdorff_distance,
    spectrum_union,
)
from .monodromy import (
    AmbiguousCrossing,
    MonodromyResult,
    TrackedPaths,
    discriminant_profile,
    fourier_closure_residual,
    monodromy_permutation,
    track_roots,
)

__version__ = "0.1.0"
