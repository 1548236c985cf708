"""Min-max embedded geodesics on asymptotically conical surfaces.

The heavy lifting lives in the compiled extension ``acgeo._core``; this
package re-exports its public surface.
"""

from ._core import (
    Geodesic,
    MinMax,
    SurfaceMetric,
    cone_distance,
    energy,
    gauss_bonnet_disk,
    geodesic,
    length,
    mass_formula,
    mass_measured,
    minmax,
)

__all__ = [
    "Geodesic",
    "MinMax",
    "SurfaceMetric",
    "cone_distance",
    "energy",
    "gauss_bonnet_disk",
    "geodesic",
    "length",
    "mass_formula",
    "mass_measured",
    "minmax",
]

__version__ = "0.1.0"
