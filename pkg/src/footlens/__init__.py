"""footlens: conformal ribbon lenses for building footprints.

The pipeline decomposes a footprint polygon into near-parallelogram
subregions along its raster skeleton, solves a Schwarz-Christoffel disk map
per subregion, extracts equidistant level-set ribbons and facade sector
curves through the maps, stitches them into one footprint-wide layout, binds
time-varying facade attributes to the ribbon cells, and renders the result
as SVG plus a JSON document for the interactive viewer.
"""

from ._kernels import BACKEND as kernel_backend
from .errors import (
    BindingError,
    ConvergenceError,
    CrowdingError,
    FootlensError,
    InputError,
    LayoutError,
    NonConvergenceError,
    PartitionError,
    SolverError,
    StitchError,
    TopologyError,
)
from .geometry import (
    DistanceField,
    FootprintPolygon,
    RasterGrid,
    area,
    distance_field,
    rasterize,
)
from .skeleton import SkeletonImage, TopoSignature, extract_signature, skeletonize
from .partition import Cutline, PartitionGraph, compute_cutlines, partition
from .scmap import DiskMap, map_forward, map_inverse, solve_parameters
from .ribbons import (
    Contour,
    RibbonLayout,
    SectorCurve,
    assemble_layout,
    level_set,
    sector_curves,
    stitch,
)
from .encoding import (
    EncodedLens,
    TemporalSeries,
    bind_series,
    export_layout,
    filter_values,
    lens_from_json,
    render_svg,
    reorder,
)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "FootlensError", "InputError", "BindingError", "SolverError",
    "ConvergenceError", "CrowdingError", "NonConvergenceError",
    "LayoutError", "TopologyError", "PartitionError", "StitchError",
    "FootprintPolygon", "RasterGrid", "DistanceField",
    "area", "rasterize", "distance_field",
    "SkeletonImage", "TopoSignature", "skeletonize", "extract_signature",
    "Cutline", "PartitionGraph", "compute_cutlines", "partition",
    "DiskMap", "solve_parameters", "map_forward", "map_inverse",
    "Contour", "SectorCurve", "RibbonLayout",
    "level_set", "sector_curves", "stitch", "assemble_layout",
    "TemporalSeries", "EncodedLens", "bind_series", "reorder",
    "filter_values", "render_svg", "export_layout", "lens_from_json",
    "__version__",
]
