"""Moving-mesh diffeomorphic image registration."""

from ._core import (
    build_deformation,
    dice,
    hausdorff_mm,
    identity_transform,
    jacobian_determinant,
    register_pair,
    reliability,
    synth_pair,
    warp_image,
    warp_mask,
)

__version__ = "0.1.0"

__all__ = [
    "build_deformation",
    "dice",
    "hausdorff_mm",
    "identity_transform",
    "jacobian_determinant",
    "register_pair",
    "reliability",
    "synth_pair",
    "warp_image",
    "warp_mask",
    "__version__",
]
