"""Mask expansion for object removal: distance fields, inpainting and metrics."""

from ._core import (
    MaskoptError,
    canny,
    dilate,
    erode,
    euclidean_distance_to,
    expand_segment,
    inpaint,
    mask_expansion_loss,
    optimize_soft_mask,
    procedural_scene,
    psnr,
    random_irregular_mask,
    rescale_mask,
    signed_distance,
    ssim,
)

__all__ = [
    "MaskoptError",
    "canny",
    "dilate",
    "erode",
    "euclidean_distance_to",
    "expand_segment",
    "inpaint",
    "mask_expansion_loss",
    "optimize_soft_mask",
    "procedural_scene",
    "psnr",
    "random_irregular_mask",
    "rescale_mask",
    "signed_distance",
    "ssim",
]
