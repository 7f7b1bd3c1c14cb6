"""Python bindings for the voxband reconstruction toolkit."""

from voxband._core import (
    load_mesh,
    make_humanoid,
    make_icosphere,
    mesh_roundtrip,
    p2s_chamfer,
    psnr,
    quantization_error,
    save_mesh,
    ssim,
)

__all__ = [
    "load_mesh",
    "make_humanoid",
    "make_icosphere",
    "mesh_roundtrip",
    "p2s_chamfer",
    "psnr",
    "quantization_error",
    "save_mesh",
    "ssim",
]
