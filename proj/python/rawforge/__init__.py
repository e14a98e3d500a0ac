"""RAW degradation synthesis, fixed-ISP rendering and metrics.

Packed RAW arrays are float32 with shape (H, W, 4) in R, G1, G2, B order.
"""

from ._core import (
    Error,
    FormatError,
    InvalidArgument,
    IoError,
    SensorMeta,
    add_noise,
    convolve,
    degrade,
    disk_kernel,
    downsample,
    estimate_noise,
    evaluate_pair,
    exposure,
    extract_patches,
    gaussian_kernel,
    load_mosaic,
    load_psf,
    motion_kernel,
    normalize,
    pack,
    psnr,
    read_praw,
    record_digest,
    render,
    replay,
    save_mosaic,
    ssim,
    ssim_rgb8,
    unpack,
    upsample_bicubic,
    write_praw,
)

__version__ = "0.1.0"
