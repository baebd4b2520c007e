"""Speckle-aware 2x super-resolution.

Images are 2-D float arrays with values nominally in [0, 1]. Functions that
take ``**settings`` accept the same keys as the config file (``patch_radius``,
``search_radius``, ``kernel``, ``h1``, ...); see ``config_keys()``.
"""

from ._core import (
    SarsrError,
    add_speckle,
    bicubic_upscale_2x,
    combined_sr,
    config_keys,
    denoise,
    despeckle,
    downsample_2x,
    enl,
    from_log_domain,
    load_image,
    psnr,
    run_experiment,
    save_image,
    sr_despeckle_upscale,
    sr_upscale_2x,
    to_log_domain,
)

__all__ = [
    "SarsrError",
    "add_speckle",
    "bicubic_upscale_2x",
    "combined_sr",
    "config_keys",
    "denoise",
    "despeckle",
    "downsample_2x",
    "enl",
    "from_log_domain",
    "load_image",
    "psnr",
    "run_experiment",
    "save_image",
    "sr_despeckle_upscale",
    "sr_upscale_2x",
    "to_log_domain",
]
