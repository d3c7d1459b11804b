"""8-bit PNG import/export, for metric inputs and visual inspection.

PNGs are lossy relative to the float tensors (values are quantized to
8 bits and mapped to [0, 1] by /255); everything that must stay bit-exact
travels as ``.volt`` instead.
"""

from __future__ import annotations

import numpy as np
from PIL import Image as PILImage

from .tensor import Image

__all__ = ["read_png", "write_png"]


def read_png(path) -> Image:
    """Load an 8-bit PNG as an RGB image with values in [0, 1]."""
    with PILImage.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.float32)
    return Image(arr / 255.0)


def write_png(path, image: Image) -> None:
    """Write a 1- or 3-channel [0, 1] image as an 8-bit PNG."""
    if image.channels not in (1, 3):
        raise ValueError(f"PNG export needs 1 or 3 channels, got {image.channels}")
    quantized = np.rint(np.clip(image.data, 0.0, 1.0) * 255.0).astype(np.uint8)
    if image.channels == 1:
        PILImage.fromarray(quantized[:, :, 0], mode="L").save(path, format="PNG")
    else:
        PILImage.fromarray(quantized, mode="RGB").save(path, format="PNG")
