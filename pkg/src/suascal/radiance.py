"""Raw digital counts to spectral radiance.

The camera model applied here, pixel by pixel in double precision:

``L(x, y) = V(x, y) * R(y) * (I(x, y) - dL) * a1 / (g * t * 2**N)``

where ``V`` is a radial polynomial vignette correction, ``R`` a row-wise
readout correction for the rolling CMOS shutter, ``dL`` the dark level,
``a1`` the absolute calibration coefficient, ``g`` the gain, ``t`` the
exposure in microseconds and ``N`` the pixel bit depth.

Pixel coordinates are zero-based with ``x`` the column and ``y`` the row.
Negative post-dark-subtraction radiances are clamped to zero and counted in
the result metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MetadataError

_VALID_GAINS = (1, 2, 4, 8)


@dataclass(frozen=True)
class VignetteModel:
    """Radial vignette polynomial.

    The correction at pixel ``(x, y)`` is ``V = 1 / k(r)`` with

    ``k(r) = 1 + k0*r + k1*r**2 + ... + k5*r**6``,
    ``r = sqrt((x - center_x)**2 + (y - center_y)**2)``

    in raw pixel units.  ``k`` must stay positive over the image extent.
    """

    center_x: float
    center_y: float
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.float64)
        if coeffs.shape != (6,):
            raise MetadataError(
                f"vignette model needs exactly 6 coefficients, got "
                f"{coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise MetadataError("vignette coefficients must be finite")
        if not (np.isfinite(self.center_x) and np.isfinite(self.center_y)):
            raise MetadataError("vignette center must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    def polynomial(self, radius) -> np.ndarray:
        """Evaluate ``k(r)`` for a radius or array of radii."""
        r = np.asarray(radius, dtype=np.float64)
        k = np.zeros_like(r)
        for c in self.coefficients[::-1]:
            k = (k + c) * r
        return 1.0 + k


@dataclass(frozen=True)
class RadiometricMetadata:
    """Per-band calibration metadata.

    ``exposure_us`` is in microseconds; values below 1 are rejected because
    they almost certainly mean someone handed us seconds.
    """

    a1: float
    a2: float
    a3: float
    gain: int
    exposure_us: float
    dark_level: float
    vignette: VignetteModel
    bits_per_pixel: int = 16
    band_index: int | None = None

    def __post_init__(self):
        if self.gain not in _VALID_GAINS:
            raise MetadataError(
                f"gain must be one of {_VALID_GAINS}, got {self.gain}")
        if not self.exposure_us >= 1.0:
            raise MetadataError(
                f"exposure_us={self.exposure_us!r}: exposures are microseconds "
                "and must be >= 1 (seconds are not silently accepted)")
        if not np.isfinite(self.a1) or self.a1 <= 0:
            raise MetadataError(f"a1 must be a positive real, got {self.a1!r}")
        if not (np.isfinite(self.a2) and np.isfinite(self.a3)):
            raise MetadataError("a2/a3 must be finite")
        if not np.isfinite(self.dark_level) or self.dark_level < 0:
            raise MetadataError(
                f"dark level must be non-negative, got {self.dark_level!r}")
        if not 1 <= int(self.bits_per_pixel) <= 32:
            raise MetadataError(
                f"bits_per_pixel out of range: {self.bits_per_pixel!r}")
        if self.band_index is not None and not 1 <= self.band_index <= 5:
            raise MetadataError(f"band_index out of range: {self.band_index!r}")


@dataclass(frozen=True)
class RawImage:
    """A single-band raw frame of unsigned integer counts."""

    width: int
    height: int
    band_index: int
    pixels: np.ndarray
    bits_per_pixel: int = 16

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if not np.issubdtype(px.dtype, np.integer):
            raise MetadataError("raw pixels must be an integer array")
        if px.shape != (self.height, self.width):
            raise MetadataError(
                f"pixel array shape {px.shape} does not match declared "
                f"{self.height}x{self.width}")
        if px.size == 0:
            raise MetadataError("raw image is empty")
        if not 1 <= self.band_index <= 5:
            raise MetadataError(f"band_index out of range: {self.band_index}")
        if px.min() < 0:
            raise MetadataError("raw counts cannot be negative")
        if int(px.max()) >= 2 ** self.bits_per_pixel:
            raise MetadataError(
                f"raw count {int(px.max())} exceeds {self.bits_per_pixel}-bit "
                "range")
        object.__setattr__(self, "pixels", px)


@dataclass(frozen=True)
class RadianceImage:
    """A single-band spectral radiance plane in W/m^2/sr/nm."""

    width: int
    height: int
    band_index: int
    pixels: np.ndarray
    clamped_pixel_count: int = 0

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.shape != (self.height, self.width):
            raise MetadataError(
                f"pixel array shape {px.shape} does not match declared "
                f"{self.height}x{self.width}")
        if not 1 <= self.band_index <= 5:
            raise MetadataError(f"band_index out of range: {self.band_index}")
        if not np.all(np.isfinite(px)):
            raise MetadataError("radiance contains non-finite pixels")
        if px.min() < 0:
            raise MetadataError("radiance pixels must be non-negative")
        object.__setattr__(self, "pixels", px)


def vignette_factor(model: VignetteModel, x: float, y: float) -> float:
    """Vignette correction ``V = 1/k(r)`` at one pixel.

    Raises
    ------
    MetadataError
        If the polynomial is non-positive at the pixel.
    """
    r = float(np.hypot(x - model.center_x, y - model.center_y))
    k = float(model.polynomial(r))
    if not k > 0:
        raise MetadataError(
            f"vignette polynomial k={k:.6g} is not positive at pixel "
            f"({x}, {y})")
    return 1.0 / k


def row_correction(meta: RadiometricMetadata, y: int) -> float:
    """Rolling-shutter row factor ``R = 1 / (1 + a2*y/t + a3*y)``."""
    denom = 1.0 + meta.a2 * y / meta.exposure_us + meta.a3 * y
    if not denom > 0:
        raise MetadataError(
            f"row correction denominator {denom:.6g} is not positive at "
            f"row {y}")
    return 1.0 / denom


def _vignette_map(model: VignetteModel, width: int, height: int) -> np.ndarray:
    """Vectorized ``V`` over a full frame; validates ``k > 0`` everywhere."""
    x = np.arange(width, dtype=np.float64) - model.center_x
    y = np.arange(height, dtype=np.float64) - model.center_y
    r = np.hypot(x[np.newaxis, :], y[:, np.newaxis])
    k = model.polynomial(r)
    if np.any(k <= 0):
        iy, ix = np.unravel_index(int(np.argmin(k)), k.shape)
        raise MetadataError(
            f"vignette polynomial k={k[iy, ix]:.6g} is not positive at pixel "
            f"({ix}, {iy})")
    return 1.0 / k


def _row_factors(meta: RadiometricMetadata, height: int) -> np.ndarray:
    y = np.arange(height, dtype=np.float64)
    denom = 1.0 + meta.a2 * y / meta.exposure_us + meta.a3 * y
    if np.any(denom <= 0):
        bad = int(np.argmin(denom))
        raise MetadataError(
            f"row correction denominator {denom[bad]:.6g} is not positive at "
            f"row {bad}")
    return 1.0 / denom


def dc_to_radiance(raw: RawImage, meta: RadiometricMetadata) -> RadianceImage:
    """Convert a raw frame to spectral radiance.

    Negative values after dark-level subtraction are clamped to zero; the
    number of clamped pixels is reported on the result.

    Raises
    ------
    MetadataError
        On band mismatch, or if the vignette/row models are non-positive
        anywhere over the image extent.
    """
    if meta.band_index is not None and meta.band_index != raw.band_index:
        raise MetadataError(
            f"metadata band {meta.band_index} does not match image band "
            f"{raw.band_index}")
    if meta.bits_per_pixel != raw.bits_per_pixel:
        raise MetadataError(
            f"metadata bit depth {meta.bits_per_pixel} does not match image "
            f"bit depth {raw.bits_per_pixel}")
    v = _vignette_map(meta.vignette, raw.width, raw.height)
    r = _row_factors(meta, raw.height)
    scale = meta.a1 / (meta.gain * meta.exposure_us * 2.0 ** meta.bits_per_pixel)
    radiance = v * r[:, np.newaxis] * (
        raw.pixels.astype(np.float64) - meta.dark_level) * scale
    clamped = int(np.count_nonzero(radiance < 0))
    if clamped:
        np.maximum(radiance, 0.0, out=radiance)
    return RadianceImage(width=raw.width, height=raw.height,
                         band_index=raw.band_index, pixels=radiance,
                         clamped_pixel_count=clamped)


def radiance_to_counts(img: RadianceImage,
                       meta: RadiometricMetadata) -> np.ndarray:
    """Analytic inverse of :func:`dc_to_radiance` (un-rounded counts).

    Clamped pixels cannot be recovered; everything else inverts exactly up
    to floating-point rounding.  Useful for synthesizing raw test frames.
    """
    v = _vignette_map(meta.vignette, img.width, img.height)
    r = _row_factors(meta, img.height)
    scale = meta.a1 / (meta.gain * meta.exposure_us * 2.0 ** meta.bits_per_pixel)
    return img.pixels / (v * r[:, np.newaxis] * scale) + meta.dark_level
