"""Array layouts, wave vectors, and far-field array response vectors.

The base station is a uniform linear array along the x axis; the hybrid RIS
is a planar array in the x-z plane with broadside along +y.
"""

from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C0


@dataclass
class Radio:
    """Carrier frequency and wavelength (derived as c0/f when omitted)."""

    carrier_hz: float
    wavelength: float | None = None

    def __post_init__(self):
        if self.carrier_hz <= 0:
            raise ValueError("carrier frequency must be positive")
        if self.wavelength is None:
            self.wavelength = C0 / self.carrier_hz
        if abs(self.wavelength * self.carrier_hz - C0) > 1e-6 * C0:
            raise ValueError("wavelength inconsistent with carrier frequency")


@dataclass
class ArrayGeometry:
    """Element layout of one antenna array.

    ``element_offsets`` holds per-element positions relative to ``center``,
    shape (n, 3); the mean offset must be the zero vector.
    """

    center: np.ndarray
    element_offsets: np.ndarray
    kind: str  # "ULA" or "planar"
    nx: int = 1
    nz: int = 1
    spacing: float = 0.0

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.element_offsets = np.asarray(self.element_offsets, dtype=float)
        if self.center.shape != (3,) or self.element_offsets.ndim != 2 \
                or self.element_offsets.shape[1] != 3:
            raise ValueError("center must be a 3-vector and offsets (n, 3)")
        if self.kind not in ("ULA", "planar"):
            raise ValueError(f"unknown array kind {self.kind!r}")
        if np.abs(self.element_offsets.mean(axis=0)).max() > 1e-12:
            raise ValueError("element offsets must be symmetric about the center")
        if self.kind == "planar" and self.n_elements != self.nx * self.nz:
            raise ValueError("planar array requires nx*nz elements")

    @property
    def n_elements(self) -> int:
        return self.element_offsets.shape[0]

    @property
    def element_positions(self) -> np.ndarray:
        return self.center + self.element_offsets


def ula(center, n_elements: int, spacing: float) -> ArrayGeometry:
    """Uniform linear array of ``n_elements`` along x, centered on ``center``."""
    if n_elements < 1:
        raise ValueError("need at least one element")
    idx = np.arange(n_elements) - (n_elements - 1) / 2.0
    offsets = np.zeros((n_elements, 3))
    offsets[:, 0] = idx * spacing
    return ArrayGeometry(center, offsets, "ULA", nx=n_elements, nz=1, spacing=spacing)


def planar(center, nx: int, nz: int, spacing: float) -> ArrayGeometry:
    """Planar nx-by-nz array in the x-z plane, row-major with x fastest."""
    if nx < 1 or nz < 1:
        raise ValueError("need at least one element per axis")
    ix = np.arange(nx) - (nx - 1) / 2.0
    iz = np.arange(nz) - (nz - 1) / 2.0
    xx, zz = np.meshgrid(ix, iz)  # raveling gives x varying fastest
    offsets = np.zeros((nx * nz, 3))
    offsets[:, 0] = xx.ravel() * spacing
    offsets[:, 2] = zz.ravel() * spacing
    return ArrayGeometry(center, offsets, "planar", nx=nx, nz=nz, spacing=spacing)


def wave_vector(p, q, wavelength: float) -> np.ndarray:
    """Wave vector (rad/m) at ``q`` for a plane wave arriving from ``p``.

    Points from ``q`` toward the source: (2*pi/wavelength) * (p-q)/||q-p||.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    diff = p - q
    dist = np.linalg.norm(diff)
    if dist < 1e-15:
        raise ValueError("degenerate link: endpoints coincide")
    return (2.0 * np.pi / wavelength) * diff / dist


def array_response(arr: ArrayGeometry, p, radio: Radio) -> np.ndarray:
    """Unit-modulus response of ``arr`` toward location ``p``.

    Entry n is exp(j * <k, offset_n>) with k the wave vector from ``p``
    toward the array center. ``p`` is assumed outside the array aperture.
    """
    k = wave_vector(p, arr.center, radio.wavelength)
    return np.exp(1j * (arr.element_offsets @ k))
