"""HRIS state and self-configuration: phase vectors, quantization, the probing
codebook, power sensing, peak combining, and closed-form reflection synthesis.

Conventions. A configuration is the complex vector ``phases`` (length N). For
an absorption config ``phi`` the combined detector signal is ``phi^H x`` with
``x`` the incident vector at the elements, so the config that maximizes the
sensed power of a source with response ``a`` is ``exp(j*angle(a))``. For a
reflection config ``theta`` the reflected end-to-end term is ``theta^H h_hat``
with ``h_hat = conj(h_sum) * a_r(bs)``, maximized by ``exp(j*angle(h_hat))``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet
from .geometry import ArrayGeometry, Radio, array_response

REFLECTION = "reflection"
ABSORPTION = "absorption"

# far-field range used to turn a steering direction into a source point
_FAR_FIELD_M = 1e3


@dataclass
class HrisConfig:
    """One phase configuration of the surface (reflection or absorption branch)."""

    phases: np.ndarray
    branch: str = REFLECTION
    quantized: int | None = None  # bit depth when snapped to the phase grid

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=complex)
        if self.branch not in (REFLECTION, ABSORPTION):
            raise ValueError(f"unknown branch {self.branch!r}")
        if np.any(np.abs(self.phases) > 1.0 + 1e-9):
            raise ValueError("per-element modulus must not exceed 1")

    @property
    def n_elements(self) -> int:
        return self.phases.shape[0]


def idle_config(n_elements: int, branch: str = REFLECTION) -> HrisConfig:
    """All-zero-phase configuration (every phase shifter off)."""
    return HrisConfig(np.ones(n_elements, dtype=complex), branch, quantized=None)


def phase_grid(q_bits: int) -> np.ndarray:
    """The 2^Q admissible phase angles {2*pi*m / 2^Q}."""
    if q_bits < 1:
        raise ValueError("q_bits must be >= 1")
    n_levels = 2 ** q_bits
    return 2.0 * np.pi * np.arange(n_levels) / n_levels


def quantize(config: HrisConfig, q_bits: int) -> HrisConfig:
    """Snap each phase to the nearest grid angle (ties to the smaller angle)
    and force unit modulus."""
    if q_bits < 1:
        raise ValueError("q_bits must be >= 1")
    n_levels = 2 ** q_bits
    step = 2.0 * np.pi / n_levels
    x = (np.angle(config.phases) % (2.0 * np.pi)) / step
    k = np.floor(x).astype(int)
    frac = x - k
    idx = np.where(frac > 0.5, k + 1, k)
    tie = frac == 0.5
    if np.any(tie):
        # midway between two grid angles: keep the smaller angle value,
        # which at the wrap-around is 0 rather than the last grid angle
        idx = np.where(tie, np.where(k + 1 == n_levels, 0, k), idx)
    idx = idx % n_levels
    return HrisConfig(np.exp(1j * idx * step), config.branch, quantized=q_bits)


def phase_indices(config: HrisConfig) -> np.ndarray:
    """Grid indices of a quantized configuration."""
    if config.quantized is None:
        raise ValueError("configuration is not quantized")
    n_levels = 2 ** config.quantized
    step = 2.0 * np.pi / n_levels
    angles = np.angle(config.phases) % (2.0 * np.pi)
    idx = np.round(angles / step).astype(int) % n_levels
    err = np.abs(np.angle(np.exp(1j * (angles - idx * step))))
    if err.max() > 1e-9:
        raise ValueError("phases do not lie on the declared quantization grid")
    return idx


@dataclass
class Codebook:
    """Probing codewords (quantized steering configs) over a direction grid."""

    codewords: list
    directions: list  # (azimuth, elevation) pairs, radians
    bit_depth: int

    def __post_init__(self):
        if len(self.codewords) != len(self.directions):
            raise ValueError("one direction per codeword required")

    def __len__(self) -> int:
        return len(self.codewords)


def direction_unit_vector(azimuth: float, elevation: float) -> np.ndarray:
    """Unit vector for a direction in front of the surface (broadside +y)."""
    return np.array([
        math.sin(azimuth) * math.cos(elevation),
        math.cos(azimuth) * math.cos(elevation),
        math.sin(elevation),
    ])


def steering_config(geom: ArrayGeometry, radio: Radio, azimuth: float,
                    elevation: float, q_bits: int | None = None) -> HrisConfig:
    """Absorption config steering the sensed beam toward (azimuth, elevation)."""
    p = geom.center + _FAR_FIELD_M * direction_unit_vector(azimuth, elevation)
    cfg = HrisConfig(array_response(geom, p, radio), ABSORPTION)
    return quantize(cfg, q_bits) if q_bits is not None else cfg


def _grid_shape(l_codewords: int) -> tuple:
    # widest az-major factorization with n_el <= sqrt(L/2)
    n_el = 1
    for d in range(1, int(math.isqrt(l_codewords)) + 1):
        if l_codewords % d == 0 and 2 * d * d <= l_codewords:
            n_el = d
    return l_codewords // n_el, n_el


def build_codebook(geom: ArrayGeometry, radio: Radio, l_codewords: int,
                   q_bits: int, n_az: int | None = None,
                   n_el: int | None = None) -> Codebook:
    """Quantized steering codebook over a uniform front-half-space grid.

    Azimuths are the ``n_az`` bin midpoints of (-pi/2, pi/2) and elevations
    the ``n_el`` midpoints of (-pi/4, pi/4). The grid defaults to the array's
    own nx-by-nz shape when that matches ``l_codewords``.
    """
    if l_codewords < 1:
        raise ValueError("need at least one codeword")
    if n_az is None or n_el is None:
        if geom.nx * geom.nz == l_codewords:
            n_az, n_el = geom.nx, geom.nz
        else:
            n_az, n_el = _grid_shape(l_codewords)
    if n_az * n_el != l_codewords:
        raise ValueError("codebook grid does not factor l_codewords")
    azimuths = -np.pi / 2 + (np.arange(n_az) + 0.5) * np.pi / n_az
    elevations = -np.pi / 4 + (np.arange(n_el) + 0.5) * (np.pi / 2) / n_el
    codewords, directions = [], []
    for el in elevations:
        for az in azimuths:
            codewords.append(steering_config(geom, radio, az, el, q_bits))
            directions.append((float(az), float(el)))
    return Codebook(codewords, directions, q_bits)


def sensed_power(config_abs: HrisConfig, incident: np.ndarray, eta: float,
                 noise_var: float) -> float:
    """Power at the detector/harvester: (1-eta)*|phi^H x|^2 + noise_var."""
    if config_abs.branch != ABSORPTION:
        raise ValueError("sensing requires an absorption-branch configuration")
    combined = np.vdot(config_abs.phases, np.asarray(incident, dtype=complex))
    return float((1.0 - eta) * np.abs(combined) ** 2 + noise_var)


@dataclass
class PowerProfile:
    """Per-codeword sensed powers of one sweep and the detected peak set."""

    powers: np.ndarray
    threshold: float
    peak_indices: np.ndarray = field(default=None)

    def __post_init__(self):
        self.powers = np.asarray(self.powers, dtype=float)
        if self.peak_indices is None:
            self.peak_indices = np.flatnonzero(self.powers > self.threshold)
        self.peak_indices = np.asarray(self.peak_indices, dtype=int)

    @property
    def detected(self) -> bool:
        """False flags a sweep with no source above the threshold."""
        return self.peak_indices.size > 0


def probe(codebook: Codebook, incident: np.ndarray, eta: float,
          noise_var: float, tau: float | None = None,
          weighting: str = "soft"):
    """Beam-sweep the codebook against ``incident`` and combine the peaks.

    Measures the sensed power for every codeword, thresholds at ``tau``
    (default: twice the sweep median), and returns the power profile plus the
    combined absorption configuration sum(delta_i * c_i) over the peak set,
    with delta_i = 1 (hard) or the measured power (soft). The combination is
    re-projected to unit modulus per element. An empty peak set yields the
    all-ones idle configuration, flagged via ``profile.detected``.
    """
    if weighting not in ("hard", "soft"):
        raise ValueError(f"unknown weighting {weighting!r}")
    powers = np.array([sensed_power(c, incident, eta, noise_var)
                       for c in codebook.codewords])
    if tau is None:
        tau = 2.0 * float(np.median(powers))
    elif tau < noise_var:
        raise ValueError("threshold below the noise floor")
    profile = PowerProfile(powers, float(tau))
    if not profile.detected:
        return profile, idle_config(codebook.codewords[0].n_elements, ABSORPTION)
    weights = np.ones(profile.peak_indices.size) if weighting == "hard" \
        else powers[profile.peak_indices]
    combined = np.zeros(codebook.codewords[0].n_elements, dtype=complex)
    for w, i in zip(weights, profile.peak_indices):
        combined += w * codebook.codewords[i].phases
    return profile, HrisConfig(np.exp(1j * np.angle(combined)), ABSORPTION)


def compose_reflection(phi_b: HrisConfig, phi_u: HrisConfig,
                       q_bits: int | None = None) -> HrisConfig:
    """Reflection config conj(phi_u) * phi_b (element-wise), then quantized."""
    if phi_b.n_elements != phi_u.n_elements:
        raise ValueError("configuration lengths differ")
    cfg = HrisConfig(np.conj(phi_u.phases) * phi_b.phases, REFLECTION)
    return quantize(cfg, q_bits) if q_bits is not None else cfg


def aggregate_ue_channel(channels: ChannelSet, mode: str) -> np.ndarray:
    """Aggregate HRIS-UE channel: direction-only ("equal") or gain-weighted."""
    if mode == "equal":
        norms = np.linalg.norm(channels.h, axis=1, keepdims=True)
        return (channels.h / norms).sum(axis=0)
    if mode == "weighted":
        return channels.h.sum(axis=0)
    raise ValueError(f"unknown aggregation mode {mode!r}")


def oracle_config(channels: ChannelSet, mode: str) -> HrisConfig:
    """Perfect-CSI reflection config exp(j*angle(conj(h_sum) * a_r(bs))).

    ``mode`` picks the UE aggregation: "equal" normalizes every UE channel to
    unit gain before summing, "weighted" sums the raw channels.
    """
    h_sum = aggregate_ue_channel(channels, mode)
    h_hat = np.conj(h_sum) * channels.a_r_bs
    return HrisConfig(np.exp(1j * np.angle(h_hat)), REFLECTION)


def incident_from_bs(channels: ChannelSet, p_watts: float) -> np.ndarray:
    """Element-level signal when the BS sends a pilot beamformed at the HRIS."""
    v = channels.G.conj().T @ channels.a_r_bs  # direction of the BS precoder
    w_r = np.sqrt(p_watts) * v / np.linalg.norm(v)
    return channels.G @ w_r


def incident_from_ues(channels: ChannelSet, p_watts: float) -> np.ndarray:
    """Element-level signal when all UEs send the pilot simultaneously."""
    return np.sqrt(p_watts) * channels.h.sum(axis=0)
