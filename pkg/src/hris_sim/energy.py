"""RF-to-DC harvesting, PIN-diode consumption, and per-frame energy accounting."""

from dataclasses import dataclass

import numpy as np

from .hris import HrisConfig, phase_indices


@dataclass
class HarvesterModel:
    """Saturating rectifier law f(x) = (a*x + b)/(x + c) - b/c.

    f(0) = 0 by construction; the output saturates below a - b/c. Requires
    a*c >= b so the law is non-decreasing.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.a * self.c < self.b:
            raise ValueError("harvest law must be non-decreasing (a*c >= b)")

    @property
    def saturation(self) -> float:
        return self.a - self.b / self.c


@dataclass
class ConsumptionModel:
    """Per-diode and controller power draw."""

    p_on: float  # Watts per active PIN diode
    q_bits: int  # diodes per meta-atom
    controller_run: float
    controller_idle: float

    def __post_init__(self):
        if min(self.p_on, self.controller_run, self.controller_idle) < 0:
            raise ValueError("powers must be >= 0")
        if self.q_bits < 1:
            raise ValueError("q_bits must be >= 1")


@dataclass
class FramePlan:
    """Slot layout of one reconfiguration period."""

    n_dl: int
    n_ul: int
    n_ce: int = 1
    period: float = 0.01  # seconds
    traffic: float = 0.5  # duty factor in [0, 1]

    def __post_init__(self):
        if self.n_ce < 1:
            raise ValueError("need at least one probing/CE slot")
        if not 0.0 <= self.traffic <= 1.0:
            raise ValueError("traffic must lie in [0, 1]")
        if self.period <= 0:
            raise ValueError("period must be positive")

    @property
    def n_slots(self) -> int:
        return self.n_ce + self.n_dl + self.n_ul

    @property
    def slot_duration(self) -> float:
        return self.period / self.n_slots


def harvest(model: HarvesterModel, p_in: float) -> float:
    """Harvested power for input RF power ``p_in`` (Watts)."""
    if p_in < 0:
        raise ValueError("input power must be >= 0")
    return (model.a * p_in + model.b) / (p_in + model.c) - model.b / model.c


def atom_consumption(m: int, model: ConsumptionModel) -> float:
    """Power drawn by one meta-atom holding phase-grid index ``m``.

    Index m maps to the PIN-diode activation pattern given by its binary
    representation; the draw is p_on per active diode, written as
    p_on * (m - sum_i floor(m / 2^i)).
    """
    if not 0 <= m < 2 ** model.q_bits:
        raise ValueError(f"index {m} outside [0, 2^{model.q_bits})")
    active = m - sum(m // 2 ** i for i in range(1, model.q_bits + 1))
    return model.p_on * active


def config_consumption(config: HrisConfig, model: ConsumptionModel) -> float:
    """Total diode power of a quantized configuration (controller excluded)."""
    if config.quantized is None:
        raise ValueError("consumption accounting needs a quantized configuration")
    if config.quantized != model.q_bits:
        raise ValueError("configuration bit depth does not match the model")
    return float(sum(atom_consumption(int(m), model) for m in phase_indices(config)))


def idle_harvest_fraction(nx: int, nz: int, spacing_ratio: float = 0.5) -> float:
    """Harvest efficiency fraction of the idle (all-off) beam.

    With beamwidths 1/(nx*delta) and 1/(nz*delta) on the two array axes, the
    idle beam covers the fraction Bx*By/pi^2 of uniformly distributed sources.
    """
    bx = 1.0 / (nx * spacing_ratio)
    bz = 1.0 / (nz * spacing_ratio)
    return bx * bz / np.pi ** 2


def frame_energy(plan: FramePlan, harvester: HarvesterModel,
                 consumption: ConsumptionModel, p_abs_bs: float,
                 p_abs_ue: float, reflection_cfg: HrisConfig | None,
                 absorption_cfg: HrisConfig | None, idle: bool = False,
                 nu: float = 1.0):
    """Energy harvested and consumed over one reconfiguration period.

    Harvest side: E_H = period * traffic * (n_dl * f(p_abs_bs)
    + n_ul * f(p_abs_ue)), scaled by ``nu`` in idle mode. Consumption side:
    controller draw plus the diode draw of both phase-shifter banks; in idle
    mode the shifters are off and only the idle controller power remains.
    """
    if not 0.0 < nu <= 1.0:
        raise ValueError("nu must lie in (0, 1]")
    harvested = plan.traffic * (plan.n_dl * harvest(harvester, p_abs_bs)
                                + plan.n_ul * harvest(harvester, p_abs_ue))
    if idle:
        e_h = plan.period * nu * harvested
        e_c = plan.period * consumption.controller_idle
        return e_h, e_c
    diode_power = 0.0
    for cfg in (reflection_cfg, absorption_cfg):
        if cfg is not None:
            diode_power += config_consumption(cfg, consumption)
    e_h = plan.period * harvested
    e_c = plan.period * (consumption.controller_run + diode_power)
    return e_h, e_c
