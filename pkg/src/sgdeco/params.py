"""Physical parameters shared by all layers."""

from __future__ import annotations

from dataclasses import asdict, dataclass
import math

from .errors import ConfigError


@dataclass(frozen=True)
class PhysParams:
    """Trap, particle and drive parameters of the interferometer.

    Defaults are natural units (``m = omega0 = hbar = 1``).

    Parameters
    ----------
    m : float
        Particle mass (kg).
    omega0 : float
        Trap angular frequency (rad/s).
    hbar : float
        Reduced Planck constant (J s).
    g_nv, mu_b, eta : float
        Spin g-factor, Bohr magneton (J/T) and magnetic gradient (T/m). Their
        product sets the spin-dependent force.
    n_periods : int
        Number of trap periods N of one interferometer run.
    bias_accel : float
        Spin-independent acceleration added to both arms (m/s^2). A nonzero
        value makes the arms asymmetric (``A- != -A+``).
    """

    m: float = 1.0
    omega0: float = 1.0
    hbar: float = 1.0
    g_nv: float = 1.0
    mu_b: float = 1.0
    eta: float = 1.0
    n_periods: int = 1
    bias_accel: float = 0.0

    def __post_init__(self) -> None:
        for name in ("m", "omega0", "hbar", "g_nv", "mu_b", "eta"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"params.{name} must be a finite positive number, got {value!r}")
        if isinstance(self.n_periods, bool) or int(self.n_periods) != self.n_periods or self.n_periods < 1:
            raise ConfigError(f"params.n_periods must be a positive integer, got {self.n_periods!r}")
        object.__setattr__(self, "n_periods", int(self.n_periods))
        if not math.isfinite(self.bias_accel):
            raise ConfigError("params.bias_accel must be finite")

    @property
    def spin_accel(self) -> float:
        """Magnitude of the spin-dependent acceleration g mu_B eta / m."""
        return self.g_nv * self.mu_b * self.eta / self.m

    @property
    def a_plus(self) -> float:
        return (self.spin_accel + self.bias_accel) / self.omega0**2

    @property
    def a_minus(self) -> float:
        return (-self.spin_accel + self.bias_accel) / self.omega0**2

    @property
    def delta_a(self) -> float:
        """Arm amplitude difference A+ - A-."""
        return self.a_plus - self.a_minus

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega0

    @property
    def t_closure(self) -> float:
        """Default run time 2 pi N / omega0, at which both arms close."""
        return self.n_periods * self.period

    @property
    def ground_width(self) -> float:
        """Ground-state length scale sqrt(hbar / (m omega0))."""
        return math.sqrt(self.hbar / (self.m * self.omega0))

    @property
    def alpha_scale(self) -> float:
        """Factor sqrt(m omega0 / 2 hbar) mapping position to Re(alpha)."""
        return math.sqrt(self.m * self.omega0 / (2.0 * self.hbar))

    @property
    def is_natural(self) -> bool:
        return self.m == 1.0 and self.omega0 == 1.0 and self.hbar == 1.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PhysParams":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"params: unknown field(s) {sorted(unknown)}")
        return cls(**data)
