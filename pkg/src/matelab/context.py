"""Constants derived from the LQG parameter gamma."""
from dataclasses import dataclass
from fractions import Fraction
import math


@dataclass(frozen=True)
class GammaContext:
    gamma: float

    def __post_init__(self):
        if not (0.0 < self.gamma < 2.0):
            raise ValueError(f"gamma must lie in (0, 2), got {self.gamma}")

    @classmethod
    def from_gamma2(cls, gamma2):
        """Build from gamma^2; accepts floats or rational strings like '8/3'."""
        if isinstance(gamma2, str):
            gamma2 = float(Fraction(gamma2))
        return cls(math.sqrt(float(gamma2)))

    @classmethod
    def from_kappa_prime(cls, kappa_prime):
        if kappa_prime <= 4:
            raise ValueError("kappa_prime must exceed 4")
        return cls(4.0 / math.sqrt(kappa_prime))

    @property
    def gamma2(self):
        return self.gamma ** 2

    @property
    def kappa(self):
        return self.gamma ** 2

    @property
    def kappa_prime(self):
        return 16.0 / self.gamma ** 2

    @property
    def gamma_prime(self):
        return 4.0 / self.gamma

    @property
    def Q(self):
        return 2.0 / self.gamma + self.gamma / 2.0

    @property
    def chi(self):
        return 2.0 / self.gamma - self.gamma / 2.0

    @property
    def lam(self):
        return math.pi / math.sqrt(self.kappa)

    @property
    def lam_prime(self):
        return math.pi * math.sqrt(self.kappa) / 4.0

    def identity_residuals(self):
        """Residuals of the identities tying the constants together (all ~0)."""
        g = self.gamma
        k = self.kappa
        return {
            "kappa_prime*kappa=16": self.kappa_prime * k - 16.0,
            "Q-chi=gamma": (self.Q - self.chi) - g,
            "chi=2/sqrt(k)-sqrt(k)/2": self.chi - (2 / math.sqrt(k) - math.sqrt(k) / 2),
            "2pi*chi=4(lam-lam')": 2 * math.pi * self.chi - 4 * (self.lam - self.lam_prime),
            "lam'=lam-(pi/2)chi": self.lam_prime - (self.lam - math.pi / 2 * self.chi),
            "gamma*gamma'=4": g * self.gamma_prime - 4.0,
        }
