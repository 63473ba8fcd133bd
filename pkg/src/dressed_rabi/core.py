"""Model parameters and the dimensionless coupling.

All energies are in units of the photon energy (hbar * omega0 = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs of the two-level system plus oscillator.

    Attributes
    ----------
    delta_e : float
        Bare two-level splitting.
    u : float
        Spin-oscillator coupling energy.
    n : float
        Reference photon number. Stored as a real number so that the
        large-n regime (1e8 and beyond) is representable; callers that use
        it as a Fock index go through :meth:`fock_index`.
    omega0 : float
        Photon energy, fixed to 1.
    """

    delta_e: float
    u: float = 0.0
    n: float = 0.0
    omega0: float = 1.0

    def __post_init__(self):
        for name in ("delta_e", "u", "n", "omega0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.delta_e <= 0:
            raise ValueError(f"delta_e must be positive, got {self.delta_e}")
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.u < 0:
            raise ValueError(f"u must be non-negative, got {self.u}")
        if self.n < 0:
            raise ValueError(f"n must be non-negative, got {self.n}")

    def fock_index(self) -> int:
        """Return ``n`` as a Fock quantum number, rejecting non-integers."""
        return as_fock_index(self.n)


@dataclass(frozen=True)
class Coupling:
    g: float

    def __post_init__(self):
        if not self.g >= 0:
            raise ValueError(f"g must be non-negative, got {self.g}")


def as_fock_index(n) -> int:
    value = float(n)
    if value < 0 or not value.is_integer():
        raise ValueError(f"Fock index must be a non-negative integer, got {n!r}")
    return int(value)


def coupling_g(params: ModelParams) -> Coupling:
    """Dimensionless coupling g = U sqrt(n) / delta_e."""
    return Coupling(params.u * math.sqrt(params.n) / params.delta_e)


def params_with_g(delta_e: float, n: float, g: float) -> ModelParams:
    """Build :class:`ModelParams` whose coupling U reproduces ``g`` at ``n``."""
    if n <= 0:
        raise ValueError("n must be positive to parameterize by g (g = U sqrt(n) / delta_e)")
    if g < 0:
        raise ValueError(f"g must be non-negative, got {g}")
    return ModelParams(delta_e=delta_e, u=g * delta_e / math.sqrt(n), n=n)


_CONFIG_KEYS = ("delta_e", "u", "n", "g")


def read_config(path) -> dict[str, float]:
    """Parse a ``key = value`` parameter file.

    Blank lines and ``#`` comments are ignored. Recognised keys are
    ``delta_e``, ``u``, ``n`` and ``g``; giving both ``u`` and ``g`` is an
    error.
    """
    values: dict[str, float] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
        elif ":" in line:
            key, _, value = line.partition(":")
        else:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key = key.strip().lower().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = float(value.strip())
        except ValueError:
            raise ValueError(f"{path}:{lineno}: {key} is not a number: {value.strip()!r}") from None
    if "u" in values and "g" in values:
        raise ValueError(f"{path}: specify either u or g, not both")
    return values


def resolve_params(values: dict[str, float]) -> ModelParams:
    """Turn a mapping with ``delta_e``, ``n`` and one of ``u``/``g`` into params."""
    if "u" in values and "g" in values:
        raise ValueError("specify either u or g, not both")
    if "delta_e" not in values:
        raise ValueError("delta_e is required")
    n = values.get("n", 0.0)
    if "g" in values:
        return params_with_g(values["delta_e"], n, values["g"])
    return ModelParams(delta_e=values["delta_e"], u=values.get("u", 0.0), n=n)


def load_params(path) -> ModelParams:
    return resolve_params(read_config(path))
