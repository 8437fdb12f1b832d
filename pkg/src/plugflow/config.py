"""Configuration: parameter bundles and the flat key=value file format."""

from __future__ import annotations

import dataclasses
import math
from pathlib import Path

from .errors import ConfigError
from .wilson import WilsonParams


@dataclasses.dataclass(frozen=True)
class InsertionParams:
    eps: float = 0.01
    zeta1: float = math.pi / 4.0          # blade center angles
    zeta2: float = -math.pi / 4.0
    theta_i: float = 0.0                  # offset of the radius-equality angle
    beta: float = 4.0                     # curvature of the radius profile
    eps_prime: float | None = None        # vertical offset; None = derived
    sector: float = 0.4                   # angular width of each tongue
    twistshape: str = "smoothstep"        # interior half-turn profile (unused
                                          # by the face-map dynamics)
    parabola_coeff: float = 150.0

    def eps_prime_value(self) -> float:
        if self.eps_prime is not None:
            return float(self.eps_prime)
        return 0.5 * math.sqrt(max(self.eps, 0.0))


@dataclasses.dataclass(frozen=True)
class IntegratorParams:
    rtol: float = 1e-10
    atol: float = 1e-10
    event_tol: float = 1e-12
    max_transitions: int = 10_000
    max_arclength: float = 1e6


@dataclasses.dataclass(frozen=True)
class PlugConfig:
    wilson: WilsonParams = dataclasses.field(default_factory=WilsonParams)
    insertion: InsertionParams = dataclasses.field(
        default_factory=InsertionParams)
    integrator: IntegratorParams = dataclasses.field(
        default_factory=IntegratorParams)
    seed: int = 0

    @classmethod
    def default(cls) -> "PlugConfig":
        return cls()

    def with_eps(self, eps: float) -> "PlugConfig":
        return dataclasses.replace(
            self, insertion=dataclasses.replace(self.insertion,
                                                eps=float(eps)))

    def with_updates(self, **insertion_fields) -> "PlugConfig":
        return dataclasses.replace(
            self, insertion=dataclasses.replace(self.insertion,
                                                **insertion_fields))

    def with_seed(self, seed: int) -> "PlugConfig":
        return dataclasses.replace(self, seed=int(seed))

    # -- flat file format ---------------------------------------------------

    def to_text(self) -> str:
        ins = self.insertion
        eps_prime = "" if ins.eps_prime is None else repr(ins.eps_prime)
        lines = [
            f"wilson.g0={self.wilson.g0!r}",
            f"wilson.eps0={self.wilson.eps0!r}",
            f"insertion.eps={ins.eps!r}",
            f"insertion.zeta1={ins.zeta1!r}",
            f"insertion.zeta2={ins.zeta2!r}",
            f"insertion.theta_i={ins.theta_i!r}",
            f"insertion.beta={ins.beta!r}",
            f"insertion.eps_prime={eps_prime}",
            f"insertion.sector={ins.sector!r}",
            f"insertion.twistshape={ins.twistshape}",
            f"insertion.parabola_coeff={ins.parabola_coeff!r}",
            f"integrator.rtol={self.integrator.rtol!r}",
            f"integrator.atol={self.integrator.atol!r}",
            f"integrator.event_tol={self.integrator.event_tol!r}",
            f"integrator.max_transitions={self.integrator.max_transitions}",
            f"integrator.max_arclength={self.integrator.max_arclength!r}",
            f"seed={self.seed}",
        ]
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def from_file(cls, path) -> "PlugConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text)

    @classmethod
    def from_text(cls, text: str) -> "PlugConfig":
        values: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, "
                                  f"got {raw!r}")
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip()

        def take(key: str, conv, default):
            if key not in values:
                return default
            raw = values.pop(key)
            if raw == "" and key == "insertion.eps_prime":
                return None
            try:
                return conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc

        wilson = WilsonParams(
            g0=take("wilson.g0", float, 0.1),
            eps0=take("wilson.eps0", float, 0.2),
        )
        insertion = InsertionParams(
            eps=take("insertion.eps", float, 0.01),
            zeta1=take("insertion.zeta1", float, math.pi / 4),
            zeta2=take("insertion.zeta2", float, -math.pi / 4),
            theta_i=take("insertion.theta_i", float, 0.0),
            beta=take("insertion.beta", float, 4.0),
            eps_prime=take("insertion.eps_prime",
                           lambda s: None if s == "" else float(s), None),
            sector=take("insertion.sector", float, 0.4),
            twistshape=take("insertion.twistshape", str, "smoothstep"),
            parabola_coeff=take("insertion.parabola_coeff", float, 150.0),
        )
        integrator = IntegratorParams(
            rtol=take("integrator.rtol", float, 1e-10),
            atol=take("integrator.atol", float, 1e-10),
            event_tol=take("integrator.event_tol", float, 1e-12),
            max_transitions=take("integrator.max_transitions", int, 10_000),
            max_arclength=take("integrator.max_arclength", float, 1e6),
        )
        seed = take("seed", int, 0)
        if values:
            raise ConfigError(f"unknown config keys: {sorted(values)}")
        return cls(wilson=wilson, insertion=insertion,
                   integrator=integrator, seed=seed)

    def validate(self) -> None:
        """Cheap structural checks; geometric checks live in the verifiers."""
        if self.wilson.g0 <= 0:
            raise ConfigError("wilson.g0 must be positive")
        if not (0 < self.wilson.eps0 < 0.25):
            raise ConfigError("wilson.eps0 must lie in (0, 1/4)")
        ins = self.insertion
        if abs(ins.eps) >= self.wilson.eps0:
            raise ConfigError("|insertion.eps| must be < wilson.eps0")
        if ins.beta <= abs(ins.eps):
            raise ConfigError("insertion.beta must exceed |insertion.eps|")
        if ins.eps > 0:
            reps = 2.0 + math.sqrt(ins.eps / ins.beta)
            if not reps < 2.0 + self.wilson.eps0 / 2.0:
                raise ConfigError(
                    "fixed radius 2+sqrt(eps/beta) must stay below "
                    "2 + eps0/2; increase beta or decrease eps")
            if ins.eps >= 1.0 / (4.0 * ins.beta):
                raise ConfigError(
                    "eps must stay below 1/(4 beta) so the center radius "
                    "profile is monotone through its fixed point")
        if ins.sector <= 0 or ins.sector > 0.5:
            raise ConfigError("insertion.sector must lie in (0, 0.5]")
