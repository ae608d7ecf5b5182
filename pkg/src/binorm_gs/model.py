"""Problem specifications for the two-component constrained minimization.

A problem is the energy

    E(u1, u2) = sum_i [ 1/2 |grad u_i|^2 + 1/2 V_i |u_i|^2
                        - mu_i / (2 p_i + 2) |u_i|^(2 p_i + 2) ]
                - beta / (p3 + 1) |u1|^(p3+1) |u2|^(p3+1)

minimized over states with fixed squared masses (alpha1, alpha2).  Two
regimes are supported: both potentials bounded, nonpositive and vanishing
at infinity ("both_bounded"), or a bounded first potential together with
a confining second potential with infimum one ("trapping").
"""

from __future__ import annotations

from dataclasses import dataclass, asdict, replace
from typing import Any

import numpy as np

from .grid import Field, Grid, read_field_csv

__all__ = [
    "PotentialSpec",
    "ProblemSpec",
    "validate",
    "sample_potential",
    "normalize_bounded_potential",
    "potential_varies",
]

POTENTIAL_KINDS = ("zero", "gaussian_well", "harmonic_trap", "tabulated")
REGIMES = ("both_bounded", "trapping")


@dataclass(frozen=True)
class PotentialSpec:
    """Tagged description of one external potential.

    kind "zero":          V = shift (canonical form has shift 0)
    kind "gaussian_well": V = -depth * exp(-|x - center|^2 / width^2) + shift
    kind "harmonic_trap": V = offset + stiffness * |x - center|^2
    kind "tabulated":     V read from a field CSV at samples_path

    ``shift`` carries a constant offset for bounded potentials with a
    nonzero limit at infinity; normalize_bounded_potential splits it off.
    """

    kind: str
    depth: float = 0.0
    width: float = 1.0
    offset: float = 0.0
    stiffness: float = 0.0
    center: tuple[float, ...] = ()
    shift: float = 0.0
    samples_path: str = ""

    def __post_init__(self) -> None:
        if self.kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @classmethod
    def zero(cls, shift: float = 0.0) -> "PotentialSpec":
        return cls(kind="zero", shift=shift)

    @classmethod
    def gaussian_well(
        cls,
        depth: float,
        width: float,
        center: tuple[float, ...] = (),
        shift: float = 0.0,
    ) -> "PotentialSpec":
        return cls(
            kind="gaussian_well", depth=depth, width=width, center=center, shift=shift
        )

    @classmethod
    def harmonic_trap(
        cls, stiffness: float, offset: float = 1.0, center: tuple[float, ...] = ()
    ) -> "PotentialSpec":
        return cls(
            kind="harmonic_trap", stiffness=stiffness, offset=offset, center=center
        )

    @classmethod
    def tabulated(cls, samples_path: str) -> "PotentialSpec":
        return cls(kind="tabulated", samples_path=samples_path)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["center"] = list(self.center)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PotentialSpec":
        d = dict(d)
        d["center"] = tuple(d.get("center", ()))
        return cls(**d)


@dataclass(frozen=True)
class ProblemSpec:
    """Full problem data: dimension, exponents, couplings, masses, potentials."""

    dim: int
    p1: float
    p2: float
    p3: float
    mu1: float
    mu2: float
    beta: float
    alpha1: float
    alpha2: float
    v1: PotentialSpec = PotentialSpec.zero()
    v2: PotentialSpec = PotentialSpec.zero()
    regime: str = "both_bounded"

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")

    @property
    def exponents(self) -> tuple[float, float, float]:
        return (self.p1, self.p2, self.p3)

    @property
    def masses(self) -> tuple[float, float]:
        return (self.alpha1, self.alpha2)

    def with_masses(self, alpha1: float, alpha2: float) -> "ProblemSpec":
        return replace(self, alpha1=alpha1, alpha2=alpha2)

    def without_potentials(self) -> "ProblemSpec":
        """The translation-invariant comparison problem (potentials dropped)."""
        return replace(
            self,
            v1=PotentialSpec.zero(),
            v2=PotentialSpec.zero(),
            regime="both_bounded",
        )

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["v1"] = self.v1.to_dict()
        d["v2"] = self.v2.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ProblemSpec":
        d = dict(d)
        d["v1"] = PotentialSpec.from_dict(d["v1"])
        d["v2"] = PotentialSpec.from_dict(d["v2"])
        return cls(**d)


def _check_bounded(tag: str, name: str, pot: PotentialSpec) -> list[str]:
    """Structural checks for a bounded, nonpositive, vanishing potential."""
    out = []
    if pot.kind == "harmonic_trap":
        out.append(f"{tag}: {name} must be bounded and vanish at infinity; "
                   f"got a confining trap")
        return out
    if pot.kind == "gaussian_well":
        if not (pot.depth > 0):
            out.append(f"{tag}: {name} well depth must be positive; got {pot.depth}")
        if not (pot.width > 0):
            out.append(f"{tag}: {name} well width must be positive; got {pot.width}")
    if pot.shift != 0.0:
        out.append(f"{tag}: {name} has nonzero limit {pot.shift} at infinity; "
                   f"apply normalize_bounded_potential first")
    return out


def validate(spec: ProblemSpec) -> list[str]:
    """Check the standing hypotheses; empty list means admissible.

    Each message names the violated hypothesis: (p1) for the subcritical
    exponent window, (V1)/(V2) for the potential regimes, and coupling or
    mass positivity for the remaining structural requirements.
    """
    out: list[str] = []
    if spec.dim not in (1, 2):
        out.append(f"dim: supported dimensions are 1 and 2; got {spec.dim}")
        return out
    pmax = 2.0 / spec.dim
    for name, p in (("p1", spec.p1), ("p2", spec.p2), ("p3", spec.p3)):
        if not (0.0 < p < pmax):
            out.append(f"(p1): {name} must lie in (0, 2/N) = (0, {pmax}); got {p}")
    for name, mu in (("mu1", spec.mu1), ("mu2", spec.mu2)):
        if not (mu > 0):
            out.append(f"coupling: {name} > 0 required; got {mu}")
    if not (spec.beta > 0):
        out.append(f"coupling: beta > 0 required; got {spec.beta}")
    # alpha_i = 0 is admitted: scans and scalar reductions pin one
    # component at zero mass and solve the degenerate problem.
    for name, a in (("alpha1", spec.alpha1), ("alpha2", spec.alpha2)):
        if not (a >= 0):
            out.append(f"mass: {name} >= 0 required; got {a}")
    out.extend(_check_bounded("(V1)", "v1", spec.v1))
    if spec.regime == "both_bounded":
        out.extend(_check_bounded("(V1)", "v2", spec.v2))
    else:
        if spec.v2.kind != "harmonic_trap":
            out.append(f"(V2): v2 must be confining in the trapping regime; "
                       f"got kind {spec.v2.kind!r}")
        else:
            if spec.v2.offset != 1.0:
                out.append(f"(V2): trap infimum must equal 1; got {spec.v2.offset}")
            if not (spec.v2.stiffness > 0):
                out.append(f"(V2): trap stiffness must be positive; "
                           f"got {spec.v2.stiffness}")
    return out


def sample_potential(pot: PotentialSpec, grid: Grid) -> Field:
    """Evaluate a potential on the grid nodes; always a real field."""
    center = pot.center if pot.center else (0.0,) * grid.dim
    if len(center) != grid.dim:
        raise ValueError(
            f"potential center has {len(center)} components, grid dim is {grid.dim}"
        )
    if pot.kind == "tabulated":
        f = read_field_csv(pot.samples_path)
        if f.grid != grid:
            raise ValueError(
                f"tabulated potential grid {(f.grid.dim, f.grid.n, f.grid.length)} "
                f"does not match solve grid {(grid.dim, grid.n, grid.length)}"
            )
        if not f.real_valued:
            raise ValueError("tabulated potential must be real")
        return f
    r2 = np.zeros(grid.shape)
    for x, c in zip(grid.meshes(), center):
        r2 = r2 + (x - c) ** 2
    if pot.kind == "zero":
        values = np.full(grid.shape, pot.shift)
    elif pot.kind == "gaussian_well":
        values = -pot.depth * np.exp(-r2 / pot.width**2) + pot.shift
    elif pot.kind == "harmonic_trap":
        values = pot.offset + pot.stiffness * r2
    else:  # pragma: no cover - guarded by PotentialSpec
        raise ValueError(f"unknown potential kind {pot.kind!r}")
    return Field(grid, values)


def potential_varies(field: Field) -> bool:
    """True when some node differs from the box-corner value by > 1e-8.

    A potential that is constant on the grid contributes nothing beyond
    a mass shift, so splitting statements that need a genuine well are
    vacuous for it; callers use this to flag such runs.
    """
    corner = field.values[(0,) * field.grid.dim]
    return bool(np.any(np.abs(field.values - corner) > 1e-8))


def normalize_bounded_potential(pot: PotentialSpec) -> tuple[PotentialSpec, float]:
    """Split a bounded potential into canonical form plus its limit.

    Returns (canonical, b) with V = canonical + b, canonical vanishing at
    infinity.  Shifting each potential this way changes the energy of a
    constrained state by sum_i (b_i / 2) alpha_i and nothing else, so
    minimizers are unaffected.  Confining and tabulated potentials are
    rejected: the first has no finite limit, the second no structural one.
    """
    if pot.kind == "harmonic_trap":
        raise ValueError("confining potential has no finite limit at infinity")
    if pot.kind == "tabulated":
        raise ValueError("tabulated potential carries no structural limit")
    return replace(pot, shift=0.0), pot.shift
