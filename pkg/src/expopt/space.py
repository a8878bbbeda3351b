"""Design-space definitions: named dimensions, native-unit points, and the
affine mapping between native coordinates and the [0,1] unit box."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Union

import numpy as np

MAX_DIMS = 32
MAX_GRID_SIZE = 10**6

# tolerance for matching a native coordinate against a discrete level
_LEVEL_RTOL = 1e-9
_LEVEL_ATOL = 1e-12


@dataclass(frozen=True)
class ContinuousDim:
    """Axis spanning a closed interval in native units."""

    name: str
    lo: float
    hi: float
    unit: str = ""

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"dimension {self.name!r}: bounds must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"dimension {self.name!r}: need lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class DiscreteDim:
    """Axis restricted to an ordered ladder of native-unit levels."""

    name: str
    levels: tuple[float, ...]
    unit: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))
        if len(self.levels) < 2:
            raise ValueError(f"dimension {self.name!r}: need at least 2 levels")
        if any(not math.isfinite(v) for v in self.levels):
            raise ValueError(f"dimension {self.name!r}: levels must be finite")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError(f"dimension {self.name!r}: levels must be strictly increasing")

    def level_index(self, value: float) -> int:
        """Index of the level equal to ``value``, within float tolerance."""
        for i, lv in enumerate(self.levels):
            if math.isclose(value, lv, rel_tol=_LEVEL_RTOL, abs_tol=_LEVEL_ATOL):
                return i
        raise ValueError(f"dimension {self.name!r}: {value} is not one of the levels {self.levels}")


Dim = Union[ContinuousDim, DiscreteDim]


@dataclass(frozen=True)
class DesignPoint:
    """A single experimental setting, one native-unit coordinate per dimension."""

    coords: tuple[float, ...]

    def __init__(self, coords) -> None:
        object.__setattr__(self, "coords", tuple(float(c) for c in coords))

    def __len__(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class ParameterSpace:
    """Ordered collection of dimensions defining the feasible settings."""

    dims: tuple[Dim, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(self.dims))
        if not 1 <= len(self.dims) <= MAX_DIMS:
            raise ValueError(f"need between 1 and {MAX_DIMS} dimensions, got {len(self.dims)}")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def all_discrete(self) -> bool:
        return all(isinstance(d, DiscreteDim) for d in self.dims)

    def grid_size(self) -> int:
        if not self.all_discrete:
            raise ValueError("grid size is defined only for all-discrete spaces")
        return math.prod(len(d.levels) for d in self.dims)

    def grid_points(self) -> Iterator[DesignPoint]:
        """All grid points, in lexicographic order of level indices."""
        if not self.all_discrete:
            raise ValueError("grid enumeration requires an all-discrete space")
        if self.grid_size() > MAX_GRID_SIZE:
            raise ValueError(f"grid size {self.grid_size()} exceeds the {MAX_GRID_SIZE} cap")
        for combo in product(*(d.levels for d in self.dims)):
            yield DesignPoint(combo)

    def validate(self, point: DesignPoint) -> None:
        """Raise ValueError unless ``point`` is a valid setting in this space."""
        if len(point) != self.ndim:
            raise ValueError(f"point has {len(point)} coordinates, space has {self.ndim}")
        for dim, value in zip(self.dims, point.coords):
            if not math.isfinite(value):
                raise ValueError(f"dimension {dim.name!r}: coordinate {value} is not finite")
            if isinstance(dim, ContinuousDim):
                if not dim.lo <= value <= dim.hi:
                    raise ValueError(
                        f"dimension {dim.name!r}: {value} outside [{dim.lo}, {dim.hi}]"
                    )
            else:
                dim.level_index(value)

    def normalize(self, point: DesignPoint) -> np.ndarray:
        """Map a valid native-unit point onto the [0,1] unit box.

        Continuous coordinates map affinely; discrete coordinates map to
        level_index / (levels - 1).
        """
        self.validate(point)
        z = np.empty(self.ndim)
        for i, (dim, value) in enumerate(zip(self.dims, point.coords)):
            if isinstance(dim, ContinuousDim):
                z[i] = (value - dim.lo) / (dim.hi - dim.lo)
            else:
                z[i] = dim.level_index(value) / (len(dim.levels) - 1)
        return z

    def denormalize(self, z) -> DesignPoint:
        """Map a unit-box point back to native units.

        Discrete coordinates snap to the nearest level index, so any point of
        the unit box yields a valid setting.
        """
        z = np.asarray(z, dtype=float)
        if z.shape != (self.ndim,):
            raise ValueError(f"expected {self.ndim} normalized coordinates, got shape {z.shape}")
        if np.any(z < -1e-9) or np.any(z > 1 + 1e-9):
            raise ValueError("normalized coordinates must lie in [0, 1]")
        coords = []
        for dim, zi in zip(self.dims, z):
            zi = min(max(float(zi), 0.0), 1.0)
            if isinstance(dim, ContinuousDim):
                coords.append(dim.lo + zi * (dim.hi - dim.lo))
            else:
                idx = int(round(zi * (len(dim.levels) - 1)))
                coords.append(dim.levels[idx])
        return DesignPoint(coords)

    def to_dict(self) -> dict:
        dims = []
        for d in self.dims:
            if isinstance(d, ContinuousDim):
                dims.append({"name": d.name, "unit": d.unit, "kind": "continuous",
                             "lo": d.lo, "hi": d.hi})
            else:
                dims.append({"name": d.name, "unit": d.unit, "kind": "discrete",
                             "levels": list(d.levels)})
        return {"dims": dims}

    @staticmethod
    def from_dict(data: dict) -> "ParameterSpace":
        dims: list[Dim] = []
        for spec in data["dims"]:
            kind = spec.get("kind")
            if kind == "continuous":
                dims.append(ContinuousDim(spec["name"], spec["lo"], spec["hi"],
                                          spec.get("unit", "")))
            elif kind == "discrete":
                dims.append(DiscreteDim(spec["name"], tuple(spec["levels"]),
                                        spec.get("unit", "")))
            else:
                raise ValueError(f"unknown dimension kind {kind!r}")
        return ParameterSpace(tuple(dims))
