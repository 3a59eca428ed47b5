"""1D meshes and diffusion coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import NonMonotoneMapping, NonPositiveCoefficient


@dataclass(frozen=True)
class Mesh1D:
    endpoints: np.ndarray
    kind: str = "uniform"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        e = np.asarray(self.endpoints, dtype=float)
        if e.ndim != 1 or e.size < 2:
            raise ValueError("mesh needs at least two endpoints")
        if np.any(np.diff(e) <= 0):
            raise NonMonotoneMapping("mesh endpoints must be strictly increasing")
        e.setflags(write=False)
        object.__setattr__(self, "endpoints", e)

    @property
    def n(self) -> int:
        return self.endpoints.size - 1

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.endpoints)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.endpoints[1:] + self.endpoints[:-1])

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.endpoints[0]), float(self.endpoints[-1])


@dataclass(frozen=True)
class Coefficient:
    func: Callable[[np.ndarray], np.ndarray]
    label: str = "b"
    positive: bool = True

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.func(x), dtype=float), x.shape)

    def check_positive(self, x) -> None:
        if np.any(self(x) <= 0):
            raise NonPositiveCoefficient(f"coefficient {self.label} is not positive")


def constant(value: float = 1.0) -> Coefficient:
    return Coefficient(lambda x: np.full_like(x, value, dtype=float), label=f"{value:g}")


def quadratic() -> Coefficient:
    """b(x) = 1 + x^2, the variable coefficient of the reference experiments."""
    return Coefficient(lambda x: 1.0 + x * x, label="1+x^2")


def uniform_mesh(n: int, a: float = 0.0, b: float = 1.0) -> Mesh1D:
    if n < 1 or not a < b:
        raise ValueError("need n >= 1 and a < b")
    e = a + (b - a) * np.arange(n + 1) / n
    e[-1] = b
    return Mesh1D(e, "uniform", {"n": n})


@dataclass(frozen=True)
class MeshMap:
    """Increasing map g of [0, 1] onto itself, with its derivative."""

    g: Callable[[np.ndarray], np.ndarray]
    dg: Callable[[np.ndarray], np.ndarray]
    label: str = "g"


def identity_map() -> MeshMap:
    return MeshMap(lambda x: np.asarray(x, dtype=float), lambda x: np.ones_like(x, dtype=float), "identity")


def exponential_map() -> MeshMap:
    """g(x) = c e^x + k with g(0) = 0, g(1) = 1, i.e. c = 1/(e-1), k = -c."""
    c = 1.0 / np.expm1(1.0)
    return MeshMap(lambda x: c * np.expm1(x), lambda x: c * np.exp(x), "exp")


def graded_mesh(n: int, mapping: MeshMap) -> Mesh1D:
    ends = mapping.g(np.array([0.0, 1.0]))
    if abs(ends[0]) > 1e-12 or abs(ends[1] - 1.0) > 1e-12:
        raise NonMonotoneMapping(f"mapping must fix 0 and 1, got {ends}")
    y = mapping.g(np.arange(n + 1) / n)
    y[0], y[-1] = 0.0, 1.0
    if np.any(np.diff(y) <= 0):
        raise NonMonotoneMapping("mapping is not strictly increasing on the grid")
    return Mesh1D(y, "graded", {"n": n, "map": mapping.label})


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream; same seed gives the same draws on every platform."""
    return np.random.Generator(np.random.PCG64(seed))


def randomized_mesh(n: int, theta: float, seed: int = 0) -> Mesh1D:
    """Uniform endpoints j/n shifted by theta * c_j, c_j ~ U(-1/(2n), 1/(2n))."""
    if not 0.0 <= theta < 1.0:
        raise ValueError("theta must lie in [0, 1)")
    if n < 2:
        raise ValueError("n must be >= 2")
    c = make_rng(seed).uniform(-0.5 / n, 0.5 / n, size=n - 1)
    e = np.arange(n + 1) / n
    e[1:-1] += theta * c
    return Mesh1D(e, "randomized", {"n": n, "theta": theta, "seed": seed})


def graded_to_equivalent_coefficient(mapping: MeshMap, b: Coefficient | None = None) -> Coefficient:
    """Coefficient b(g(x)) / g'(x) seen on the uniform parameter grid."""
    b = constant(1.0) if b is None else b
    return Coefficient(lambda x: b(mapping.g(x)) / mapping.dg(x), label=f"{b.label}(g)/g'")


def write_mesh_csv(mesh: Mesh1D, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{v!r}\n" for v in mesh.endpoints.tolist()))
    return path


def read_mesh_csv(path, kind: str = "file") -> Mesh1D:
    vals = [float(line) for line in Path(path).read_text().split() if line.strip()]
    return Mesh1D(np.array(vals), kind)
