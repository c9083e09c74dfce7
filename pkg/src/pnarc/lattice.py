"""Nanomagnet array geometries.

A geometry is an ordered set of point macrospins, each with a position in
lattice units and an in-plane easy-axis angle.  Square ice interleaves two
sublattices: horizontal-axis magnets at half-integer x / integer y, and
vertical-axis magnets at integer x / half-integer y.  Pinwheel is the same
lattice with every easy axis rotated +45 degrees in place.  An order-m array
contains 2*m*(m+1) magnets.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidParameterError
from .validation import check_positive_int


class Topology(str, Enum):
    SQUARE = "square"
    PINWHEEL = "pinwheel"


class MagnetSite(NamedTuple):
    index: int
    x: float
    y: float
    easy_axis_angle: float
    magnitude: float


@dataclass(frozen=True)
class Geometry:
    """Positioned macrospins with easy-axis angles, in canonical ordering.

    Ordering is row-major by position (ascending y, ties by x) and is
    identical across runs and platforms, so state vectors indexed by site
    are comparable between experiments.
    """

    topology: Topology
    m: int
    lattice_constant: float
    positions: np.ndarray        # (n, 2) float64, lattice units
    angles: np.ndarray           # (n,) float64, radians in [0, pi)
    magnitudes: np.ndarray       # (n,) float64 dipole moments
    axes: np.ndarray = field(init=False)  # (n, 2) unit easy-axis vectors

    def __post_init__(self):
        axes = np.stack([np.cos(self.angles), np.sin(self.angles)], axis=1)
        object.__setattr__(self, "axes", axes)
        for arr in (self.positions, self.angles, self.magnitudes, self.axes):
            arr.setflags(write=False)

    @property
    def n_magnets(self) -> int:
        return self.positions.shape[0]

    def sites(self):
        for i in range(self.n_magnets):
            yield MagnetSite(
                i,
                float(self.positions[i, 0]),
                float(self.positions[i, 1]),
                float(self.angles[i]),
                float(self.magnitudes[i]),
            )

    def to_table(self) -> str:
        """Plain-text site table (index, x, y, angle) for inspection."""
        lines = ["# index x y angle"]
        for s in self.sites():
            lines.append(f"{s.index} {s.x:.6f} {s.y:.6f} {s.easy_axis_angle:.9f}")
        return "\n".join(lines) + "\n"

    def save_table(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_table())


def magnet_count(m: int) -> int:
    """Number of magnets in an order-m array: 2*m*(m+1)."""
    return 2 * m * (m + 1)


def build_geometry(
    topology,
    m: int,
    lattice_constant: float = 1.0,
    moment: float = 1.0,
) -> Geometry:
    """Construct a square-ice or pinwheel geometry of lattice order m.

    Pure function: identical inputs give bit-identical geometries.
    """
    topology = Topology(topology)
    m = check_positive_int(m, "m")
    if lattice_constant <= 0:
        raise InvalidParameterError("lattice_constant must be > 0")

    xs, ys, angles = [], [], []
    # Horizontal-axis sublattice: (i + 0.5, j), m * (m + 1) sites.
    for j in range(m + 1):
        for i in range(m):
            xs.append(i + 0.5)
            ys.append(float(j))
            angles.append(0.0)
    # Vertical-axis sublattice: (i, j + 0.5), (m + 1) * m sites.
    for j in range(m):
        for i in range(m + 1):
            xs.append(float(i))
            ys.append(j + 0.5)
            angles.append(np.pi / 2)

    pos = np.stack([np.asarray(xs), np.asarray(ys)], axis=1) * lattice_constant
    ang = np.asarray(angles)
    if topology is Topology.PINWHEEL:
        ang = ang + np.pi / 4

    # Canonical row-major ordering: ascending y, ties broken by x.
    order = np.lexsort((pos[:, 0], pos[:, 1]))
    pos = pos[order]
    ang = np.mod(ang[order], np.pi)

    return Geometry(
        topology=topology,
        m=m,
        lattice_constant=float(lattice_constant),
        positions=pos,
        angles=ang,
        magnitudes=np.full(pos.shape[0], float(moment)),
    )
