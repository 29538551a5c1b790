"""Uniform 1D partitions and the affine element-to-reference map."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class Mesh:
    """Partition x_0 < x_1 < ... < x_N of an interval into N elements.

    Element ``k`` (0-based) spans ``[nodes[k], nodes[k + 1]]``.
    """

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise InvalidArgumentError("a mesh needs at least two nodes")
        if not np.all(np.isfinite(nodes)):
            raise InvalidArgumentError("mesh nodes must be finite")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidArgumentError("mesh nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_elements(self):
        return self.nodes.size - 1

    @property
    def h(self):
        """Element lengths, shape ``(N,)``."""
        return np.diff(self.nodes)

    @property
    def interior(self):
        """Interface points x_1 .. x_{N-1}."""
        return self.nodes[1:-1]

    @property
    def domain(self):
        return float(self.nodes[0]), float(self.nodes[-1])

    def element(self, k):
        self._check(k)
        return float(self.nodes[k]), float(self.nodes[k + 1])

    def midpoints(self):
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    def to_reference(self, k, x):
        a, b = self.element(k)
        return 2.0 * (np.asarray(x, dtype=float) - a) / (b - a) - 1.0

    def from_reference(self, k, t):
        a, b = self.element(k)
        return a + 0.5 * (np.asarray(t, dtype=float) + 1.0) * (b - a)

    def locate(self, x):
        """Element index for each point; interior nodes go to the left element."""
        idx = np.searchsorted(self.nodes, np.asarray(x, dtype=float), side="left") - 1
        return np.clip(idx, 0, self.n_elements - 1)

    def _check(self, k):
        if not 0 <= k < self.n_elements:
            raise InvalidArgumentError(
                f"element index {k} out of range for {self.n_elements} elements"
            )


def build_uniform_mesh(domain, n_elements):
    """Equally spaced mesh of ``n_elements`` cells on ``domain = (a, b)``."""
    a, b = (float(v) for v in domain)
    if int(n_elements) != n_elements or n_elements < 1:
        raise InvalidArgumentError(f"number of elements must be >= 1, got {n_elements}")
    if not b > a:
        raise InvalidArgumentError(f"degenerate or reversed interval ({a}, {b})")
    return Mesh(np.linspace(a, b, int(n_elements) + 1))


def map_to_reference(mesh, k, x):
    return mesh.to_reference(k, x)
