"""Elastic half-space surface compliance on a square patch grid.

Sign convention: ``z`` points into the solid, so a compressive normal
traction is positive and produces positive ``u_z``. Tractions are piecewise
constant over square patches centred on the grid nodes. The assembled matrix
maps patch *forces* (traction times patch area, N) to node displacements (m).
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, ResourceError, SolverError

DEFAULT_LAMBDA = 1e-3
DEFAULT_MAX_DOF = 6000
# Above this condition number an unregularised solve is refused.
COND_LIMIT = 1e12

_LN_1_SQRT2 = math.log(1.0 + math.sqrt(2.0))


@dataclass(frozen=True)
class SurfaceGrid:
    """``nx`` by ``ny`` nodes at spacing ``pitch`` (m) starting at ``origin``."""

    nx: int
    ny: int
    pitch: float
    origin: tuple = (0.0, 0.0)

    def __post_init__(self):
        if int(self.nx) < 1 or int(self.ny) < 1:
            raise DomainError(f"grid needs nx, ny >= 1, got {self.nx}x{self.ny}")
        if not (self.pitch > 0 and math.isfinite(self.pitch)):
            raise DomainError(f"pitch must be positive, got {self.pitch!r}")

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def n_nodes(self):
        return self.nx * self.ny

    @property
    def patch_area(self):
        return self.pitch**2

    def coordinates(self):
        """Node coordinates, shape ``(nx, ny, 2)``."""
        x = self.origin[0] + self.pitch * np.arange(self.nx)
        y = self.origin[1] + self.pitch * np.arange(self.ny)
        X, Y = np.meshgrid(x, y, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def center(self):
        return (
            self.origin[0] + 0.5 * self.pitch * (self.nx - 1),
            self.origin[1] + 0.5 * self.pitch * (self.ny - 1),
        )


class _GridField:
    def __init__(self, grid, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.nx, grid.ny, 3):
            raise DomainError(
                f"field shape {values.shape} does not match grid ({grid.nx}, {grid.ny}, 3)"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("field contains non-finite entries")
        self.grid = grid
        self.values = values

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.nx, grid.ny, 3)))

    def flat(self):
        return self.values.reshape(-1)

    def __repr__(self):
        return f"{type(self).__name__}(grid={self.grid!r})"


class DisplacementField(_GridField):
    """Per-node surface displacement ``(u_x, u_y, u_z)`` in m."""


class TractionField(_GridField):
    """Per-node patch traction ``(f_x, f_y, f_z)`` in Pa."""


def greens_surface(dx, dy, material):
    """Surface displacement at offset ``(dx, dy)`` from a unit point force.

    Returns a 3x3 array ``G`` with ``G[i, j]`` the ``i`` displacement (m)
    per newton of force along ``j``.
    """
    r2 = dx * dx + dy * dy
    if r2 == 0:
        raise DomainError("greens_surface is singular at zero offset; use the patch self-term")
    return _kernel(np.asarray(dx, float), np.asarray(dy, float), material)


def _kernel(dx, dy, material):
    E, nu = material.young_modulus, material.poisson_ratio
    r = np.hypot(dx, dy)
    k = (1.0 + nu) / (math.pi * E)
    c = 0.5 * k * (1.0 - 2.0 * nu)
    r3 = r**3
    G = np.empty(np.shape(r) + (3, 3))
    G[..., 0, 0] = k * ((1.0 - nu) / r + nu * dx * dx / r3)
    G[..., 1, 1] = k * ((1.0 - nu) / r + nu * dy * dy / r3)
    G[..., 0, 1] = G[..., 1, 0] = k * nu * dx * dy / r3
    G[..., 0, 2] = -c * dx / r**2
    G[..., 1, 2] = -c * dy / r**2
    G[..., 2, 0] = c * dx / r**2
    G[..., 2, 1] = c * dy / r**2
    G[..., 2, 2] = k * (1.0 - nu) / r
    return G


def patch_self_term(pitch, material):
    """Centre displacement per newton spread uniformly over its own square patch.

    Uses the exact square integrals ``int 1/r dA = 4 p ln(1 + sqrt 2)`` and
    ``int x^2/r^3 dA = 2 p ln(1 + sqrt 2)``; odd terms vanish.
    """
    E, nu = material.young_modulus, material.poisson_ratio
    k = (1.0 + nu) / (math.pi * E)
    mean_inv_r = 4.0 * _LN_1_SQRT2 / pitch
    mean_x2_r3 = 2.0 * _LN_1_SQRT2 / pitch
    tangential = k * ((1.0 - nu) * mean_inv_r + nu * mean_x2_r3)
    return np.diag([tangential, tangential, k * (1.0 - nu) * mean_inv_r])


class ComplianceOperator:
    """Dense patch-force to displacement matrix of shape ``(3N, 3N)``.

    Degrees of freedom are ordered node-major (node ``ix * ny + iy``), then
    component ``x, y, z``.
    """

    def __init__(self, matrix, grid, material):
        self.matrix = matrix
        self.grid = grid
        self.material = material
        self.matrix.setflags(write=False)

    @property
    def shape(self):
        return self.matrix.shape

    @cached_property
    def largest_singular_value(self):
        return power_iteration(self.matrix)


def power_iteration(A, tol=1e-10, max_iter=1000):
    """Largest singular value of symmetric ``A`` by power iteration."""
    v = np.random.default_rng(0).standard_normal(A.shape[0])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        w = A @ v
        new = np.linalg.norm(w)
        if new == 0:
            return 0.0
        v = w / new
        if abs(new - sigma) <= tol * new:
            return float(new)
        sigma = new
    return float(sigma)


def assemble_compliance(grid, material, max_dof=DEFAULT_MAX_DOF):
    """Assemble the compliance matrix of ``grid`` for ``material``.

    Off-diagonal blocks are point-force kernels between patch centres;
    diagonal blocks are the uniform-patch self term.
    """
    n = grid.n_nodes
    if 3 * n > max_dof:
        raise ResourceError(
            f"grid {grid.nx}x{grid.ny} needs {3 * n} dof, budget is {max_dof}"
        )
    xy = grid.coordinates().reshape(n, 2)
    dx = xy[:, None, 0] - xy[None, :, 0]
    dy = xy[:, None, 1] - xy[None, :, 1]
    diag = np.arange(n)
    dx[diag, diag] = dy[diag, diag] = 1.0  # placeholder, overwritten below
    blocks = _kernel(dx, dy, material)
    blocks[diag, diag] = patch_self_term(grid.pitch, material)
    C = blocks.transpose(0, 2, 1, 3).reshape(3 * n, 3 * n)
    return ComplianceOperator(np.ascontiguousarray(C), grid, material)


def _check_grid(op, field):
    if field.grid.shape != op.grid.shape or not math.isclose(field.grid.pitch, op.grid.pitch):
        raise DomainError(
            f"field grid {field.grid.shape} @ {field.grid.pitch:g} m does not match "
            f"operator grid {op.grid.shape} @ {op.grid.pitch:g} m"
        )


def forward_displacements(op, traction):
    """Surface displacements produced by ``traction``."""
    _check_grid(op, traction)
    u = op.matrix @ (traction.flat() * op.grid.patch_area)
    return DisplacementField(op.grid, u.reshape(op.grid.nx, op.grid.ny, 3))


def reconstruct_traction(op, displacement, lam=DEFAULT_LAMBDA):
    """Tikhonov inverse of :func:`forward_displacements`.

    Minimises ``|C q - u|^2 + (lam * s)^2 |q|^2`` over patch forces ``q``,
    where ``s`` is the largest singular value of ``C``; ``lam`` is therefore
    dimensionless. ``lam = 0`` is allowed for well-conditioned operators.
    """
    _check_grid(op, displacement)
    if lam < 0:
        raise DomainError(f"lambda must be non-negative, got {lam!r}")
    C = op.matrix
    u = displacement.flat()
    if lam == 0:
        cond = np.linalg.cond(C)
        if not cond < COND_LIMIT:
            raise SolverError(
                f"compliance condition number {cond:.3g} is too large for an unregularised "
                f"solve; try lambda = {DEFAULT_LAMBDA:g}",
                suggested_lambda=DEFAULT_LAMBDA,
            )
        try:
            q = np.linalg.solve(C, u)
        except np.linalg.LinAlgError as exc:
            raise SolverError(str(exc), suggested_lambda=DEFAULT_LAMBDA) from exc
    else:
        reg = (lam * op.largest_singular_value) ** 2
        try:
            q = np.linalg.solve(C.T @ C + reg * np.eye(C.shape[0]), C.T @ u)
        except np.linalg.LinAlgError as exc:
            raise SolverError(str(exc), suggested_lambda=10 * lam) from exc
    f = q / op.grid.patch_area
    return TractionField(op.grid, f.reshape(op.grid.nx, op.grid.ny, 3))


def integrate_force(traction):
    """Resultant force vector (N)."""
    return traction.values.sum(axis=(0, 1)) * traction.grid.patch_area


@dataclass(frozen=True)
class RotationEstimate:
    angle: float
    curl_angle: float
    translation: tuple


def field_rotation(displacement, center=None, mask=None):
    """In-plane rigid rotation carried by a displacement field.

    ``angle`` is the least-squares (Procrustes) rotation of the masked node
    cloud; ``curl_angle`` is ``arcsin`` of half the mask-averaged discrete
    curl. Both are exact for a rigid rotation. ``translation`` is the
    displacement of ``center`` under the fitted rigid motion.
    """
    grid = displacement.grid
    if mask is None:
        mask = np.ones(grid.shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != grid.shape:
        raise DomainError(f"mask shape {mask.shape} does not match grid {grid.shape}")
    if center is None:
        center = grid.center()
    P = grid.coordinates()[mask] - np.asarray(center, dtype=float)
    if len(P) < 3:
        raise DomainError("rotation fit needs at least 3 masked nodes")
    Q = P + displacement.values[mask][:, :2]
    pc, qc = P.mean(axis=0), Q.mean(axis=0)
    P0, Q0 = P - pc, Q - qc
    sv = np.linalg.svd(P0, compute_uv=False)
    if sv[-1] <= 1e-9 * sv[0]:
        raise DomainError("masked nodes are collinear; rotation is undetermined")
    angle = math.atan2(
        np.sum(P0[:, 0] * Q0[:, 1] - P0[:, 1] * Q0[:, 0]),
        np.sum(P0[:, 0] * Q0[:, 0] + P0[:, 1] * Q0[:, 1]),
    )
    c, s = math.cos(angle), math.sin(angle)
    R = np.array([[c, -s], [s, c]])
    # rigid motion q = R p + t about center; its translation is t
    t = qc - R @ pc

    curl_angle = math.nan
    if grid.nx >= 2 and grid.ny >= 2:
        dux_dy = np.gradient(displacement.values[..., 0], grid.pitch, axis=1)
        duy_dx = np.gradient(displacement.values[..., 1], grid.pitch, axis=0)
        half_curl = 0.5 * np.mean((duy_dx - dux_dy)[mask])
        curl_angle = math.asin(min(1.0, max(-1.0, half_curl)))
    return RotationEstimate(angle, curl_angle, (float(t[0]), float(t[1])))


def rigid_rotation_field(grid, angle, center=None, stretch=1.0):
    """Displacement of a rigid in-plane rotation (optionally with isotropic stretch)."""
    if center is None:
        center = grid.center()
    p = grid.coordinates() - np.asarray(center, dtype=float)
    c, s = math.cos(angle), math.sin(angle)
    qx = stretch * (c * p[..., 0] - s * p[..., 1])
    qy = stretch * (s * p[..., 0] + c * p[..., 1])
    u = np.zeros(grid.shape + (3,))
    u[..., 0] = qx - p[..., 0]
    u[..., 1] = qy - p[..., 1]
    return DisplacementField(grid, u)
