"""Triangular meshes, edge topology and newest-vertex bisection.

Triangles are stored counter-clockwise.  Local edge ``k`` of a triangle is
the edge opposite local vertex ``k``; it runs from vertex ``(k+1) % 3`` to
vertex ``(k+2) % 3`` in counter-clockwise order.  Each triangle carries the
local index of its refinement edge (the edge opposite its newest vertex).

Examples
--------
>>> m = build_structured_mesh("square", 2)
>>> m.n_triangles, m.n_vertices
(8, 9)
>>> bisect(m, [0]).n_triangles > 8
True
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

SHAPE_REGULARITY_BOUND = 10.0


class MeshError(ValueError):
    """Raised for invalid or non-conforming meshes."""


@dataclass(frozen=True, eq=False)
class Mesh:
    """Conforming triangulation.

    Parameters
    ----------
    vertices : (V, 2) float array
    triangles : (T, 3) int array, counter-clockwise
    refine_edge : (T,) int array
        Local index (0..2) of each triangle's refinement edge.
    generation : (T,) int array
        Number of bisections separating the triangle from its initial ancestor.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    refine_edge: np.ndarray
    generation: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        t = np.ascontiguousarray(self.triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 2 or t.ndim != 2 or t.shape[1] != 3:
            raise MeshError("vertices must be (V, 2) and triangles (T, 3)")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise MeshError("triangle references a missing vertex")
        r = np.ascontiguousarray(self.refine_edge, dtype=np.int64)
        g = np.ascontiguousarray(self.generation, dtype=np.int64)
        if r.shape != (len(t),) or g.shape != (len(t),):
            raise MeshError("refine_edge and generation need one entry per triangle")
        for name, arr in (("vertices", v), ("triangles", t), ("refine_edge", r), ("generation", g)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_arrays(cls, vertices, triangles, refine_edge=None):
        """Build a mesh, orienting triangles CCW and picking longest refinement edges."""
        v = np.asarray(vertices, dtype=float)
        t = np.array(triangles, dtype=np.int64)
        area = _signed_area(v, t)
        if np.any(area == 0.0):
            raise MeshError("degenerate (zero-area) triangle")
        flip = area < 0
        t[flip] = t[flip][:, [0, 2, 1]]
        if refine_edge is None:
            refine_edge = np.argmax(_edge_lengths(v, t), axis=1)
        return cls(v, t, refine_edge, np.zeros(len(t), dtype=np.int64))

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def __len__(self):
        return self.n_triangles

    @cached_property
    def edges(self):
        return build_edges(self)

    @cached_property
    def geometry(self):
        return ElementGeometry.from_mesh(self)

    @cached_property
    def cache(self):
        """Per-mesh scratch space for derived quadrature data."""
        return {}

    @property
    def h(self):
        """Global mesh size max |tau|^(1/2)."""
        return float(self.geometry.h.max())

    def same_as(self, other):
        return (
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.triangles, other.triangles)
            and np.array_equal(self.refine_edge, other.refine_edge)
        )


def _signed_area(v, t):
    a, b, c = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def _edge_lengths(v, t):
    # column k: edge opposite local vertex k
    out = np.empty(t.shape)
    for k in range(3):
        d = v[t[:, (k + 2) % 3]] - v[t[:, (k + 1) % 3]]
        out[:, k] = np.hypot(d[:, 0], d[:, 1])
    return out


# ---------------------------------------------------------------- construction

def build_structured_mesh(domain="square", M=8):
    """Criss-cross mesh of (-1, 1)^2 or the L-shape (-1, 1)^2 minus [0, 1)^2.

    Each axis is split into ``M`` equal cells and each square cut along its
    lower-left to upper-right diagonal.
    """
    if domain not in ("square", "lshape"):
        raise MeshError(f"unknown domain {domain!r}; expected 'square' or 'lshape'")
    if int(M) != M or M < 2:
        raise MeshError("M must be an integer >= 2")
    M = int(M)
    if domain == "lshape" and M % 2:
        raise MeshError("L-shape needs an even M so the re-entrant corner is a vertex")
    x = np.linspace(-1.0, 1.0, M + 1)
    X, Y = np.meshgrid(x, x, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])
    i, j = np.meshgrid(np.arange(M), np.arange(M), indexing="xy")
    i, j = i.ravel(), j.ravel()
    if domain == "lshape":
        keep = ~((i >= M // 2) & (j >= M // 2))
        i, j = i[keep], j[keep]
    ll = j * (M + 1) + i
    lr, ul, ur = ll + 1, ll + M + 1, ll + M + 2
    # newest vertex first so that the diagonal is the refinement edge
    lower = np.column_stack([lr, ur, ll])
    upper = np.column_stack([ul, ll, ur])
    tris = np.empty((2 * len(ll), 3), dtype=np.int64)
    tris[0::2], tris[1::2] = lower, upper
    used = np.unique(tris)
    remap = np.full(len(verts), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return Mesh(verts[used], remap[tris], np.zeros(len(tris), dtype=np.int64),
                np.zeros(len(tris), dtype=np.int64))


# ---------------------------------------------------------------- topology

@dataclass(frozen=True, eq=False)
class EdgeTopology:
    """Edges of a mesh and their neighbourhood.

    ``edge_tri[e] = (t0, t1)`` with ``t1 == -1`` on the boundary and
    ``edge_local[e]`` the local edge index inside each neighbour.
    ``tri_edge[t, k]`` is the global edge opposite local vertex ``k``.
    """

    edges: np.ndarray  # (E, 2), lower vertex index first
    edge_tri: np.ndarray  # (E, 2)
    edge_local: np.ndarray  # (E, 2)
    tri_edge: np.ndarray  # (T, 3)
    tangent: np.ndarray  # (E, 2), low -> high vertex
    normal: np.ndarray  # (E, 2), tangent rotated by -90 degrees
    length: np.ndarray  # (E,)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def is_boundary(self):
        return self.edge_tri[:, 1] < 0

    @property
    def interior(self):
        return np.flatnonzero(~self.is_boundary)

    @property
    def boundary(self):
        return np.flatnonzero(self.is_boundary)


def build_edges(mesh):
    """Enumerate edges in order of first appearance; raise on non-conforming input."""
    t = mesh.triangles
    T = len(t)
    a = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])  # local edge 0, 1, 2
    b = np.concatenate([t[:, 2], t[:, 0], t[:, 1]])
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    owner = np.tile(np.arange(T), 3)
    local = np.repeat(np.arange(3), T)
    # order half-edges by (triangle, local edge) so numbering follows insertion order
    order = np.lexsort((local, owner))
    lo, hi, owner, local = lo[order], hi[order], owner[order], local[order]
    key = lo * mesh.n_vertices + hi
    uniq, first, inverse, counts = np.unique(key, return_index=True, return_inverse=True,
                                             return_counts=True)
    if np.any(counts > 2):
        raise MeshError("non-conforming mesh: an edge is shared by more than two triangles")
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(uniq))
    eid = rank[inverse]
    E = len(uniq)
    edge_tri = np.full((E, 2), -1, dtype=np.int64)
    edge_local = np.full((E, 2), -1, dtype=np.int64)
    # half-edges are visited in increasing (owner, local): the first one fills slot 0
    _, firsts = np.unique(eid, return_index=True)
    is_first = np.zeros(len(eid), dtype=bool)
    is_first[firsts] = True
    for slot, sel in enumerate((is_first, ~is_first)):
        edge_tri[eid[sel], slot] = owner[sel]
        edge_local[eid[sel], slot] = local[sel]
    edges = np.empty((E, 2), dtype=np.int64)
    edges[eid, 0] = lo
    edges[eid, 1] = hi
    tri_edge = np.empty((T, 3), dtype=np.int64)
    tri_edge[owner, local] = eid
    d = mesh.vertices[edges[:, 1]] - mesh.vertices[edges[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    tangent = d / length[:, None]
    normal = np.column_stack([tangent[:, 1], -tangent[:, 0]])
    return EdgeTopology(edges, edge_tri, edge_local, tri_edge, tangent, normal, length)


# ---------------------------------------------------------------- geometry

@dataclass(frozen=True, eq=False)
class ElementGeometry:
    """Vectorised per-triangle geometry.

    ``normal[t, k]`` is the outward unit normal of local edge ``k`` and
    ``tangent[t, k]`` the counter-clockwise unit tangent (normal rotated +90 deg).
    """

    area: np.ndarray
    h: np.ndarray
    centroid: np.ndarray
    normal: np.ndarray
    tangent: np.ndarray
    edge_length: np.ndarray

    @classmethod
    def from_mesh(cls, mesh):
        v, t = mesh.vertices, mesh.triangles
        area = _signed_area(v, t)
        if np.any(area <= 0.0):
            raise MeshError("degenerate or clockwise triangle")
        tangent = np.empty((len(t), 3, 2))
        length = np.empty((len(t), 3))
        for k in range(3):
            d = v[t[:, (k + 2) % 3]] - v[t[:, (k + 1) % 3]]
            length[:, k] = np.hypot(d[:, 0], d[:, 1])
            tangent[:, k] = d / length[:, k, None]
        normal = np.stack([tangent[..., 1], -tangent[..., 0]], axis=-1)
        centroid = v[t].mean(axis=1)
        return cls(area, np.sqrt(area), centroid, normal, tangent, length)

    def __getitem__(self, idx):
        return ElementGeometry(self.area[idx], self.h[idx], self.centroid[idx],
                               self.normal[idx], self.tangent[idx], self.edge_length[idx])


def element_geometry(mesh, tau):
    """Geometry of a single triangle: area, h = sqrt(area), centroid, normals, tangents."""
    if not 0 <= tau < mesh.n_triangles:
        raise IndexError(f"triangle index {tau} out of range")
    return mesh.geometry[tau]


def shape_ratio(mesh):
    """Circumradius over inradius for every triangle (2 for equilateral)."""
    L = _edge_lengths(mesh.vertices, mesh.triangles)
    area = _signed_area(mesh.vertices, mesh.triangles)
    s = 0.5 * L.sum(axis=1)
    R = L.prod(axis=1) / (4.0 * area)
    r = area / s
    return R / r


def min_angle(mesh):
    """Smallest interior angle of the mesh in radians."""
    L = _edge_lengths(mesh.vertices, mesh.triangles)
    a, b, c = L[:, 0], L[:, 1], L[:, 2]
    ang = np.stack([
        np.arccos(np.clip((b * b + c * c - a * a) / (2 * b * c), -1, 1)),
        np.arccos(np.clip((a * a + c * c - b * b) / (2 * a * c), -1, 1)),
        np.arccos(np.clip((a * a + b * b - c * c) / (2 * a * b), -1, 1)),
    ], axis=1)
    return float(ang.min())


# ---------------------------------------------------------------- refinement

def _rotate_newest_first(mesh):
    # put the vertex opposite the refinement edge in local slot 0 (rotation keeps CCW)
    t, r = mesh.triangles, mesh.refine_edge
    idx = (r[:, None] + np.arange(3)[None, :]) % 3
    return np.take_along_axis(t, idx, axis=1)


def bisect(mesh, marked):
    """Newest-vertex bisection of ``marked`` triangles plus conforming closure.

    Returns a new mesh; an empty marking returns ``mesh`` itself.
    """
    marked = np.unique(np.asarray(marked, dtype=np.int64).ravel())
    if marked.size == 0:
        return mesh
    if marked.min() < 0 or marked.max() >= mesh.n_triangles:
        raise IndexError("marked triangle index out of range")
    topo = mesh.edges
    tri = _rotate_newest_first(mesh)
    ref_edge = topo.tri_edge[np.arange(mesh.n_triangles), mesh.refine_edge]

    # closure: any triangle with a marked edge must have its refinement edge marked
    cut = np.zeros(topo.n_edges, dtype=bool)
    cut[ref_edge[marked]] = True
    while True:
        needs = cut[topo.tri_edge].any(axis=1) & ~cut[ref_edge]
        if not needs.any():
            break
        cut[ref_edge[needs]] = True

    # midpoints, numbered by edge index
    cut_ids = np.flatnonzero(cut)
    V = mesh.n_vertices
    ends = topo.edges[cut_ids]
    mids = 0.5 * (mesh.vertices[ends[:, 0]] + mesh.vertices[ends[:, 1]])
    vertices = np.vstack([mesh.vertices, mids])
    stride = V + len(cut_ids)
    mid_keys = ends[:, 0] * stride + ends[:, 1]
    key_order = np.argsort(mid_keys)
    mid_keys = mid_keys[key_order]
    mid_ids = V + key_order

    def midpoint_of(a, b):
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        key = lo * stride + hi
        pos = np.searchsorted(mid_keys, key)
        pos = np.minimum(pos, len(mid_keys) - 1)
        hit = mid_keys[pos] == key
        return np.where(hit, mid_ids[pos], -1)

    gen = mesh.generation.copy()
    # repeatedly split triangles whose refinement edge (local 1-2) carries a midpoint
    while True:
        m = midpoint_of(tri[:, 1], tri[:, 2])
        split = m >= 0
        if not split.any():
            break
        keep = ~split
        s_tri, s_mid, s_gen = tri[split], m[split], gen[split] + 1
        v0, v1, v2 = s_tri[:, 0], s_tri[:, 1], s_tri[:, 2]
        left = np.column_stack([s_mid, v0, v1])
        right = np.column_stack([s_mid, v2, v0])
        children = np.empty((2 * len(s_tri), 3), dtype=np.int64)
        children[0::2], children[1::2] = left, right
        # children replace their parent in place to keep ordering deterministic
        n_out = np.where(split, 2, 1)
        pos = np.concatenate([[0], np.cumsum(n_out)[:-1]])
        new_tri = np.empty((n_out.sum(), 3), dtype=np.int64)
        new_gen = np.empty(n_out.sum(), dtype=np.int64)
        new_tri[pos[keep]] = tri[keep]
        new_gen[pos[keep]] = gen[keep]
        sp = pos[split]
        new_tri[sp] = left
        new_tri[sp + 1] = right
        new_gen[sp] = s_gen
        new_gen[sp + 1] = s_gen
        tri, gen = new_tri, new_gen
    return Mesh(vertices, tri, np.zeros(len(tri), dtype=np.int64), gen)


def uniform_refine(mesh, times=1):
    for _ in range(times):
        mesh = bisect(mesh, np.arange(mesh.n_triangles))
    return mesh


def check_conforming(mesh, tol=1e-12):
    """Raise MeshError on hanging nodes or a non-disc topology; return the edges."""
    topo = build_edges(mesh)
    E, T, V = topo.n_edges, mesh.n_triangles, mesh.n_vertices
    if V - E + T != 1:
        raise MeshError(f"Euler characteristic V-E+T = {V - E + T}, expected 1")
    # a hanging node shows up as a vertex inside an edge with a single neighbour
    bnd = topo.edges[topo.boundary]
    cand = np.unique(bnd)
    a, b = mesh.vertices[bnd[:, 0]], mesh.vertices[bnd[:, 1]]
    p = mesh.vertices[cand]
    d = b - a
    L2 = (d * d).sum(axis=1)
    rel = p[None, :, :] - a[:, None, :]
    s = (rel * d[:, None, :]).sum(axis=2) / L2[:, None]
    cross = rel[..., 0] * d[:, None, 1] - rel[..., 1] * d[:, None, 0]
    inside = (s > tol) & (s < 1 - tol) & (np.abs(cross) <= tol * L2[:, None])
    if inside.any():
        raise MeshError("hanging node detected")
    return topo


# ---------------------------------------------------------------- serialisation

def write_mesh(mesh, path):
    """Write ``V T`` then ``x y`` lines then ``i j k b`` lines (b = generation)."""
    with open(path, "w") as fh:
        fh.write(f"{mesh.n_vertices} {mesh.n_triangles}\n")
        for x, y in mesh.vertices.tolist():
            fh.write(f"{x!r} {y!r}\n")
        tri = _rotate_newest_first(mesh)
        for (i, j, k), b in zip(tri, mesh.generation):
            fh.write(f"{i} {j} {k} {b}\n")


def read_mesh(path):
    """Read the format of :func:`write_mesh`; the first vertex of each line is the newest."""
    with open(path) as fh:
        V, T = map(int, fh.readline().split())
        verts = np.array([list(map(float, fh.readline().split())) for _ in range(V)]).reshape(V, 2)
        rows = np.array([list(map(int, fh.readline().split())) for _ in range(T)],
                        dtype=np.int64).reshape(T, 4)
    return Mesh(verts, rows[:, :3], np.zeros(T, dtype=np.int64), rows[:, 3])
