"""
Triangle mesh container and topology queries.

Adjacency is derived once from a sparse face/vertex incidence matrix and cached
on the instance. Queries return sorted index arrays.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.sparse as sp

_TOPOLOGY_CACHE = (
    "incidence",
    "_face_overlap",
    "vertex_face_table",
    "edge_adjacency",
    "vertex_adjacency",
    "edge_face_table",
    "vertex_face_counts",
    "edges",
    "interior_edges",
    "vertex_neighbors_matrix",
)


def padded_rows(matrix: sp.spmatrix) -> np.ndarray:
    """Row-wise column indices of a sparse matrix as an (n, max_degree) table padded with -1."""
    m = sp.csr_matrix(matrix)
    m.sort_indices()
    counts = np.diff(m.indptr)
    width = int(counts.max()) if counts.size else 0
    table = np.full((m.shape[0], width), -1, dtype=np.int64)
    if m.nnz:
        rows = np.repeat(np.arange(m.shape[0]), counts)
        slots = np.arange(m.nnz) - np.repeat(m.indptr[:-1], counts)
        table[rows, slots] = m.indices
    return table


def _row(table: np.ndarray, index: int) -> np.ndarray:
    r = table[index]
    return r[r >= 0]


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray
    faces: np.ndarray
    # source decimal strings, (N, 3), kept for k* detection
    coordinate_text: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=np.float64).reshape(-1, 3)
        faces = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        n = vertices.shape[0]
        if faces.size:
            if faces.min() < 0 or faces.max() >= n:
                raise ValueError(f"face index out of range [0, {n})")
            if np.any((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])):
                raise ValueError("face repeats a vertex index")
        vertices.flags.writeable = False
        faces.flags.writeable = False
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "faces", faces)
        if self.coordinate_text is not None:
            text = np.asarray(self.coordinate_text, dtype=str).reshape(-1, 3)
            if text.shape[0] != n:
                raise ValueError("coordinate_text does not match vertex count")
            object.__setattr__(self, "coordinate_text", text)

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_faces(self) -> int:
        return int(self.faces.shape[0])

    def with_vertices(self, vertices: np.ndarray) -> "Mesh":
        """Same topology, new coordinates. Cached adjacency is shared."""
        other = Mesh(vertices, self.faces)
        for name in _TOPOLOGY_CACHE:
            if name in self.__dict__:
                other.__dict__[name] = self.__dict__[name]
        return other

    # -- derived topology ------------------------------------------------

    @cached_property
    def incidence(self) -> sp.csr_matrix:
        """(F, N) face/vertex incidence."""
        f = self.n_faces
        rows = np.repeat(np.arange(f), 3)
        data = np.ones(3 * f, dtype=np.int32)
        return sp.csr_matrix((data, (rows, self.faces.ravel())), shape=(f, self.n_vertices))

    @cached_property
    def vertex_face_table(self) -> np.ndarray:
        return padded_rows(self.incidence.T)

    @cached_property
    def vertex_face_counts(self) -> np.ndarray:
        return np.asarray(self.incidence.sum(axis=0)).ravel().astype(np.int64)

    @cached_property
    def _face_overlap(self) -> sp.coo_matrix:
        # shared-vertex counts between distinct faces
        shared = (self.incidence @ self.incidence.T).tocoo()
        off = shared.row != shared.col
        return sp.coo_matrix((shared.data[off], (shared.row[off], shared.col[off])), shape=shared.shape)

    @cached_property
    def edge_adjacency(self) -> np.ndarray:
        o = self._face_overlap
        keep = o.data == 2
        m = sp.coo_matrix((o.data[keep], (o.row[keep], o.col[keep])), shape=o.shape)
        return padded_rows(m)

    @cached_property
    def vertex_adjacency(self) -> np.ndarray:
        return padded_rows(self._face_overlap)

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique undirected edges (E, 2), lower index first."""
        if self.n_faces == 0:
            return np.zeros((0, 2), dtype=np.int64)
        f = self.faces
        pairs = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        pairs.sort(axis=1)
        return np.unique(pairs, axis=0)

    @cached_property
    def edge_face_table(self) -> np.ndarray:
        """Faces incident to each edge of `edges`, (E, max) padded with -1."""
        edges = self.edges
        if edges.shape[0] == 0:
            return np.zeros((0, 0), dtype=np.int64)
        f = self.faces
        pairs = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        pairs.sort(axis=1)
        owner = np.tile(np.arange(self.n_faces), 3)
        n = self.n_vertices
        edge_ids = np.searchsorted(edges[:, 0] * n + edges[:, 1], pairs[:, 0] * n + pairs[:, 1])
        m = sp.coo_matrix((np.ones(owner.size, dtype=np.int32), (edge_ids, owner)),
                          shape=(edges.shape[0], self.n_faces))
        return padded_rows(m)

    @cached_property
    def interior_edges(self) -> np.ndarray:
        """(edge index, face a, face b) for edges with exactly two incident faces."""
        table = self.edge_face_table
        if table.shape[0] == 0 or table.shape[1] < 2:
            return np.zeros((0, 3), dtype=np.int64)
        count = (table >= 0).sum(axis=1)
        idx = np.flatnonzero(count == 2)
        return np.column_stack([idx, table[idx, 0], table[idx, 1]])

    @cached_property
    def vertex_neighbors_matrix(self) -> sp.csr_matrix:
        """(N, N) binary 1-ring vertex adjacency."""
        e = self.edges
        n = self.n_vertices
        data = np.ones(2 * e.shape[0], dtype=np.float64)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    # -- queries ---------------------------------------------------------

    def _check_vertex(self, v: int):
        if not 0 <= v < self.n_vertices:
            raise IndexError(f"vertex {v} out of range [0, {self.n_vertices})")

    def _check_face(self, f: int):
        if not 0 <= f < self.n_faces:
            raise IndexError(f"face {f} out of range [0, {self.n_faces})")

    def one_ring_faces(self, v: int) -> np.ndarray:
        self._check_vertex(v)
        return _row(self.vertex_face_table, v)

    def edge_adjacent_faces(self, f: int) -> np.ndarray:
        self._check_face(f)
        return _row(self.edge_adjacency, f)

    def vertex_adjacent_faces(self, f: int) -> np.ndarray:
        self._check_face(f)
        return _row(self.vertex_adjacency, f)

    def vertex_neighbors(self, v: int) -> np.ndarray:
        self._check_vertex(v)
        m = self.vertex_neighbors_matrix
        return np.sort(m.indices[m.indptr[v]:m.indptr[v + 1]]).astype(np.int64)
