"""Exact sparse matrices and the elimination-based operations built on them.

Matrices are stored column-major: ``cols[j]`` is a dict ``{i: value}`` of the
nonzero entries of column ``j``.  Maps between based vector spaces are
written as matrices acting on column vectors, so ``(A @ B)`` is "B then A".
"""

from __future__ import annotations

from . import kernels
from .field import QQ, Field


class SparseMatrix:
    __slots__ = ("nrows", "ncols", "field", "cols")

    def __init__(self, nrows: int, ncols: int, field: Field = QQ, cols=None, *, check=False):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        self.cols = cols if cols is not None else {}
        if check:
            self._check()

    def _check(self):
        for j, col in self.cols.items():
            if not 0 <= j < self.ncols:
                raise IndexError(f"column {j} out of range")
            if not col:
                raise ValueError("empty stored column")
            for i, x in col.items():
                if not 0 <= i < self.nrows:
                    raise IndexError(f"row {i} out of range")
                if not x:
                    raise ValueError("stored zero")

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, nrows, ncols, field=QQ):
        return cls(nrows, ncols, field)

    @classmethod
    def identity(cls, n, field=QQ):
        one = field.one
        return cls(n, n, field, {j: {j: one} for j in range(n)})

    @classmethod
    def from_entries(cls, nrows, ncols, entries, field=QQ):
        """Build from ``(row, col, value)`` triples; duplicates are summed."""
        cols = {}
        for i, j, x in entries:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError(f"entry ({i},{j}) outside {nrows}x{ncols}")
            x = field.coerce(x)
            col = cols.setdefault(j, {})
            y = field.add(col.get(i, field.zero), x)
            if y:
                col[i] = y
            else:
                col.pop(i, None)
        return cls(nrows, ncols, field, {j: c for j, c in cols.items() if c})

    @classmethod
    def from_dense(cls, rows, field=QQ, ncols=None):
        rows = [list(r) for r in rows]
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        ent = [(i, j, x) for i, r in enumerate(rows) for j, x in enumerate(r) if x]
        return cls.from_entries(nrows, ncols, ent, field)

    @classmethod
    def from_columns(cls, nrows, columns, field=QQ):
        """Columns given as sparse dicts, in order."""
        cols = {j: dict(c) for j, c in enumerate(columns) if c}
        return cls(nrows, len(columns), field, cols)

    # access -------------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def nnz(self):
        return sum(len(c) for c in self.cols.values())

    def is_zero(self):
        return not self.cols

    def column(self, j):
        return self.cols.get(j, {})

    def entries(self):
        """Canonical sorted list of ``(row, col, value)``."""
        out = [(i, j, x) for j, c in self.cols.items() for i, x in c.items()]
        out.sort(key=lambda t: (t[0], t[1]))
        return out

    def __getitem__(self, ij):
        i, j = ij
        return self.cols.get(j, {}).get(i, self.field.zero)

    def to_dense(self):
        z = self.field.zero
        out = [[z] * self.ncols for _ in range(self.nrows)]
        for j, c in self.cols.items():
            for i, x in c.items():
                out[i][j] = x
        return out

    def rows(self):
        """Row-major view: list of dicts ``{col: value}``."""
        rows = [dict() for _ in range(self.nrows)]
        for j, c in self.cols.items():
            for i, x in c.items():
                rows[i][j] = x
        return rows

    # algebra ------------------------------------------------------------
    def apply(self, v):
        acc = {}
        p = self.field.p
        for k, x in v.items():
            c = self.cols.get(k)
            if c:
                kernels.axpy(acc, x, c, p)
        return acc

    def __matmul__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = kernels.matmul_cols(self.cols, other.cols, self.field.p)
        return SparseMatrix(self.nrows, other.ncols, self.field, cols)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        p = self.field.p
        cols = {j: dict(c) for j, c in self.cols.items()}
        for j, c in other.cols.items():
            t = cols.setdefault(j, {})
            kernels.axpy(t, self.field.one, c, p)
            if not t:
                del cols[j]
        return SparseMatrix(self.nrows, self.ncols, self.field, cols)

    def scale(self, a):
        a = self.field.coerce(a)
        if not a:
            return SparseMatrix(self.nrows, self.ncols, self.field)
        f = self.field
        cols = {j: {i: f.mul(a, x) for i, x in c.items()} for j, c in self.cols.items()}
        return SparseMatrix(self.nrows, self.ncols, self.field, cols)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    @property
    def T(self):
        cols = {}
        for j, c in self.cols.items():
            for i, x in c.items():
                cols.setdefault(i, {})[j] = x
        return SparseMatrix(self.ncols, self.nrows, self.field, cols)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def __hash__(self):  # pragma: no cover - matrices are compared, not hashed
        return hash((self.shape, len(self.cols)))

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()}, {self.field!r})"

    def select_columns(self, idx):
        cols = {}
        for new, old in enumerate(idx):
            c = self.cols.get(old)
            if c:
                cols[new] = dict(c)
        return SparseMatrix(self.nrows, len(idx), self.field, cols)

    def select_rows(self, idx):
        pos = {old: new for new, old in enumerate(idx)}
        cols = {}
        for j, c in self.cols.items():
            d = {pos[i]: x for i, x in c.items() if i in pos}
            if d:
                cols[j] = d
        return SparseMatrix(len(idx), self.ncols, self.field, cols)


def hstack(mats, nrows=None, field=None):
    if not mats:
        return SparseMatrix(nrows or 0, 0, field or QQ)
    nrows = mats[0].nrows
    cols = {}
    off = 0
    for m in mats:
        if m.nrows != nrows:
            raise ValueError("hstack row mismatch")
        for j, c in m.cols.items():
            cols[off + j] = dict(c)
        off += m.ncols
    return SparseMatrix(nrows, off, mats[0].field, cols)


def vstack(mats):
    ncols = mats[0].ncols
    cols = {}
    off = 0
    for m in mats:
        if m.ncols != ncols:
            raise ValueError("vstack column mismatch")
        for j, c in m.cols.items():
            t = cols.setdefault(j, {})
            for i, x in c.items():
                t[off + i] = x
        off += m.nrows
    return SparseMatrix(off, ncols, mats[0].field, cols)


def block_diag(mats, field=QQ):
    cols = {}
    r = c = 0
    for m in mats:
        for j, col in m.cols.items():
            cols[c + j] = {r + i: x for i, x in col.items()}
        r += m.nrows
        c += m.ncols
    return SparseMatrix(r, c, mats[0].field if mats else field, cols)


# elimination ------------------------------------------------------------

def echelon_of_rows(rows, field):
    """Reduced echelon data of a list of sparse row dicts."""
    return kernels.echelonize(rows, field.p)


def rref(M: SparseMatrix):
    """Reduced row echelon form: ``(rank, pivot_cols, R)``."""
    piv, _ = kernels.echelonize(M.rows(), M.field.p)
    pivots = sorted(piv)
    cols = {}
    for r, c in enumerate(pivots):
        for j, x in piv[c].items():
            cols.setdefault(j, {})[r] = x
    R = SparseMatrix(M.nrows, M.ncols, M.field, cols)
    return len(pivots), pivots, R


def rank(M: SparseMatrix) -> int:
    # column span and row span have equal dimension; use the thinner side
    if M.ncols <= M.nrows:
        piv, _ = kernels.echelonize(list(M.cols.values()), M.field.p)
    else:
        piv, _ = kernels.echelonize(M.rows(), M.field.p)
    return len(piv)


def _kernel_from_echelon(piv, occ, n, field):
    one = field.one
    free = [c for c in range(n) if c not in piv]
    neg = field.neg
    columns = []
    for f in free:
        v = {f: one}
        for pc in occ.get(f, ()):
            v[pc] = neg(piv[pc][f])
        columns.append(v)
    return free, columns


def kernel_basis(M: SparseMatrix) -> SparseMatrix:
    """Columns form a basis of ``{x : M x = 0}``.

    Basis vector ``t`` has a 1 in the ``t``-th free column and 0 in every
    other free column, so coordinates of a kernel element are read off at
    the free columns (see :func:`kernel_data`).
    """
    return kernel_data(M)[1]


def kernel_data(M: SparseMatrix):
    """``(free_cols, basis)`` for the kernel of ``M``."""
    piv, occ = kernels.echelonize(M.rows(), M.field.p)
    free, columns = _kernel_from_echelon(piv, occ, M.ncols, M.field)
    return free, SparseMatrix.from_columns(M.ncols, columns, M.field)


def kernel_of_rows(rows, ncols, field):
    """Kernel basis of the matrix whose rows are the given sparse dicts."""
    piv, occ = kernels.echelonize(rows, field.p)
    free, columns = _kernel_from_echelon(piv, occ, ncols, field)
    return free, columns


def image_basis(M: SparseMatrix):
    """Reduced echelon basis (as columns) of the column span of ``M``."""
    piv, _ = kernels.echelonize(list(M.cols.values()), M.field.p)
    return SparseMatrix.from_columns(M.nrows, [piv[c] for c in sorted(piv)], M.field)


class Quotient:
    """Quotient of ``field^ambient`` by a subspace, with a chosen section.

    Quotient coordinates are the non-pivot ("free") ambient coordinates of
    the reduced echelon basis of the subspace, in increasing order, so the
    section sends quotient basis vectors to ambient basis vectors.
    """

    __slots__ = ("ambient", "field", "piv", "free", "pos")

    def __init__(self, ambient, piv, field):
        self.ambient = ambient
        self.field = field
        self.piv = piv
        self.free = [c for c in range(ambient) if c not in piv]
        self.pos = {c: k for k, c in enumerate(self.free)}

    @classmethod
    def of_vectors(cls, ambient, vectors, field):
        for v in vectors:
            for c in v:
                if not 0 <= c < ambient:
                    raise ValueError(f"subspace vector has index {c} outside ambient dim {ambient}")
        piv, _ = kernels.echelonize(vectors, field.p)
        return cls(ambient, piv, field)

    @property
    def dim(self):
        return len(self.free)

    def project(self, v):
        """Quotient coordinates of an ambient sparse vector."""
        if self.piv:
            v = kernels.reduce_vec(v, self.piv, self.field.p)
        pos = self.pos
        return {pos[c]: x for c, x in v.items()}

    def lift(self, q):
        free = self.free
        return {free[k]: x for k, x in q.items()}

    def proj_matrix(self):
        cols = {}
        one = self.field.one
        for c in range(self.ambient):
            if c in self.pos:
                cols[c] = {self.pos[c]: one}
            else:
                col = self.project({c: one})
                if col:
                    cols[c] = col
        return SparseMatrix(self.dim, self.ambient, self.field, cols)

    def section_matrix(self):
        one = self.field.one
        return SparseMatrix(self.ambient, self.dim, self.field,
                            {k: {c: one} for k, c in enumerate(self.free)})


def quotient(ambient_dim: int, sub_basis: SparseMatrix):
    """``(proj, section)`` for ``field^ambient / colspan(sub_basis)``."""
    if sub_basis.nrows != ambient_dim:
        raise ValueError(f"sub_basis has {sub_basis.nrows} rows, ambient dimension is {ambient_dim}")
    q = Quotient.of_vectors(ambient_dim, list(sub_basis.cols.values()), sub_basis.field)
    return q.proj_matrix(), q.section_matrix()


def solve(A: SparseMatrix, b):
    """One solution ``x`` of ``A x = b`` (sparse dict), or ``None``."""
    f = A.field
    rows = A.rows()
    n = A.ncols
    aug = []
    for i, r in enumerate(rows):
        r = dict(r)
        if b.get(i):
            r[n] = b[i]
        aug.append(r)
    piv, _ = kernels.echelonize(aug, f.p)
    if n in piv:
        return None
    x = {}
    for c, row in piv.items():
        val = row.get(n)
        if val:
            x[c] = val
    return x


def in_span(vectors, v, field):
    piv, _ = kernels.echelonize(vectors, field.p)
    return not kernels.reduce_vec(v, piv, field.p)
