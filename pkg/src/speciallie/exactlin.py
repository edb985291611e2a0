"""Exact sparse linear algebra over Z and Q.

Vectors are sparse dicts ``{column: value}`` with ``int`` or ``Fraction``
values; dense lists are accepted wherever a vector is expected.  Nothing here
ever touches floating point.

Two elimination engines are provided:

* :class:`Echelon` works over Q with fraction-free integer rows (content is
  divided out after every step).  It gives ranks, kernels and rational
  coordinates.
* :class:`IntEchelon` keeps a Hermite-style basis of a Z-lattice, combining
  rows with extended gcd steps so that every operation is unimodular.  It
  gives Z-bases, Z-membership and, together with :func:`smith_normal_form`,
  quotient presentations.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

__all__ = [
    "SparseMatrix", "Echelon", "IntEchelon", "Lattice", "QuotientPresentation",
    "MembershipResult", "rank", "kernel_basis", "kernel_lattice", "smith_normal_form",
    "quotient_presentation", "quotient_from_relations", "membership", "separating_covector",
    "as_sparse", "to_dense", "primitive",
]


# ------------------------------------------------------------- vectors

def as_sparse(v) -> dict:
    if isinstance(v, Mapping):
        return {k: x for k, x in v.items() if x}
    return {i: x for i, x in enumerate(v) if x}


def to_dense(v: Mapping, n: int) -> list:
    out = [0] * n
    for k, x in v.items():
        out[k] = x
    return out


def _canon(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _integerize(v: Mapping) -> tuple[dict, int]:
    """Scale a rational vector to integers; returns (w, s) with w = s*v."""
    den = 1
    for x in v.values():
        if isinstance(x, Fraction):
            den = den * x.denominator // gcd(den, x.denominator)
    if den == 1:
        return {k: int(x) for k, x in v.items() if x}, 1
    return {k: int(x * den) for k, x in v.items() if x}, den


def primitive(v: Mapping) -> dict:
    """Integer multiple of ``v`` with coprime entries and first nonzero entry positive."""
    w, _ = _integerize(v)
    if not w:
        return {}
    g = gcd(*w.values())
    if w[min(w)] < 0:
        g = -g
    return {k: x // g for k, x in w.items()}


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    # g = x*a + y*b with g > 0
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _axpy(v: dict, a: int, r: Mapping, heap=None, watch=None) -> None:
    """v += a*r in place; new keys found in ``watch`` are pushed onto ``heap``."""
    if not a:
        return
    for k, x in r.items():
        cur = v.get(k)
        if cur is None:
            v[k] = a * x
            if heap is not None and k in watch:
                heapq.heappush(heap, k)
        else:
            nv = cur + a * x
            if nv:
                v[k] = nv
            else:
                del v[k]


# --------------------------------------------------------- SparseMatrix

class SparseMatrix:
    """Fixed-size matrix with exact entries; zero entries are never stored."""

    def __init__(self, nrows: int, ncols: int, entries: Mapping | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative dimensions")
        self.nrows, self.ncols = nrows, ncols
        self._rows: list[dict] = [dict() for _ in range(nrows)]
        for (i, j), x in (entries or {}).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError(f"entry ({i},{j}) outside {nrows}x{ncols}")
            x = _canon(x)
            if x:
                self._rows[i][j] = x

    @classmethod
    def from_rows(cls, rows: Iterable, ncols: int | None = None) -> "SparseMatrix":
        rows = [as_sparse(r) if isinstance(r, Mapping) else list(r) for r in rows]
        if ncols is None:
            widths = [len(r) for r in rows if isinstance(r, list)]
            keys = [max(r) + 1 for r in rows if isinstance(r, dict) and r]
            ncols = max(widths + keys, default=0)
        m = cls(len(rows), ncols)
        for i, r in enumerate(rows):
            r = as_sparse(r)
            if r and max(r) >= ncols:
                raise IndexError("row longer than ncols")
            m._rows[i] = {k: _canon(x) for k, x in r.items()}
        return m

    @property
    def entries(self) -> dict:
        return {(i, j): x for i, r in enumerate(self._rows) for j, x in r.items()}

    def row(self, i: int) -> dict:
        return dict(self._rows[i])

    def rows(self) -> list[dict]:
        return [dict(r) for r in self._rows]

    def transpose(self) -> "SparseMatrix":
        t = SparseMatrix(self.ncols, self.nrows)
        for i, r in enumerate(self._rows):
            for j, x in r.items():
                t._rows[j][i] = x
        return t

    def to_dense(self) -> list[list]:
        return [to_dense(r, self.ncols) for r in self._rows]

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for r in self._rows for x in r.values())

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self._rows) == (other.nrows, other.ncols, other._rows)

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={sum(map(len, self._rows))})"


def _matrix_rows(m) -> tuple[list[dict], int]:
    if isinstance(m, SparseMatrix):
        return m.rows(), m.ncols
    rows = [as_sparse(r) for r in m]
    return rows, max((max(r) + 1 for r in rows if r), default=0)


# -------------------------------------------------------------- Echelon

class Echelon:
    """Incremental row echelon form over Q.

    Stored rows are primitive integer vectors with a positive leading entry;
    they are keyed by their leading column.  With ``track=True`` every stored
    row remembers how it is built from the inserted vectors, so reductions
    can report rational coordinates.
    """

    def __init__(self, track: bool = False):
        self.rows: dict[int, dict] = {}
        self.track = track
        self.combos: dict[int, dict] = {}
        self.count = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def _reduce(self, v: dict, combo: dict | None, scale):
        rows = self.rows
        heap = [c for c in v if c in rows]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            a = v.get(c)
            if not a:
                continue
            r = rows[c]
            p = r[c]
            g = gcd(a, p)
            pa, aa = p // g, a // g
            if pa != 1:
                for k in v:
                    v[k] *= pa
                if combo is not None:
                    scale *= pa
                    for k in combo:
                        combo[k] *= pa
            _axpy(v, -aa, r, heap, rows)
            if combo is not None:
                for j, q in self.combos[c].items():
                    nq = combo.get(j, 0) - aa * q
                    if nq:
                        combo[j] = nq
                    else:
                        combo.pop(j, None)
            if pa != 1 and v:
                h = gcd(*v.values())
                if h > 1:
                    for k in v:
                        v[k] //= h
                    if combo is not None:
                        scale = Fraction(scale, h)
                        for k in combo:
                            combo[k] = Fraction(combo[k], h)
        return v, combo, scale

    def reduce(self, v) -> dict:
        """Residual of ``v`` after eliminating every pivot column (integer, up to scale)."""
        w, _ = _integerize(as_sparse(v))
        return self._reduce(w, None, 1)[0]

    def solve(self, v):
        """Rational coordinates of ``v`` in the inserted vectors, or None if outside the span."""
        if not self.track:
            raise RuntimeError("Echelon was built without tracking")
        w, s = _integerize(as_sparse(v))
        # invariant: residual = scale*v + sum_j combo_j * g_j
        res, combo, scale = self._reduce(w, {}, s)
        if res:
            return None
        return {j: _canon(Fraction(-q) / scale) for j, q in combo.items() if q}

    def add(self, v) -> bool:
        """Insert ``v``; returns True when it was independent of the stored rows."""
        idx = self.count
        self.count += 1
        w, s = _integerize(as_sparse(v))
        if self.track:
            res, combo, scale = self._reduce(w, {}, s)
        else:
            res, combo, scale = self._reduce(w, None, 1)
        if not res:
            return False
        h = gcd(*res.values())
        c = min(res)
        if res[c] < 0:
            h = -h
        if h != 1:
            res = {k: x // h for k, x in res.items()}
        self.rows[c] = res
        if self.track:
            # res_old = scale*v + sum combo_j g_j ; stored row = res_old / h
            comb = {j: Fraction(q) / h for j, q in combo.items() if q}
            comb[idx] = Fraction(scale) / h
            self.combos[c] = comb
        return True

    def extend(self, vectors: Iterable) -> int:
        return sum(1 for v in vectors if self.add(v))

    def rref(self) -> dict[int, dict]:
        """Reduced rows: pivot entry 1, zeros in every other pivot column (rational)."""
        out: dict[int, dict] = {}
        for c in sorted(self.rows, reverse=True):
            r = dict(self.rows[c])
            p = r[c]
            for c2 in sorted(k for k in r if k != c and k in out):
                a = r.get(c2)
                if a:
                    _axpy(r, -a, out[c2])
            out[c] = {k: _canon(Fraction(x, p)) if isinstance(x, int) else _canon(x / p)
                      for k, x in r.items()}
        return out


# ----------------------------------------------------------- IntEchelon

class IntEchelon:
    """Hermite-style echelon basis of a Z-lattice.

    Each stored row has a positive leading entry and is keyed by its leading
    column.  Insertion uses only unimodular row operations, so the stored rows
    always form a Z-basis of the lattice generated so far.
    """

    def __init__(self, track: bool = False):
        self.rows: dict[int, dict] = {}
        self.track = track
        self.combos: dict[int, dict] = {}
        self.count = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def add(self, v) -> bool:
        v = as_sparse(v)
        if any(not isinstance(x, int) for x in v.values()):
            raise ValueError("IntEchelon needs integer vectors")
        idx = self.count
        self.count += 1
        combo = {idx: 1} if self.track else None
        grew = False
        rows = self.rows
        heap = list(v)
        heapq.heapify(heap)
        while v:
            c = heapq.heappop(heap)
            a = v.get(c)
            if not a:
                continue
            r = rows.get(c)
            if r is None:
                if a < 0:
                    v = {k: -x for k, x in v.items()}
                    if combo is not None:
                        combo = {k: -x for k, x in combo.items()}
                rows[c] = v
                if combo is not None:
                    self.combos[c] = combo
                return True
            p = r[c]
            if a % p == 0:
                _axpy(v, -(a // p), r, heap, _ALL)
                if combo is not None:
                    _axpy(combo, -(a // p), self.combos[c])
                continue
            g, x, y = _xgcd(p, a)
            new = {}
            _axpy(new, x, r)
            _axpy(new, y, v)
            rest = {}
            _axpy(rest, a // g, r)
            _axpy(rest, -(p // g), v)
            rows[c] = new
            if combo is not None:
                rc = self.combos[c]
                nc, oc = {}, {}
                _axpy(nc, x, rc)
                _axpy(nc, y, combo)
                _axpy(oc, a // g, rc)
                _axpy(oc, -(p // g), combo)
                self.combos[c] = nc
                combo = oc
            grew = True
            v = rest
            heap = list(v)
            heapq.heapify(heap)
        return grew

    def extend(self, vectors: Iterable) -> None:
        for v in vectors:
            self.add(v)

    def solve(self, v):
        """Integer coordinates in the inserted vectors, or None if not in the lattice."""
        v = as_sparse(v)
        if any(not isinstance(x, int) for x in v.values()):
            return None
        combo: dict = {}
        heap = list(v)
        heapq.heapify(heap)
        while v:
            c = heapq.heappop(heap)
            a = v.get(c)
            if not a:
                continue
            r = self.rows.get(c)
            if r is None or a % r[c]:
                return None
            q = a // r[c]
            _axpy(v, -q, r, heap, _ALL)
            if self.track:
                _axpy(combo, q, self.combos[c])
        return combo if self.track else {}

    def contains(self, v) -> bool:
        saved, self.track = self.track, False
        try:
            return self.solve(v) is not None
        finally:
            self.track = saved

    def hermite(self) -> list[dict]:
        """Basis rows sorted by pivot with entries above pivots reduced to [0, pivot)."""
        cols = sorted(self.rows)
        red: dict[int, dict] = {}
        for c in reversed(cols):
            r = dict(self.rows[c])
            for c2 in sorted(k for k in r if k != c and k in red):
                a = r.get(c2)
                if a:
                    q = a // red[c2][c2]
                    if q:
                        _axpy(r, -q, red[c2])
            red[c] = r
        return [red[c] for c in cols]

    def basis(self) -> list[dict]:
        return [dict(self.rows[c]) for c in sorted(self.rows)]


class _Everything:
    def __contains__(self, _):
        return True


_ALL = _Everything()


# ------------------------------------------------------------ Lattice

@dataclass
class Lattice:
    """Subgroup of Z^ambient_dim generated by integer vectors (stored sparse)."""

    ambient_dim: int
    generators: list = field(default_factory=list)

    def __post_init__(self):
        gens = []
        for g in self.generators:
            g = as_sparse(g)
            if any(not isinstance(x, int) for x in g.values()):
                raise ValueError("lattice generators must be integral")
            if g and (min(g) < 0 or max(g) >= self.ambient_dim):
                raise ValueError("generator does not fit the ambient dimension")
            gens.append(g)
        self.generators = gens
        self._int = None

    @classmethod
    def standard(cls, n: int) -> "Lattice":
        return cls(n, [{i: 1} for i in range(n)])

    def _echelon(self) -> IntEchelon:
        if self._int is None:
            e = IntEchelon()
            e.extend(dict(g) for g in self.generators)
            self._int = e
        return self._int

    @property
    def rank(self) -> int:
        e = Echelon()
        e.extend(self.generators)
        return e.rank

    def basis(self) -> list[dict]:
        """A Z-basis of the lattice (Hermite form)."""
        return self._echelon().hermite()

    def is_independent(self) -> bool:
        return self.rank == len(self.generators)

    def contains(self, v, over: str = "Z") -> bool:
        return membership(v, self, over).member

    def vectors(self) -> list[list[int]]:
        return [to_dense(g, self.ambient_dim) for g in self.generators]


@dataclass(frozen=True)
class QuotientPresentation:
    """Z^free_rank plus Z/d for each d in torsion (d1 | d2 | ...)."""

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        if any(d <= 1 for d in t):
            raise ValueError("torsion factors must exceed 1")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError("torsion factors must form a divisibility chain")
        object.__setattr__(self, "torsion", t)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self):
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass
class MembershipResult:
    member: bool
    coordinates: list | None = None


# ---------------------------------------------------------- operations

def rank(m) -> int:
    """Rank over Q of a SparseMatrix (or list of row vectors)."""
    rows, _ = _matrix_rows(m)
    e = Echelon()
    e.extend(rows)
    return e.rank


def kernel_basis(m) -> list[list]:
    """Primitive integer basis of the right null space, one vector per free column."""
    rows, ncols = _matrix_rows(m)
    if isinstance(m, SparseMatrix):
        ncols = m.ncols
    return [to_dense(v, ncols) for v in _kernel_sparse(rows, ncols)]


def _kernel_sparse(rows: list[dict], ncols: int) -> list[dict]:
    e = Echelon()
    e.extend(rows)
    red = e.rref()
    pivots = set(red)
    out = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = {f: 1}
        for c, r in red.items():
            x = r.get(f)
            if x:
                v[c] = -x
        out.append(primitive(v))
    return out


def kernel_lattice(m, ncols: int | None = None) -> list[dict]:
    """Z-basis (sparse) of the integer vectors x with m x = 0."""
    rows, nc = _matrix_rows(m)
    if isinstance(m, SparseMatrix):
        nc = m.ncols
    if ncols is not None:
        nc = ncols
    if not any(rows):
        return [{i: 1} for i in range(nc)]
    e = Echelon()
    e.extend(rows)
    red = e.rref()
    if all(isinstance(x, int) for r in red.values() for x in r.values()):
        pivots = set(red)
        out = []
        for f in range(nc):
            if f in pivots:
                continue
            v = {f: 1}
            for c, r in red.items():
                x = r.get(f)
                if x:
                    v[c] = -x
            out.append(v)
        return out
    # general case: Hermite form of [A^T | I]; rows with zero A-part span the kernel
    nr = len(rows)
    cols: list[dict] = [dict() for _ in range(nc)]
    for i, r in enumerate(rows):
        r, _ = _integerize(r)
        for j, x in r.items():
            cols[j][i] = x
    h = IntEchelon()
    for j in range(nc):
        v = dict(cols[j])
        v[nr + j] = 1
        h.add(v)
    out = []
    for c in sorted(h.rows):
        if c >= nr:
            out.append({k - nr: x for k, x in h.rows[c].items()})
    return out


def smith_normal_form(m) -> list[int]:
    """Nonzero invariant factors d1 | d2 | ... of an integer matrix."""
    rows, _ = _matrix_rows(m)
    if any(not isinstance(x, int) for r in rows for x in r.values()):
        raise ValueError("smith_normal_form needs integer entries")
    h = IntEchelon()
    h.extend(rows)
    return _snf_of_hermite(h.hermite())


def _snf_of_hermite(hrows: list[dict]) -> list[int]:
    # unit pivots in a reduced Hermite basis own their column; peel them off
    units = 0
    core = []
    unit_cols = set()
    for r in hrows:
        c = min(r)
        if r[c] == 1:
            units += 1
            unit_cols.add(c)
        else:
            core.append(r)
    core = [{k: x for k, x in r.items() if k not in unit_cols} for r in core]
    factors = _dense_snf(core)
    return [1] * units + factors


def _dense_snf(rows: list[dict]) -> list[int]:
    rows = [dict(r) for r in rows if r]
    diag = []
    while rows:
        # pivot: smallest absolute entry
        best = None
        for i, r in enumerate(rows):
            for j, x in r.items():
                if best is None or abs(x) < best[0]:
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        _, i, j = best
        while True:
            piv = rows[i]
            p = piv[j]
            dirty = False
            # clear column j in the other rows
            for t, r in enumerate(rows):
                if t == i or j not in r:
                    continue
                q = r[j] // p
                if q:
                    _axpy(r, -q, piv)
                if j in r:
                    dirty = True
            # clear row i by column operations (touches only column data)
            for c in list(piv):
                if c == j:
                    continue
                q = piv[c] // p
                if q:
                    for r in rows:
                        if j in r:
                            nv = r.get(c, 0) - q * r[j]
                            if nv:
                                r[c] = nv
                            else:
                                r.pop(c, None)
                if c in piv:
                    dirty = True
            if not dirty:
                break
            best = None
            for t, r in enumerate(rows):
                if t == i:
                    for c, x in r.items():
                        if best is None or abs(x) < best[0]:
                            best = (abs(x), t, c)
                elif j in r and (best is None or abs(r[j]) < best[0]):
                    best = (abs(r[j]), t, j)
            _, i, j = best
        diag.append(abs(rows[i][j]))
        rows.pop(i)
        rows = [r for r in rows if r]
    return _divisibility_chain(diag)


def _divisibility_chain(d: list[int]) -> list[int]:
    d = sorted(x for x in d if x)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            a, b = d[i], d[j]
            g = gcd(a, b)
            d[i], d[j] = g, a // g * b
    return d


def quotient_from_relations(r: int, relations: Iterable) -> QuotientPresentation:
    """Presentation of Z^r modulo the span of the given integer relation vectors."""
    h = IntEchelon()
    for v in relations:
        v = as_sparse(v)
        if any(not isinstance(x, int) for x in v.values()):
            raise ValueError("relations must be integral")
        h.add(v)
    factors = _snf_of_hermite(h.hermite())
    return QuotientPresentation(r - len(factors), tuple(d for d in factors if d > 1))


def quotient_presentation(ambient: Lattice, sub: Lattice) -> QuotientPresentation:
    """Presentation of ambient / <sub>; ambient generators must be a lattice basis."""
    e = Echelon(track=True)
    for g in ambient.generators:
        if not e.add(g):
            raise ValueError("ambient generators are not linearly independent")
    r = len(ambient.generators)
    rels = []
    for g in sub.generators:
        x = e.solve(g)
        if x is None:
            raise ValueError("sub generator is outside the span of the ambient lattice")
        if any(isinstance(c, Fraction) for c in x.values()):
            raise ValueError("sub generator has non-integral coordinates in the ambient basis")
        rels.append(x)
    return quotient_from_relations(r, rels)


def membership(v, span: Lattice, mode: str = "Q") -> MembershipResult:
    """Decide whether v lies in the Q-span or the Z-span of ``span``'s generators."""
    mode = mode.upper().replace("OVER-", "")
    v = as_sparse(v)
    ngen = len(span.generators)
    if not v:
        return MembershipResult(True, [0] * ngen)
    if mode == "Q":
        e = Echelon(track=True)
        e.extend(span.generators)
        x = e.solve(v)
    elif mode == "Z":
        h = IntEchelon(track=True)
        h.extend(span.generators)
        x = h.solve(v)
    else:
        raise ValueError(f"unknown membership mode {mode!r}")
    if x is None:
        return MembershipResult(False, None)
    return MembershipResult(True, [_canon(x.get(j, 0)) for j in range(ngen)])


def separating_covector(v, generators: Sequence) -> dict | None:
    """Primitive integer covector y with y.g = 0 for all generators and y.v != 0.

    Returns None when v lies in the Q-span of the generators.
    """
    e = Echelon()
    e.extend(generators)
    res = e.reduce(v)
    if not res:
        return None
    red = e.rref()
    f = min(res)
    # y = e_f - sum_p R[p,f] e_p kills every row of the RREF
    y = {f: 1}
    for c, r in red.items():
        x = r.get(f)
        if x:
            y[c] = -x
    return primitive(y)


def dot(u: Mapping, v: Mapping):
    if len(u) > len(v):
        u, v = v, u
    return sum(x * v[k] for k, x in u.items() if k in v)
