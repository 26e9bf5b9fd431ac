"""Jump levels, reachable levels and reachability matrices over a mapping DAG.

For a vertex v, the jump level JL(v) is the first level at which a path of
epsilon and empty-label edges from v can reach a vertex with an outgoing
marker edge carrying a non-empty label. Rlevel(i) collects the jump levels
of the vertices at level i, and Reach(i, j) is the Boolean matrix of
epsilon/empty-label paths from level i to level j whose last edge is an
epsilon edge. Together they let the enumerator skip whole stretches of the
document in which nothing is captured.

Internally, level i is described by a *jump state*: a class index per slot
into the sorted tuple ``rlevel[i]`` plus one matrix per entry of that tuple
(``None`` for the entry equal to ``i`` itself, whose jump is the identity).
The state of level i depends only on the level's shape and the state of
level i+1, so it is memoized on that pair.
"""

from typing import NamedTuple, Optional

from .core import SpanrunError
from .dag import LevelSet, MappingDAG, bits


class DimensionMismatchError(SpanrunError, ValueError):
    pass


class BoolMatrix:
    """Boolean matrix with rows packed into Python integers (bit j = column j)."""

    __slots__ = ("rows", "ncols", "_hash")

    def __init__(self, rows, ncols: int):
        self.rows = tuple(rows)
        self.ncols = ncols
        self._hash = None

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def shape(self):
        return (len(self.rows), self.ncols)

    @classmethod
    def identity(cls, n: int) -> "BoolMatrix":
        return cls([1 << i for i in range(n)], n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BoolMatrix":
        return cls([0] * nrows, ncols)

    @classmethod
    def from_dense(cls, dense, ncols: Optional[int] = None) -> "BoolMatrix":
        dense = [list(r) for r in dense]
        if ncols is None:
            ncols = len(dense[0]) if dense else 0
        rows = []
        for r in dense:
            if len(r) != ncols:
                raise DimensionMismatchError("ragged rows")
            rows.append(sum(1 << j for j, x in enumerate(r) if x))
        return cls(rows, ncols)

    def to_dense(self):
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def __getitem__(self, ij):
        i, j = ij
        return bool(self.rows[i] >> j & 1)

    def __eq__(self, other):
        if not isinstance(other, BoolMatrix):
            return NotImplemented
        return self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.ncols))
        return self._hash

    def __matmul__(self, other):
        return bool_multiply(self, other)

    def __repr__(self):
        return f"BoolMatrix({self.to_dense()})"


def bool_multiply(a: BoolMatrix, b: BoolMatrix) -> BoolMatrix:
    """Boolean product; each set bit of a row of ``a`` ORs in a row of ``b``."""
    if a.ncols != b.nrows:
        raise DimensionMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    brows = b.rows
    out = []
    for r in a.rows:
        acc = 0
        while r:
            low = r & -r
            acc |= brows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return BoolMatrix(out, b.ncols)


class JumpStats(NamedTuple):
    levels: int
    matrix_count: int
    distinct_matrices: int
    matrix_words: int
    distinct_states: int


class JumpIndex:
    """Precomputed jump data for one trimmed mapping DAG."""

    def __init__(self, dag, level_state, states, rlevel, steps, matrices):
        self.dag = dag
        self.level_state = level_state  # per level: id into states
        self.states = states            # id -> (cls tuple, mats tuple)
        self.rlevel = rlevel            # per level: sorted tuple of levels
        self.steps = steps              # logical preprocessing cost
        self._matrices = matrices

    @classmethod
    def build(cls, g: MappingDAG) -> "JumpIndex":
        levels = g.levels
        D = len(levels)
        states = [((0,), (None,))]
        state_ids = {((0,), (None,)): 0}
        matrices = {}   # content -> interned BoolMatrix
        products = {}   # (id step, id reach) -> product
        step_mats = {}  # Level -> BoolMatrix
        memo = {}       # (Level, next state id) -> (state id, has_self, used, same, cost)

        def intern(m):
            return matrices.setdefault(m, m)

        def compute(L, ns):
            cls_n, mats_n = states[ns]
            step = L.step_rows
            selfmask = L.self_jump
            width = len(L.states)
            raw = []
            used = set()
            for s in range(width):
                row = step[s]
                if selfmask >> s & 1 or not row:
                    # dead vertices (only in untrimmed input) never jump
                    raw.append(-1)
                    continue
                k = min(cls_n[t] for t in bits(row))
                raw.append(k)
                used.add(k)
            used = tuple(sorted(used))
            has_self = -1 in raw
            offset = 1 if has_self else 0
            pos = {k: offset + i for i, k in enumerate(used)}
            cls_i = tuple(0 if k < 0 else pos[k] for k in raw)
            mats_i = [None] if has_self else []
            sm = step_mats.get(L)
            if sm is None:
                sm = step_mats[L] = intern(BoolMatrix(step, L.next_width))
            for k in used:
                nxt = mats_n[k]
                if nxt is None:
                    mats_i.append(sm)
                    continue
                key = (id(sm), id(nxt))
                prod = products.get(key)
                if prod is None:
                    prod = products[key] = intern(bool_multiply(sm, nxt))
                mats_i.append(prod)
            mats_i = tuple(mats_i)
            skey = (cls_i, tuple(id(m) for m in mats_i))
            sid = state_ids.get(skey)
            if sid is None:
                sid = state_ids[skey] = len(states)
                states.append((cls_i, mats_i))
            same = not has_self and used == tuple(range(len(mats_n)))
            # logical cost: closure and steps over the level, one W x W product per class
            cost = L.size + len(used) * width * max(L.next_width, 1)
            return sid, has_self, used, same, cost

        level_state = [0] * D
        rlevel = [None] * D
        rlevel[D - 1] = (D - 1,)
        steps = 1
        for i in range(D - 2, -1, -1):
            L = levels[i]
            key = (L, level_state[i + 1])
            r = memo.get(key)
            if r is None:
                r = memo[key] = compute(L, level_state[i + 1])
            sid, has_self, used, same, cost = r
            steps += cost
            level_state[i] = sid
            rn = rlevel[i + 1]
            if same:
                rlevel[i] = rn
            else:
                rlevel[i] = ((i,) if has_self else ()) + tuple(rn[k] for k in used)
        return cls(g, level_state, states, rlevel, steps, matrices)

    # -- queries -------------------------------------------------------------

    def jl(self, level: int, slot: int) -> int:
        cls_i, _ = self.states[self.level_state[level]]
        return self.rlevel[level][cls_i[slot]]

    def jump_levels(self):
        """JL for every vertex, as a dict keyed by ``(level, slot)``; for small DAGs."""
        return {(i, s): self.jl(i, s) for i, L in enumerate(self.dag.levels) for s in range(L.width)}

    def rlevels(self, level: int) -> frozenset:
        return frozenset(self.rlevel[level])

    def reach(self, i: int, j: int) -> BoolMatrix:
        """Reach(i, j) for ``j`` in Rlevel(i); the identity when ``j == i``."""
        rl = self.rlevel[i]
        if j not in rl:
            raise KeyError((i, j))
        if j == i:
            return BoolMatrix.identity(self.dag.levels[i].width)
        _, mats = self.states[self.level_state[i]]
        return mats[rl.index(j)]

    def jump(self, ls: LevelSet, meter=None) -> LevelSet:
        """Jump set of ``ls``: the level set at min JL, reached via Reach rows."""
        i, mask = ls
        cls_i, mats = self.states[self.level_state[i]]
        best = min(cls_i[s] for s in bits(mask))
        j = self.rlevel[i][best]
        if meter is not None:
            meter.steps += len(self.dag.levels[i].states)
        if j == i:
            return ls
        rows = mats[best].rows
        out = 0
        for s in bits(mask):
            out |= rows[s]
        if meter is not None:
            meter.steps += len(self.dag.levels[j].states)
        return LevelSet(j, out)

    def stats(self) -> JumpStats:
        count = 0
        for i, rl in enumerate(self.rlevel):
            count += sum(1 for j in rl if j != i)
        words = sum(m.nrows * max(1, (m.ncols + 63) // 64) for m in self._matrices)
        return JumpStats(len(self.rlevel), count, len(self._matrices), words, len(self.states))


def build_jump_index(g: MappingDAG) -> JumpIndex:
    return JumpIndex.build(g)


def compute_jump_levels(g: MappingDAG) -> dict:
    """JL per vertex ``(level, slot)``."""
    return JumpIndex.build(g).jump_levels()


def compute_rlevels(g: MappingDAG) -> list:
    """Rlevel per level, as frozensets."""
    idx = JumpIndex.build(g)
    return [frozenset(r) for r in idx.rlevel]


def compute_reach_matrices(g: MappingDAG) -> dict:
    """Reach(i, j) for every level i and every j in Rlevel(i) with j > i."""
    idx = JumpIndex.build(g)
    return {(i, j): idx.reach(i, j) for i, rl in enumerate(idx.rlevel) for j in rl if j != i}
