"""
Choosing label sets with a flashlight
=====================================

When a level of the DAG can carry several markers along one path, the
enumerator has to list every distinct set of markers that some path reads
without listing any set twice.  It decides markers one at a time and
only descends into a branch when a path still exists for it.
"""

from spanrun import LevelSet, MappingDAG, extend_to_path, next_level_general
from spanrun.core import close_marker, marker_name, open_marker
from spanrun.dag import FINAL_STATE, Level

OX, CX, OY = open_marker(0), close_marker(0), open_marker(1)
NAMES = ("x", "y")


def show(markers):
    return "{" + ",".join(marker_name(m, NAMES) for m in sorted(markers)) + "}"


# %%
# Vertices 0..4 in one level.  Two routes read +x: one then also reads +y,
# the other reads -x.  Vertices 3 and 4 (and 0) may leave the level.
level = Level(
    range(5),
    marker_edges=((0, (OX,), 1), (1, (OY,), 3), (0, (OX,), 2), (2, (CX,), 4)),
    eps_edges=((0, 0), (3, 0), (4, 0)),
    next_width=1,
)
print("labels in this level:", show(level.alphabet))

# %%
# extend_to_path answers the question asked at each node of the search:
# which vertices are reachable by a path reading all of S+ and none of S-?
for s_plus, s_minus in [({OX}, set()), ({OX, OY}, set()), ({OX}, {OY}), (set(), {OX})]:
    reached = sorted(extend_to_path(level, {0}, s_plus, s_minus))
    print(f"S+={show(s_plus):8} S-={show(s_minus):8} -> {reached}")

# %%
# The full stream from vertex 0.  The empty set comes last.
dag = MappingDAG([level, Level((FINAL_STATE,))], 0, NAMES)
for label, target in next_level_general(dag, LevelSet(0, 0b1)):
    print(show(label), "-> next level vertices", target.members())
