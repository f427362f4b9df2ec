"""Trees, rooted orientations and connected subtrees.

Vertices are 0-based. The three-vertex chain 1--2--3 becomes 0--1--2, and
the four-vertex "daisy" has petals 0, 1, 2 around centre 3.
"""

from treekummer.trees import chain, connected_subsets_bruteforce, enumerate_subtrees, leaves, root_tree, star

chain3 = chain(3)
daisy = star(4)

# Rooting fixes a parent for every vertex but the root. depth_order lists
# children before parents, which is the order the rooted map is evaluated in.
for r in (0, 1):
    dt = root_tree(chain3, r)
    print(f"chain rooted at {r}: parent={dt.parent} children={dt.children} depth_order={dt.depth_order}")

dt = root_tree(daisy, 3)
print("daisy rooted at its centre: children of 3 =", dt.children[3])
print("leaves:", leaves(chain3), leaves(daisy))

# Subtrees are the nonempty connected vertex sets. They are enumerated
# recursively and cross-checked against filtering all 2^p - 1 subsets.
for name, t in (("chain", chain3), ("daisy", daisy)):
    subs = enumerate_subtrees(t)
    assert {frozenset(s.vertices) for s in subs} == connected_subsets_bruteforce(t)
    print(f"{name}: {len(subs)} subtrees ->", [s.vertices for s in subs])
