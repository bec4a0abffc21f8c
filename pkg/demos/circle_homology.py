# Two opens whose overlap has two pieces: the index poset looks like a circle.
from atlasdescent import corpus
from atlasdescent.lifting import check_atlas
from atlasdescent.nerve import homology, nerve_truncated, slice_homology

D = corpus.circle_atlas()
I = D.index
print("index:", I.elements, sorted((a, b) for a, b in I.leq if a != b))
print("atlas:", check_atlas(D).passed)

nv = nerve_truncated(I, 3)
print("simplices per level:", nv.sset.sizes)
print("nondegenerate:", [len(nv.sset.nondegenerate(n)) for n in range(4)])

for k, g in enumerate(homology(nv.sset, 2)):
    print(f"H_{k}: rank {g.betti}, torsion {list(g.torsion)}")

# each slice i/I has a minimum, so it is acyclic
for i in I.elements:
    print(i, [g.betti for g in slice_homology(i, I, 2)])

# the counit sends a simplex to its value at the full subset
x = nv.simplex(1, 5)
print("a 1-simplex:", x.as_dict(), "counit:", x.values[-1])
