# Families of opens as presheaves: morphisms, local isomorphisms, tensoring.
from atlasdescent import corpus
from atlasdescent.semirep import (
    FamilyMorphism,
    IndexedFamily,
    constant_diagram,
    factor_local_iso,
    hom_count,
    hom_families,
    tensor_family,
    totalize,
)

line = corpus.line_space()
U, V, M = frozenset("lm"), frozenset("mr"), frozenset("m")

A = IndexedFamily(line, ("s", "t"), {"s": U, "t": V})
F = totalize(A)
for W in line.sorted_opens:
    print(sorted(W), "->", F.sections[W])

B = IndexedFamily(line, ("a", "b", "c"), {"a": M, "b": U, "c": line.top})
C = IndexedFamily(line, ("x",), {"x": M})
print("maps C -> B:", [m.reindex for m in hom_families(C, B)], hom_count(C, B))
print("maps A -> B:", hom_count(A, B))

m = FamilyMorphism(C, B, {"x": "c"})
fixed, local = factor_local_iso(m)
print("middle family:", {s: sorted(W) for s, W in fixed.target.member.items()})
print("second leg is a local isomorphism:", local.is_local_isomorphism())

T = tensor_family({"k": ["0", "1", "2"]}, {}, constant_diagram(("k",), {}, A))
print("three copies of A:", len(T.families["k"].index), "members")
