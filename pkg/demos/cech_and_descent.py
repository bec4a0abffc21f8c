# Cech nerves, refined diagrams, and gluing sections of a double cover.
from atlasdescent import corpus
from atlasdescent.descent import check_descent, is_sheaf, limit_over_diagram, sections_sheaf
from atlasdescent.hypercover import cech_nerve, check_hypercover, check_hypercover_dhi
from atlasdescent.nerve import refine_diagram
from atlasdescent.order import specialization_preorder

line = corpus.line_space()
U, V = frozenset("lm"), frozenset("mr")
H = cech_nerve(line, [U, V], line.top, 3)
print("Cech nerve sizes:", H.shape.sizes)
print("edge labels:", [sorted(H.label(1, x)) for x in range(H.shape.sizes[1])])
print("hypercover (fill, lifting):", check_hypercover(H, 3).passed, check_hypercover_dhi(H, 3).passed)

for D in (corpus.basic_atlas(), corpus.discrete_pair()):
    R = refine_diagram(D, 3)
    v = check_hypercover(R, 3)
    print("refined", D.index.elements, "sizes", R.shape.sizes, "hypercover:", v.passed)
    if not v.passed:
        print("  fails at level", v.witness.problem["level"], "residue", list(v.witness.residue))

# two copies of the line mapping onto it
X = specialization_preorder(line)
E, p = corpus.fold_bundle(X, 2)
F = sections_sheaf(E, X, p)
print("sheaf:", is_sheaf(F), " global sections:", len(F.presheaf.sections[line.top]))

for D in (corpus.basic_atlas(), corpus.discrete_pair()):
    lim = limit_over_diagram(F, D)
    v = check_descent(F, D)
    print(D.index.elements, "limit", len(lim), "sections", v.source_size, "->", "descends" if v.passed else v.failure)
