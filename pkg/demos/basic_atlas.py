# Two opens of a three point line, with and without their overlap in the index.
from atlasdescent import corpus
from atlasdescent.lifting import CONDITIONS, check_atlas, equivalence_report

line = corpus.line_space()
print("points:", line.points)
print("opens:", [sorted(U) for U in line.sorted_opens])

good = corpus.basic_atlas()
bad = corpus.discrete_pair()

for name, D in [("with overlap", good), ("without overlap", bad)]:
    v = check_atlas(D)
    print()
    print(name, "->", "atlas" if v.passed else "not an atlas")
    if not v.passed:
        w = v.witness
        print("  problem sigma:", w.problem.sigma)
        print("  region:", sorted(w.region), " covered:", sorted(w.achieved), " residue:", list(w.residue))
    report = equivalence_report(D, nmax=3)
    for c, ok in zip(sorted(CONDITIONS), report.values):
        print(f"  condition {c} ({CONDITIONS[c]}): {ok}")

# the three checking modes agree
for mode in ("basic", "finite_sets", "subsets"):
    print(mode, check_atlas(good, mode).passed, check_atlas(bad, mode).passed)
