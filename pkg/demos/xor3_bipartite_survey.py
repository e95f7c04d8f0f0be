"""Two-party XOR-3 games on six vertices: every class of every connected
bipartite graph with minimum degree 2, with the Alice/Bob split declared."""
from xordgames.survey import ALL_LD, GraphFilter, SurveySpec, run_survey, decode_canonical

spec = SurveySpec((6,), d=3, graph_filter=GraphFilter(bipartite=True), mode=ALL_LD, bell=True)
res = run_survey(spec)
print("\n".join(res.summary.lines()))
print("\nnonclassical classes (colored edges, beta_c, gamma_c, gamma_aq):")
for r in sorted(res.rows, key=lambda r: -(r.gap or 0)):
    if r.gap is not None and r.gap > spec.flag_tol:
        print(f"  {r.colored:2d} {r.beta_c} {r.gamma_c:2d} {r.gamma_aq:.5f}  {r.canonical_id}")
