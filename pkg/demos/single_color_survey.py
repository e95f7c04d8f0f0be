"""Single-color d=2 surveys on 5, 6 and 7 vertices.

Writes one TSV per vertex count next to this script and prints the
summary, including the smallest gaps (which decide the flagged count).
"""
import sys
from pathlib import Path

from xordgames.survey import SurveySpec, run_survey

here = Path(__file__).resolve().parent
ns = [int(a) for a in sys.argv[1:]] or [5, 6, 7]
for n in ns:
    res = run_survey(SurveySpec((n,), values=("classical", "aq")), out=str(here / f"single_color_n{n}.tsv"))
    print(f"--- n={n} ({res.seconds:.0f} s)")
    print("\n".join(res.summary.lines()))
    gaps = sorted(r.gap for r in res.rows if r.gap is not None and r.gap > 1e-4)
    print("smallest gaps:", ", ".join(f"{g:.6f}" for g in gaps[:5]))
