"""Rater quality control on a synthetic campaign.

Three raters per pair are planted with bad habits: one scores everything from
the same distribution, one inflates every repeated QC item. We run the
consistency and discernment tests and watch what the filter removes.

    python demos/01_rater_qc.py
"""

from indic_mteval.normalize import zscore_by_rater
from indic_mteval.qcstats import filter_ratings, rater_verdicts
from indic_mteval.synthetic import Campaign, generate

campaign = Campaign(
    pairs=("eng-hin", "hin-doi"),
    raters_per_pair=6,
    files_per_rater=30,
    behaviours={
        "eng-hin-r00": "non_discerning",
        "eng-hin-r01": "inconsistent",
        "hin-doi-r00": "non_discerning",  # doi is exempt from discernment filtering
    },
    seed=1,
)
records, truth = generate(campaign)
print(f"{len(records)} ratings from {len(truth)} raters\n")

verdicts = rater_verdicts(zscore_by_rater(records), alpha=0.05)
print(f"{'rater':<14}{'planted':<16}{'p(consistency)':>15}{'p(discernment)':>16}  verdict")
for v in verdicts:
    verdict = "keep" if v.passes else ("inconsistent" if not v.consistent else "non-discerning")
    if v.exempt_discernment:
        verdict += " (exempt)"
    print(f"{v.rater_id:<14}{truth[v.rater_id]:<16}{v.p_consistency:>15.4f}{v.p_discernment:>16.2e}  {verdict}")

kept, audit = filter_ratings(records, verdicts)
print()
for stage in audit.stages:
    print(f"{stage.stage:<16} raters removed {stage.raters_removed:>2}   ratings removed {stage.items_removed:>5}"
          f"  ({stage.pct_of_input:.1f}%)")
print(f"\n{len(kept)} of {len(records)} ratings survive")
