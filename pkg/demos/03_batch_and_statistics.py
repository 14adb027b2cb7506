"""
Suite-level comparison of the two reference drivers
===================================================
"""

from refdriver import (generate_suite, histogram, median, run_batch, wilcoxon_signed_rank)
from refdriver.report import event_metrics_table, summarize

# %% 38 events, every model
suite = generate_suite(38, seed=7, preset="paper_like")
batch = run_batch(suite)
rows = event_metrics_table(batch.results, {s.id: s for s in suite})
print(len(batch.results), "simulations,", len(batch.excluded), "excluded")

# %% crash counts against the worst case
for s in summarize(rows):
    print(f"{s.model:5}: {s.n_crashes:2d} crashes of {s.n_events}, "
          f"reacted in {s.n_reacted}, worst case {s.worst_case_crashes}")

# %% reaction time relative to the human driver
for model in ("ccdm", "fsm"):
    t_diff = [m.t_diff for m in rows if m.model_name == model and m.t_diff is not None]
    w = wilcoxon_signed_rank(t_diff)
    earlier = sum(t < 0 for t in t_diff) / len(t_diff)
    print(f"{model}: median t_diff {median(t_diff):+.2f} s, earlier than human in {earlier:.0%}, "
          f"W = {w.w_statistic:g}, p = {w.p_value:.2g} ({w.method})")

# %% text histogram of FSM t_diff, 0.25 s bins
h = histogram([m.t_diff for m in rows if m.model_name == "fsm"], 0.25)
for lo, count in zip(h.bin_edges, h.counts):
    print(f"[{lo:+5.2f}, {lo + h.bin_width:+5.2f})  {'#' * count}")
