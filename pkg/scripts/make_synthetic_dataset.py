"""Regenerate the bundled email-like event file.

Departments of employees exchange messages week by week; some messages copy a
second recipient. Employees join over the first weeks. Output format is the
ingestion text format with epoch-second timestamps.

    python scripts/make_synthetic_dataset.py > src/dymond/data/synthetic_email.txt
"""
import sys

import numpy as np

WEEK = 7 * 24 * 3600
START = 2088 * WEEK  # week-aligned epoch seconds (2010-01-07)


def main(seed=20211, n_nodes=200, n_weeks=20, n_depts=8):
    rng = np.random.default_rng(seed)
    dept = rng.integers(n_depts, size=n_nodes)
    join = np.where(rng.random(n_nodes) < 0.6, 0, rng.integers(1, n_weeks // 2, size=n_nodes))
    activity = rng.pareto(2.5, size=n_nodes) + 0.3
    contacts = [dict() for _ in range(n_nodes)]
    lines = ["# u v t  (synthetic email-like events, one message or copy per line)"]
    for week in range(n_weeks):
        present = np.flatnonzero(join <= week)
        for u in present:
            for _ in range(rng.poisson(activity[u])):
                known = contacts[u]
                if known and rng.random() < 0.6:
                    keys = sorted(known)
                    w = np.array([known[k] for k in keys], float)
                    v = keys[rng.choice(len(keys), p=w / w.sum())]
                else:
                    same = present[(dept[present] == dept[u]) & (present != u)]
                    pool = same if len(same) and rng.random() < 0.85 else present[present != u]
                    v = int(rng.choice(pool))
                recipients = [v]
                if rng.random() < 0.25:
                    same = present[(dept[present] == dept[u]) & (present != u) & (present != v)]
                    if len(same):
                        recipients.append(int(rng.choice(same)))
                t = START + week * WEEK + int(rng.integers(WEEK))
                for r in recipients:
                    lines.append(f"{1000 + u} {1000 + r} {t}")
                    contacts[u][r] = contacts[u].get(r, 0) + 1
                    contacts[r][u] = contacts[r].get(u, 0) + 1
    sys.stdout.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
