"""Writes the synthetic example datasets under data/.

All three are simulated; none of them is a real survey, prescription or species record.
Run from the repository root: python3 tools/make_example_data.py
"""

from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent / "data"


def write_mixed(rng):
    n = 150
    group = rng.integers(0, 3, size=n)
    age = np.round(rng.normal([30, 45, 60], 6)[group], 1)
    income = np.maximum(0.0, np.round(rng.normal([1.5, 3.0, 2.2], 0.6)[group], 2))
    income[rng.random(n) < 0.08] = 0.0
    housing_levels = ["rents", "owns", "shares"]
    housing = [housing_levels[(g + (rng.random() < 0.25)) % 3] for g in group]
    satisfaction = np.clip(group + 1 + rng.integers(-1, 2, size=n), 1, 4)
    car = ["yes" if rng.random() < [0.3, 0.7, 0.5][g] else "no" for g in group]

    out = ROOT / "mixed"
    with open(out / "persons.csv", "w") as f:
        f.write("age,income,housing,satisfaction,car\n")
        for i in range(n):
            f.write(f"{age[i]},{income[i]},{housing[i]},{satisfaction[i]},{car[i]}\n")
    (out / "persons.ini").write_text(
        "[age]\nkind = continuous\nweight = 0.01\n\n"
        "[income]\nkind = continuous\nweight = 0.5\n\n"
        "[housing]\nkind = nominal\nlevels = rents,owns,shares\nweight = 0.5\n\n"
        "[satisfaction]\nkind = ordinal\nlevels = 1,2,3,4\nweight = 0.25\n\n"
        "[car]\nkind = binary\nlevels = no,yes\nweight = 1\n"
    )
    (out / "run.ini").write_text(
        "[data]\nformat = mixed\npath = persons.csv\nschema = persons.ini\n\n"
        "[null]\nfamily = latent-gaussian\n\n"
        "[pipeline]\nmethod = pam\nindex = asw\nK = 2-6\nm = 49\nseed = 20261015\n\n"
        "[output]\ndir = results\n"
    )


def write_series(rng):
    n, T, h = 60, 56, 4
    rows = []
    for i in range(n):
        level = rng.integers(0, h)
        s = []
        for t in range(T):
            if t % 7 == 0 and rng.random() < 0.4:
                level = min(h - 1, max(0, level + rng.choice([-1, 1])))
            elif rng.random() < 0.05:
                level = min(h - 1, max(0, level + rng.choice([-1, 1])))
            s.append("NA" if (i % 10 == 0 and t > 40) else str(level + 1))
        rows.append(s)
    out = ROOT / "series"
    with open(out / "dosage.csv", "w") as f:
        f.write(",".join(f"day{t + 1}" for t in range(T)) + "\n")
        for s in rows:
            f.write(",".join(s) + "\n")
    (out / "run.ini").write_text(
        "[data]\nformat = series\npath = dosage.csv\nh = 4\nprescription_period = 7\n\n"
        "[null]\nfamily = markov\n\n"
        "[pipeline]\nmethod = average-linkage\nindex = prediction-strength\nK = 2-5\nm = 19\nb = 10\nseed = 7\n\n"
        "[output]\ndir = results\n"
    )


def write_islands(rng):
    # 34 regions on a 6-wide grid with 4-neighbourhood; two species groups on opposite sides.
    cols, R, S = 6, 34, 80
    names = [f"I{r + 1:02d}" for r in range(R)]
    pos = [(r // cols, r % cols) for r in range(R)]
    edges = []
    for a in range(R):
        for b in range(a + 1, R):
            if abs(pos[a][0] - pos[b][0]) + abs(pos[a][1] - pos[b][1]) == 1:
                edges.append((a, b))
    adj = [[] for _ in range(R)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    presence = np.zeros((S, R), dtype=int)
    for s in range(S):
        centre = rng.integers(0, R // 2) if s < S // 2 else rng.integers(R // 2, R)
        size = int(rng.integers(1, 9))
        chosen = {int(centre)}
        while len(chosen) < size:
            frontier = sorted({b for a in chosen for b in adj[a]} - chosen)
            pool = frontier if frontier and rng.random() > 0.15 else sorted(set(range(R)) - chosen)
            chosen.add(int(rng.choice(pool)))
        presence[s, sorted(chosen)] = 1
    out = ROOT / "islands"
    with open(out / "presence.csv", "w") as f:
        f.write("species," + ",".join(names) + "\n")
        for s in range(S):
            f.write(f"sp{s + 1:02d}," + ",".join(map(str, presence[s])) + "\n")
    with open(out / "neighbors.csv", "w") as f:
        f.write("regionA,regionB\n")
        for a, b in edges:
            f.write(f"{names[a]},{names[b]}\n")
    (out / "run.ini").write_text(
        "[data]\nformat = presence-absence\npath = presence.csv\nneighbors = neighbors.csv\n\n"
        "[null]\nfamily = spatial\ndisjunction_reps = 20\n\n"
        "[pipeline]\nmethod = gmm-noise\nindex = adjusted-bic\nK = 1-6\nm = 19\nmds_dim = 4\nseed = 11\n\n"
        "[output]\ndir = results\n"
    )


if __name__ == "__main__":
    rng = np.random.default_rng(20261015)
    write_mixed(rng)
    write_series(rng)
    write_islands(rng)
