"""Generate the bundled qualitative-ratings benchmark corpus.

Writes a 250-row CSV (107 bankrupt, 143 solvent) over six ordinal ratings
IR,MR,FF,CR,CO,OR with values P/A/N and a B/NB class column.

The class is a deterministic expert rule on the internal factors:
bankrupt iff competitiveness is negative, or competitiveness is average
with no financial flexibility. The remaining ratings are drawn from
class-conditional distributions so every attribute carries signal while
pairwise correlations stay below the 0.7 redundancy threshold.

Run from the repo root:  python3 tools/generate_corpus.py
"""

from __future__ import annotations

import sys
from collections import Counter
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "bankrisk" / "data" / "qualitative_bankruptcy.csv"

N_BANKRUPT = 107
N_SOLVENT = 143
SEED = 20250810

TOKENS = np.array(["N", "A", "P"])  # index == 2 * encoded value


def _draw(rng: np.random.Generator, n: int, p_nap: tuple[float, float, float]) -> np.ndarray:
    """Draw n rating indices (0=N, 1=A, 2=P) with the given probabilities."""
    return rng.choice(3, size=n, p=np.asarray(p_nap) / sum(p_nap))


def is_bankrupt(ff: int, co: int) -> bool:
    """Expert rule: negative competitiveness, or average competitiveness
    with negative financial flexibility."""
    return co == 0 or (co == 1 and ff == 0)


def generate(seed: int = SEED) -> list[str]:
    rng = np.random.default_rng(seed)
    rows: list[tuple[int, ...]] = []

    # Bankrupt firms: CO=N (any FF, skewed negative) or CO=A with FF=N.
    n_co_avg = 22
    for i in range(N_BANKRUPT):
        if i < n_co_avg:
            co, ff = 1, 0
        else:
            co = 0
            ff = _draw(rng, 1, (0.52, 0.33, 0.15))[0]
        cr = _draw(rng, 1, (0.60, 0.30, 0.10))[0]
        ir = _draw(rng, 1, (0.46, 0.34, 0.20))[0]
        mr = _draw(rng, 1, (0.52, 0.34, 0.14))[0]
        opr = _draw(rng, 1, (0.48, 0.36, 0.16))[0]
        rows.append((ir, mr, ff, cr, co, opr, 1))

    # Solvent firms: CO=P (any FF) or CO=A with FF in {A, P}.
    n_co_avg = 43
    for i in range(N_SOLVENT):
        if i < n_co_avg:
            co = 1
            ff = _draw(rng, 1, (0.0, 0.45, 0.55))[0]
        else:
            co = 2
            ff = _draw(rng, 1, (0.14, 0.34, 0.52))[0]
        cr = _draw(rng, 1, (0.08, 0.34, 0.58))[0]
        ir = _draw(rng, 1, (0.20, 0.36, 0.44))[0]
        mr = _draw(rng, 1, (0.14, 0.36, 0.50))[0]
        opr = _draw(rng, 1, (0.18, 0.36, 0.46))[0]
        rows.append((ir, mr, ff, cr, co, opr, 0))

    order = rng.permutation(len(rows))
    lines = []
    for idx in order:
        ir, mr, ff, cr, co, opr, label = rows[idx]
        toks = [TOKENS[v] for v in (ir, mr, ff, cr, co, opr)]
        lines.append(",".join(toks) + "," + ("B" if label else "NB"))
    return lines


def audit(lines: list[str]) -> bool:
    """Check every corpus property the suite depends on; return pass/fail."""
    enc = {"N": 0.0, "A": 0.5, "P": 1.0}
    x = np.array([[enc[t] for t in ln.split(",")[:6]] for ln in lines])
    y = np.array([1 if ln.split(",")[6] == "B" else 0 for ln in lines])
    names = ["IR", "MR", "FF", "CR", "CO", "OR"]
    ok = True

    counts = Counter(y)
    print(f"rows={len(lines)} B={counts[1]} NB={counts[0]}")
    ok &= len(lines) == 250 and counts[1] == 107 and counts[0] == 143

    # rule consistency
    rule = np.array([is_bankrupt(int(r[2] * 2), int(r[4] * 2)) for r in x])
    agree = (rule == y.astype(bool)).mean()
    print(f"rule consistency: {agree:.3f}")
    ok &= agree == 1.0

    cm = np.corrcoef(np.column_stack([x, y]).T)
    print("class corr: ", {n: round(cm[i, 6], 3) for i, n in enumerate(names)})
    worst = 0.0
    for i in range(6):
        for j in range(i + 1, 6):
            worst = max(worst, abs(cm[i, j]))
    print(f"max feature-feature |corr|: {worst:.3f}")
    ok &= worst <= 0.65

    def entropy(v):
        p = np.bincount(v) / len(v)
        p = p[p > 0]
        return -(p * np.log2(p)).sum()

    hy = entropy(y)
    gains = []
    for i in range(6):
        col = (x[:, i] * 2).astype(int)
        cond = sum((col == v).mean() * entropy(y[col == v]) for v in np.unique(col))
        gains.append(hy - cond)
    print("info gain:", {n: round(g, 3) for n, g in zip(names, gains)})
    ok &= all(g > 0.01 for g in gains) and int(np.argmax(gains)) == 4

    try:
        from sklearn.ensemble import RandomForestClassifier
        from sklearn.linear_model import LogisticRegression
        from sklearn.model_selection import cross_val_score
        from sklearn.naive_bayes import CategoricalNB
        from sklearn.neural_network import MLPClassifier
        from sklearn.svm import SVC
    except ImportError:
        print("sklearn unavailable; skipping accuracy proxy")
        return ok

    cats = (x * 2).astype(int)
    checks = [
        ("logistic", LogisticRegression(C=100), x, 0.945),
        ("nbayes", CategoricalNB(alpha=1.0), cats, 0.955),
        ("forest", RandomForestClassifier(100, random_state=0), x, 0.945),
        ("mlp", MLPClassifier((4,), max_iter=3000, random_state=0), x, 0.955),
        ("svm", SVC(C=10, gamma=0.5), x, 0.975),
    ]
    for name, clf, feats, floor in checks:
        acc = cross_val_score(clf, feats, y, cv=10).mean()
        flag = "ok" if acc >= floor else "LOW"
        print(f"cv10 {name}: {acc:.4f} (floor {floor}) {flag}")
        ok &= acc >= floor
    return ok


def main() -> int:
    lines = generate()
    if not audit(lines):
        print("AUDIT FAILED — corpus not written")
        return 1
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n", encoding="ascii")
    print(f"wrote {OUT} ({len(lines)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
