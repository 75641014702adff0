#!/usr/bin/env python3
"""Recomputes the golden end-to-end outputs from the fixture inputs.

The outcomes are compared against expected.jsonl (what each sample was built
to do), and selections and report values are recomputed from those expected
outcomes with plain Python. Curve points that depend on random subsets are
only checked for shape; the full-sample point is recomputed.

    check_golden.py FIXTURE_DIR GOLDEN_DIR
"""
import json
import math
import sys
from pathlib import Path

TOL = 1e-3
FLOAT_EPS = 1e-9


def read_jsonl(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


class Checker:
    def __init__(self):
        self.failures = []
        self.checks = 0

    def eq(self, what, got, want):
        self.checks += 1
        if got != want:
            self.failures.append(f"{what}: got {got!r}, want {want!r}")

    def close(self, what, got, want):
        self.checks += 1
        if got is None or want is None:
            if got is not want:
                self.failures.append(f"{what}: got {got!r}, want {want!r}")
        elif abs(got - want) > FLOAT_EPS:
            self.failures.append(f"{what}: got {got!r}, want {want!r}")


def answer_value(a):
    if a["variant"] == "null":
        return None
    return a["value"]


def is_correct(answer, gold, fmt):
    if answer is None:
        return False
    if fmt == "choice":
        return isinstance(answer, str) and answer == gold
    return not isinstance(answer, str) and abs(answer - gold) <= TOL + 1e-12


def group_key(answer):
    if answer is None:
        return "null"
    if isinstance(answer, str):
        return answer
    steps = answer / TOL
    steps = math.floor(abs(steps) + 0.5) * (1 if steps >= 0 else -1)
    s = f"{steps * TOL:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def select(cands, method):
    """cands: list of (cot_id, answer, score) in sampling order, nulls already dropped."""
    if not cands:
        return None, {}
    if method == "rerank":
        best = 0
        tally = {}
        for i, (_, ans, score) in enumerate(cands):
            if score > cands[best][2]:
                best = i
            k = group_key(ans)
            tally[k] = max(tally.get(k, score), score)
        return best, tally
    weights, first = {}, {}
    for i, (_, ans, score) in enumerate(cands):
        k = group_key(ans)
        first.setdefault(k, i)
        weights[k] = weights.get(k, 0.0) + (1.0 if method == "vote" else score)
    best_key = None
    for k in sorted(weights):
        if best_key is None or weights[k] > weights[best_key] or (
                weights[k] == weights[best_key] and first[k] < first[best_key]):
            best_key = k
    return first[best_key], weights


def main():
    fixtures, golden = Path(sys.argv[1]), Path(sys.argv[2])
    config = json.loads((fixtures / "config.json").read_text(encoding="utf-8"))
    filter_null = config["filter_null"]
    assert filter_null is True, "checker assumes filter_null on"
    questions = read_jsonl(fixtures / "questions.jsonl")
    expected = {r["cot_id"]: r for r in read_jsonl(fixtures / "expected.jsonl")}
    scores = {r["cot_id"]: r["rm_score"] for r in read_jsonl(fixtures / "scores.jsonl")}
    c = Checker()

    # Outcomes: one golden file per cots file, in cots order.
    types = []
    samples = {}  # type -> qid -> [(cot_id, answer, status)]
    for cots_name in config["paths"]["cots"]:
        cots = read_jsonl(fixtures / cots_name)
        outs = read_jsonl(golden / cots_name.replace(".jsonl", ".outcomes.jsonl"))
        c.eq(f"{cots_name} outcome count", len(outs), len(cots))
        for cot, out in zip(cots, outs):
            exp = expected[cot["id"]]
            c.eq(f"{cot['id']} order", out["cot_id"], cot["id"])
            c.eq(f"{cot['id']} status", out["status"], exp["status"])
            c.eq(f"{cot['id']} answer", out["answer"], exp["answer"])
            c.eq(f"{cot['id']} wall_ms", out["wall_ms"], 0)
            t = cot["kind"] if cot["dialect"] == "none" else f"{cot['kind']}-{cot['dialect']}"
            if t not in samples:
                types.append(t)
                samples[t] = {}
            ans = answer_value(exp["answer"]) if exp["status"] == "ok" else None
            samples[t].setdefault(cot["question_id"], []).append((cot["id"], ans, exp["status"]))

    gold = {q["id"]: (q["gold"], q["answer_format"]) for q in questions}

    def candidates(entries):
        return [(cid, ans, scores[cid]) for cid, ans, _ in entries if not (filter_null and ans is None)]

    # Pooled selections.
    for method in ("vote", "rerank", "weighted"):
        rows = read_jsonl(golden / f"selections.{method}.pooled.jsonl")
        c.eq(f"{method} rows", len(rows), len(questions))
        for q, row in zip(questions, rows):
            pooled = [e for t in types for e in samples[t].get(q["id"], [])]
            cands = candidates(pooled)
            idx, tally = select(cands, method)
            c.eq(f"{method} {q['id']} question", row["question_id"], q["id"])
            c.eq(f"{method} {q['id']} method", row["method"], method)
            if idx is None:
                c.eq(f"{method} {q['id']} abstain", "chosen_cot_id" in row, False)
                continue
            c.eq(f"{method} {q['id']} chosen", row.get("chosen_cot_id"), cands[idx][0])
            c.eq(f"{method} {q['id']} answer", answer_value(row["answer"]), cands[idx][1])
            c.eq(f"{method} {q['id']} tally keys", sorted(row["tally"]), sorted(tally))
            for k, v in tally.items():
                c.close(f"{method} {q['id']} tally[{k}]", row["tally"].get(k), v)

    # Report.
    report = json.loads((golden / "report.json").read_text(encoding="utf-8"))
    scalars = {s["name"]: s for s in report["scalars"]}
    tables = {t["name"]: t for t in report["tables"]}
    curves = {cv["name"]: cv["points"] for cv in report["curves"]}
    c.eq("meta seed", report["meta"]["seed"], str(config["seed"]))
    vote_ok = {}
    for t in types:
        per_q = [samples[t][q["id"]] for q in questions]
        total = sum(len(e) for e in per_q)
        correct = [[is_correct(a, *gold[q["id"]]) for _, a, _ in e] for q, e in zip(questions, per_q)]
        ok = [[s == "ok" for _, _, s in e] for e in per_q]
        null = [[s == "ok" and a is None for _, a, s in e] for e in per_q]
        n_min = min(len(e) for e in per_q)
        expect = {
            "precision": sum(map(sum, correct)) / total,
            "execution_rate": sum(map(sum, ok)) / total,
            "valid_rate": (sum(map(sum, ok)) - sum(map(sum, null))) / total,
            "correct@1": sum(sum(r) / len(r) for r in correct) / len(questions),
            f"correct@{n_min}": sum(any(r) for r in correct) / len(questions),
            "null_percent": 100.0 * sum(map(sum, null)) / total,
        }
        method_ok = {}
        for method in ("vote", "rerank", "weighted"):
            hits = []
            for q, e in zip(questions, per_q):
                cands = candidates(e)
                idx, _ = select(cands, method)
                hits.append(idx is not None and is_correct(cands[idx][1], *gold[q["id"]]))
            method_ok[method] = hits
            expect[f"{method}_accuracy"] = sum(hits) / len(hits)
        vote_ok[t] = method_ok["vote"]
        for name, want in expect.items():
            got = scalars.get(f"{t}.{name}")
            c.close(f"{t}.{name}", got["value"] if got else None, want)

        rates = [100.0 * sum(r) / len(r) for r in null]
        edges = [0, 20, 40, 60, 80, 100]
        table = tables[f"{t} null-rate buckets"]
        for b, row in enumerate(table["rows"]):
            lo, hi = edges[b], edges[b + 1]
            members = [i for i, r in enumerate(rates) if lo <= r < hi or (hi == 100 and r == 100)]
            c.eq(f"{t} bucket {lo}-{hi} label", row[0], f"{lo}-{hi}")
            c.eq(f"{t} bucket {lo}-{hi} n", row[1], len(members))
            want = sum(vote_ok[t][i] for i in members) / len(members) if members else None
            c.close(f"{t} bucket {lo}-{hi} accuracy", row[2], want)

        points = curves[t]
        c.eq(f"{t} curve ks", [p["k"] for p in points], config["stats"]["ks"])
        for p in points:
            c.eq(f"{t} curve k={p['k']} questions", p["questions"], len(questions))
            c.eq(f"{t} curve k={p['k']} in range", 0.0 <= p["accuracy"] <= 1.0, True)
            c.eq(f"{t} curve k={p['k']} trials", p["trials"], 1 if p["k"] == n_min else config["stats"]["trials"])
        full = [p for p in points if p["k"] == n_min][0]
        c.close(f"{t} curve at k=n", full["accuracy"], expect["vote_accuracy"])
        c.close(f"{t} curve at k=n stderr", full["stderr"], 0.0)

    rows = [[vote_ok[t][i] for t in types] for i in range(len(questions))]
    c.close("union_upper_bound", scalars["union_upper_bound"]["value"], sum(any(r) for r in rows) / len(rows))
    recovery = tables["failure recovery (row failed, column correct)"]
    c.eq("recovery columns", recovery["columns"], ["failed"] + types)
    for i, t in enumerate(types):
        failed = [r for r in rows if not r[i]]
        for j in range(len(types)):
            want = sum(r[j] for r in failed) / len(failed) if failed else None
            c.close(f"recovery {t}->{types[j]}", recovery["rows"][i][j + 1], want)

    # The CSV and text renderings carry the same numbers.
    csv_lines = (golden / "curves.csv").read_text(encoding="utf-8").splitlines()
    c.eq("csv meta", csv_lines[0], f"# seed={config['seed']}")
    body = [line.split(",") for line in csv_lines if not line.startswith("#")][1:]
    flat = [(name, p) for name in curves for p in curves[name]]
    c.eq("csv rows", len(body), len(flat))
    for (name, p), row in zip(flat, body):
        c.eq(f"csv {name} k={p['k']}", (row[0], int(row[1]), int(row[4])), (name, p["k"], p["trials"]))
        c.close(f"csv {name} k={p['k']} accuracy", float(row[2]), p["accuracy"])
    text = (golden / "report.txt").read_text(encoding="utf-8")
    for name, s in scalars.items():
        line = [ln for ln in text.splitlines() if ln.startswith(name + " ")]
        c.eq(f"text line for {name}", len(line) == 1 and f"{s['value']:.4f}" in line[0], True)

    if c.failures:
        for f in c.failures[:50]:
            print("FAIL", f)
        print(f"{len(c.failures)} of {c.checks} checks failed")
        return 1
    print(f"all {c.checks} golden checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
