#!/usr/bin/env python3
"""Writes the 20-question end-to-end fixture set.

Every sample is built from a known outcome (correct, wrong, syntax error,
runtime error, no extractable answer, or null on a choice question), and that
intended outcome is written to expected.jsonl so the golden outputs can be
checked against something other than the program that produced them.

    generate.py OUT_DIR           write the fixtures
    generate.py --check OUT_DIR   fail if OUT_DIR differs from a fresh run
"""
import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

MASK = (1 << 64) - 1
SAMPLES = 8
TYPES = ("nl", "sdp", "cdp")


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def uniform(self):
        return (self.next() >> 11) / float(1 << 53)


def number(v):
    """JSON number for a Fraction: int when integral, float otherwise."""
    v = Fraction(v)
    return int(v) if v.denominator == 1 else float(v)


def numeric_question(i):
    kind = i % 4
    if kind == 0:
        a, b, c = 3 + i, 4 + i % 5, 1 + i % 3
        text = (f"A store packs {a} boxes with {b} pencils each and keeps {c} loose pencils. "
                f"How many pencils does it have?")
        gold = Fraction(a * b + c)
        right = [("v1 = {a} * {b}", "pencils in the boxes"), ("answer = v1 + {c}", "add the loose ones")]
        wrong = [("v1 = {a} * {b}", "pencils in the boxes"), ("answer = v1 - {c}", "remove the loose ones")]
        wrong_value = Fraction(a * b - c)
        nl = f"There are {a} boxes of {b} pencils, so {a * b} pencils are boxed. With {c} more the total is {{v}}."
    elif kind == 1:
        x, c = 5 + i, 2 + i % 4
        d = 2 * x + c
        text = f"Twice a number increased by {c} is {d}. What is the number?"
        gold = Fraction(x)
        right = [("s = Solve[2*x + {c} == {d}, x]", "set up the equation"), ("answer = x /. s[[1]]", "read the root")]
        wrong = [("s = Solve[2*x - {c} == {d}, x]", "set up the equation"), ("answer = x /. s[[1]]", "read the root")]
        wrong_value = Fraction(d + c, 2)
        nl = f"Subtract {c} from {d} and halve the result: the number is {{v}}."
    elif kind == 2:
        a, b, c = 40 + 4 * i, 1 + i % 3, 4
        text = f"A tank holds {a} liters. If {b}/{c} of the water is used, how many liters are used?"
        gold = Fraction(a * b, c)
        right = [("v1 = {a} * {b} / {c}", "the used share"), ("answer = v1", "")]
        wrong = [("v1 = {a} / {b} * {c}", "the used share"), ("answer = v1", "")]
        wrong_value = Fraction(a, b) * c
        nl = f"{b}/{c} of {a} liters is {{v}} liters."
    else:
        w, k = 3 + i % 5, 2 + i % 3
        area = w * (w + k)
        text = (f"A rectangle is {k} meters longer than it is wide and has an area of {area} square meters. "
                f"How wide is it?")
        gold = Fraction(w)
        right = [("s = Solve[w^2 + {k}*w == {area}, w]", "width times length"), ("answer = w /. s[[2]]", "positive root")]
        wrong = [("s = Solve[w^2 + {k}*w == {area}, w]", "width times length"), ("answer = w /. s[[1]]", "first root")]
        wrong_value = Fraction(-(w + k))
        nl = f"The width w satisfies w(w + {k}) = {area}, so w = {{v}}."
    fmt = dict(a=locals().get("a"), b=locals().get("b"), c=locals().get("c"), d=locals().get("d"),
               k=locals().get("k"), area=locals().get("area"))
    fill = lambda lines: [(code.format(**fmt), note) for code, note in lines]
    return dict(text=text, gold=gold, right=fill(right), wrong=fill(wrong), wrong_value=wrong_value, nl=nl)


CHOICE_SPECS = [(3, 8), (7, 4), (5, 16), (9, 20)]


def choice_question(j):
    a, b = CHOICE_SPECS[j]
    v = Fraction(a, b)
    values = [v, v + Fraction(1, 4), v * 2, v + Fraction(3, 5), v + 1]
    # Rotate so the gold letter varies.
    shift = j % 5
    values = values[shift:] + values[:shift]
    letters = "ABCDE"
    options = {letters[n]: number(values[n]) for n in range(5)}
    gold = letters[values.index(v)]
    wrong_letter = letters[values.index(v + Fraction(1, 4))]
    null_value = Fraction(b, a)
    assert all(abs(null_value - x) > Fraction(1, 1000) for x in values)
    return dict(text=f"What is {a}/{b} written as a decimal?", gold=gold, options=options, a=a, b=b,
                wrong_letter=wrong_letter, null_value=null_value)


def render(lines, comments):
    out = []
    for code, note in lines:
        if comments and note:
            out.append(f"(* {note} *)")
        out.append(code)
    if comments:
        out[-1] += " (* final value *)"
    return "\n".join(out)


def outcome(status, answer=None):
    if answer is None:
        ans = {"variant": "null"}
    elif isinstance(answer, str):
        ans = {"variant": "choice", "value": answer}
    else:
        ans = {"variant": "numeric", "value": number(answer)}
    return {"status": status, "answer": ans}


def pick(rng, weights):
    u = rng.uniform() * sum(w for _, w in weights)
    for name, w in weights:
        if u < w:
            return name
        u -= w
    return weights[-1][0]


def sample(rng, q, kind, p_correct, is_choice):
    fail = [("wrong", 0.5), ("syntax", 0.15), ("runtime", 0.15), ("extract", 0.1), ("null", 0.1)]
    if is_choice:
        fail = [("wrong", 0.3), ("syntax", 0.1), ("runtime", 0.1), ("extract", 0.1), ("null", 0.4)]
    mode = "right" if rng.uniform() < p_correct else pick(rng, fail)
    if kind == "nl":
        return nl_sample(q, mode, is_choice)
    comments = kind == "cdp"
    if is_choice:
        a, b = q["a"], q["b"]
        if mode == "right":
            return render([(f"v1 = {a}/{b}", "the quotient"), ("answer = v1", "")], comments), \
                outcome("ok", q["gold"]), True
        if mode == "wrong":
            return render([(f"v1 = {a}/{b} + 1/4", "quotient plus a quarter"), ("answer = v1", "")], comments), \
                outcome("ok", q["wrong_letter"]), False
        if mode == "null":
            return render([(f"v1 = {b}/{a}", "the reciprocal"), ("answer = v1", "")], comments), \
                outcome("ok"), False
        lines = [(f"v1 = {a}/{b}", "the quotient"), ("answer = v1", "")]
    else:
        if mode == "right":
            return render(q["right"], comments), outcome("ok", q["gold"]), True
        if mode in ("wrong", "null"):
            return render(q["wrong"], comments), outcome("ok", q["wrong_value"]), False
        lines = q["right"]
    if mode == "syntax":
        broken = [(lines[0][0].replace(" = ", " = (", 1), lines[0][1])] + lines[1:]
        return render(broken, comments), outcome("syntax_error"), False
    if mode == "runtime":
        return render([("v0 = 7 / (3 - 3)", "scale factor")] + lines, comments), outcome("runtime_error"), False
    return render(lines[:-1] + [("answer = {1, 2}", "both values")], comments), outcome("extraction_failed"), False


def nl_sample(q, mode, is_choice):
    if is_choice:
        a, b = q["a"], q["b"]
        body = f"Dividing {a} by {b} gives the decimal value."
        if mode == "right":
            return f"{body}\nTherefore, the answer is ({q['gold']}).", outcome("ok", q["gold"]), True
        if mode == "wrong":
            return f"{body}\nTherefore, the answer is {q['wrong_letter']}.", outcome("ok", q["wrong_letter"]), False
        if mode == "null":
            return f"{body}\nTherefore, the answer is {float(q['null_value'])}.", outcome("ok"), False
        return f"{body} It is one of the listed options.", outcome("extraction_failed"), False
    if mode == "right":
        v = q["gold"]
        return q["nl"].format(v=number(v)) + f"\nTherefore, the answer is {number(v)}.", outcome("ok", v), True
    if mode in ("wrong", "null"):
        v = q["wrong_value"]
        return q["nl"].format(v=number(v)) + f"\nTherefore the answer is: {number(v)}", outcome("ok", v), False
    # Text without a marker; syntax and runtime failures do not exist for NL.
    return q["nl"].format(v="unclear") + " We stop here.", outcome("extraction_failed"), False


def build():
    rng = SplitMix64(20240611)
    questions, expected, scores = [], [], []
    cots = {t: [] for t in TYPES}
    difficulty = [0.9, 0.75, 0.6, 0.45, 0.3, 0.15, 0.0]
    type_bias = {"nl": -0.1, "sdp": 0.0, "cdp": 0.05}
    for i in range(20):
        qid = f"e2e-{i + 1:02d}"
        is_choice = i >= 16
        if is_choice:
            q = choice_question(i - 16)
            questions.append({"id": qid, "question": q["text"], "gold": q["gold"], "answer_format": "choice",
                              "options": q["options"], "dataset": "synthetic"})
        else:
            q = numeric_question(i)
            questions.append({"id": qid, "question": q["text"], "gold": number(q["gold"]),
                              "answer_format": "numeric", "dataset": "synthetic"})
        for t in TYPES:
            p = min(1.0, max(0.0, difficulty[i % 7] + type_bias[t]))
            for s in range(SAMPLES):
                cid = f"{qid}-{t}-{s}"
                text, out, correct = sample(rng, q, t, p, is_choice)
                dialect = "none" if t == "nl" else "wolfram"
                cots[t].append({"id": cid, "question_id": qid, "kind": t, "dialect": dialect, "text": text,
                                "origin": "sampled"})
                expected.append({"cot_id": cid, "correct": correct, **out})
                ran = out["status"] == "ok"
                score = 0.2 + 0.5 * correct + 0.25 * rng.uniform() - (0.1 if not ran else 0.0)
                scores.append({"cot_id": cid, "rm_score": round(min(1.0, max(0.0, score)), 4)})
    config = {
        "paths": {"questions": "questions.jsonl", "cots": [f"cots_{t}.jsonl" for t in TYPES],
                  "scores": "scores.jsonl"},
        "filter_null": True,
        "seed": 20240611,
        "stats": {"ks": [1, 2, 4, 8], "trials": 25},
    }
    files = {"questions.jsonl": questions, "expected.jsonl": expected, "scores.jsonl": scores}
    for t in TYPES:
        files[f"cots_{t}.jsonl"] = cots[t]
    out = {name: "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows) for name, rows in files.items()}
    out["config.json"] = json.dumps(config, indent=2, sort_keys=True) + "\n"
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true")
    ap.add_argument("out_dir", type=Path)
    args = ap.parse_args()
    files = build()
    if args.check:
        stale = [n for n, body in files.items()
                 if not (args.out_dir / n).exists() or (args.out_dir / n).read_text(encoding="utf-8") != body]
        if stale:
            print("out of date: " + ", ".join(sorted(stale)), file=sys.stderr)
            return 1
        print(f"{len(files)} fixture files up to date")
        return 0
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, body in files.items():
        (args.out_dir / name).write_text(body, encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
