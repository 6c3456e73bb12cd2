"""Recomputes report.json from an output directory's raw records.

Scores come from generations/elicitations, labels from greedy answers vs
references, metrics from sklearn/scipy. Exits non-zero on any mismatch.

usage: oracle_report.py <config.json>
"""
import json
import math
import os
import re
import string
import sys

import numpy as np
from scipy.stats import entropy, pointbiserialr
from sklearn.metrics import roc_auc_score

TOL = 1e-9
FLOOR = 1e-12
ARTICLES = {"a", "an", "the"}
NUMBERS = {w: str(i) for i, w in enumerate(
    "zero one two three four five six seven eight nine ten".split())}
FAMILY = {"blur": "visual", "brightness_dark": "visual", "brightness_bright": "visual",
          "cutout": "visual", "gaussian_noise": "visual", "pixelate": "visual",
          "salt_pepper": "visual", "solarize": "visual", "typos": "textual",
          "dropwords": "textual", "shuffle": "textual", "inv": "textual", "sbj": "textual",
          "amb": "crossmodal", "ive": "crossmodal", "attention_mask": "crossmodal"}


def read_jsonl(path):
    if not os.path.exists(path):
        return []
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def words(text):
    text = "".join(c for c in text if c not in string.punctuation)
    return text.lower().split()


def norm(text):
    return " ".join(NUMBERS.get(w, w) for w in words(text) if w not in ARTICLES)


def rouge_l(a, b):
    x, y = words(a), words(b)
    if not x or not y:
        return 0.0
    table = [[0] * (len(y) + 1) for _ in range(len(x) + 1)]
    for i, xi in enumerate(x):
        for j, yj in enumerate(y):
            table[i + 1][j + 1] = table[i][j] + 1 if xi == yj else max(table[i][j + 1],
                                                                          table[i + 1][j])
    lcs = table[-1][-1]
    if lcs == 0:
        return 0.0
    p, r = lcs / len(x), lcs / len(y)
    return 2 * p * r / (p + r)


def entail(premise, hypothesis):
    return 1.0 if norm(premise) == norm(hypothesis) else 0.0


def sentences(text):
    parts = [s.strip() for s in re.split(r"(?<=[.?!])\s+", text)]
    parts = [s for s in parts if s]
    return parts or [text]


def scores_for(greedy, samples, p_true):
    out = {}
    lp = greedy.get("token_logprobs")
    if lp:
        out["MSP"] = -sum(lp)
        out["Perplexity"] = -sum(lp) / len(lp)
        un = greedy.get("unconditional_logprobs")
        if un:
            out["PMI"] = -sum(c - u for c, u in zip(lp, un)) / len(lp)
    if greedy.get("step_entropies"):
        out["MeanTokenEntropy"] = float(np.mean(greedy["step_entropies"]))
    if p_true is not None:
        out["PTrue"] = -math.log(max(min(p_true, 1.0), FLOOR))
    texts = [s["text"] for s in samples]
    m = len(texts)
    if m >= 2:
        # clusters: components of the mutual-entailment graph
        label = list(range(m))
        for i in range(m):
            for j in range(m):
                if entail(texts[i], texts[j]) > 0.5 and entail(texts[j], texts[i]) > 0.5:
                    old, new = label[j], label[i]
                    label = [new if l == old else l for l in label]
        lps = [s.get("token_logprobs") for s in samples]
        weights = ([math.exp(sum(x) / len(x)) for x in lps] if all(lps) else [1.0] * m)
        mass = {}
        for l, w in zip(label, weights):
            mass[l] = mass.get(l, 0.0) + w
        out["SemanticEntropy"] = float(entropy(list(mass.values())))
        pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
        out["LexSim"] = -float(np.mean([rouge_l(texts[i], texts[j]) for i, j in pairs]))
        w = np.array([[1.0 if i == j else 0.5 * (entail(texts[i], texts[j]) +
                                                 entail(texts[j], texts[i]))
                       for j in range(m)] for i in range(m)])
        out["DegMat"] = float(np.trace(m * np.eye(m) - np.diag(w.sum(axis=1)))) / m / m
        c = []
        for i in range(m):
            ss = sentences(texts[i])
            c.append(np.mean([np.mean([entail(texts[j], s) for s in ss])
                              for j in range(m) if j != i]))
        out["LUQ"] = min(max(1.0 - float(np.mean(c)), 0.0), 1.0)
    return out


def best_f1(pos, neg):
    scores = np.array(list(pos) + list(neg))
    labels = np.array([1] * len(pos) + [0] * len(neg))
    best = 0.0
    for t in set(scores.tolist()):
        pred = scores >= t
        tp = int(np.sum(pred & (labels == 1)))
        if tp == 0:
            continue
        prec, rec = tp / int(np.sum(pred)), tp / int(np.sum(labels))
        best = max(best, 2 * prec * rec / (prec + rec))
    return best


def cell(pairs, clean, labels):
    """pairs: {key: (u_clean, u_pert)}, clean: list, labels: {key: h}"""
    pos = [p for _, p in pairs.values()]
    c = {}
    if pos and clean:
        y = [1] * len(pos) + [0] * len(clean)
        c["auroc"] = roc_auc_score(y, pos + clean)
        c["best_f1"] = best_f1(pos, clean)
    c["urr"] = sum(p > u for u, p in pairs.values()) / len(pairs) if pairs else None
    keys = [k for k in pairs if k in labels]
    d = [pairs[k][1] - pairs[k][0] for k in keys]
    h = [labels[k] for k in keys]
    if len(keys) >= 2 and 0 < sum(h) < len(h) and np.std(d) > 0:
        c["hcc"] = float(pointbiserialr(h, d)[0])
    c["hallucination_rate"] = 100.0 * sum(labels.values()) / len(labels) if labels else None
    return c


def compare(where, expected, got, errors):
    for metric, value in expected.items():
        actual = got.get(metric)
        if value is None:
            continue
        if not isinstance(actual, (int, float)) or abs(actual - value) > TOL:
            errors.append(f"{where}.{metric}: report {actual!r}, oracle {value!r}")


def main():
    cfg_path = sys.argv[1]
    base = os.path.dirname(os.path.abspath(cfg_path))
    cfg = json.load(open(cfg_path))
    out = os.path.join(base, cfg.get("output_dir", "out"))
    instances = read_jsonl(os.path.join(base, cfg["dataset"]))
    variants = read_jsonl(os.path.join(out, "variants.jsonl"))
    gens = read_jsonl(os.path.join(out, "generations.jsonl"))
    elic = {e["variant_id"]: e["p_true"]
            for e in read_jsonl(os.path.join(out, "elicitations.jsonl"))}
    report = json.load(open(os.path.join(out, "report.json")))
    refs = {i["id"]: i.get("reference_answers", []) for i in instances}
    label_mode = cfg.get("label_mode", "flip")

    greedy, samples = {}, {}
    for g in gens:
        if g["mode"] == "greedy":
            greedy[g["variant_id"]] = g
        else:
            samples.setdefault(g["variant_id"], []).append(g)
    scores = {}
    for vid, g in greedy.items():
        ss = sorted(samples.get(vid, []), key=lambda s: s["sample_index"])
        scores[vid] = scores_for(g, ss, elic.get(vid))

    clean_vid, pert_vid, correct = {}, {}, {}
    for v in variants:
        if not isinstance(v["spec"], dict):
            clean_vid[v["instance_id"]] = v["variant_id"]
        else:
            pert_vid[(v["instance_id"], v["spec"]["kind"])] = v["variant_id"]
        g = greedy.get(v["variant_id"])
        if g and refs[v["instance_id"]]:
            correct[v["variant_id"]] = norm(g["text"]) in {norm(r) for r in refs[v["instance_id"]]}

    errors = []
    # every score the pipeline wrote must match the oracle's within TOL
    for s in read_jsonl(os.path.join(out, "scores.jsonl")):
        mine = scores.get(s["variant_id"], {}).get(s["estimator"])
        if s["status"] == "ok" and (mine is None or abs(mine - s["score"]) > TOL):
            errors.append(f"score {s['variant_id']} {s['estimator']}: {s['score']} vs {mine}")
        elif s["status"] == "ok":
            # Metrics below rank the checked values; recomputed floats can
            # differ in the last bit and flip ties.
            scores[s["variant_id"]][s["estimator"]] = s["score"]

    kinds = [p["kind"] for p in cfg["perturbations"]]
    for est in report["meta"]["estimators"]:
        fam_pairs, fam_labels, fam_clean, fam_cells = {}, {}, {}, {}
        for kind in kinds:
            pairs, labels = {}, {}
            for inst in instances:
                iid = inst["id"]
                cv, pv = clean_vid.get(iid), pert_vid.get((iid, kind))
                if cv is None or pv is None:
                    continue
                if cv in correct and pv in correct:
                    cc, pc = correct[cv], correct[pv]
                    labels[iid] = (cc and not pc) if label_mode == "flip" else (not pc)
                if est in scores.get(cv, {}) and est in scores.get(pv, {}):
                    pairs[iid] = (scores[cv][est], scores[pv][est])
            got = report["results"][est][kind]
            if not pairs:
                if got["status"] != "unavailable":
                    errors.append(f"{est}.{kind}: oracle has no pairs, report {got['status']}")
                continue
            expected = cell(pairs, [u for u, _ in pairs.values()], labels)
            compare(f"{est}.{kind}", expected, got, errors)
            fam = FAMILY[kind]
            for k, v in pairs.items():
                fam_pairs.setdefault(fam, {})[f"{kind}|{k}"] = v
                fam_clean.setdefault(fam, {})[k] = v[0]
            for k, v in labels.items():
                fam_labels.setdefault(fam, {})[f"{kind}|{k}"] = v
            fam_cells.setdefault(fam, []).append(expected)
        for fam, pairs in fam_pairs.items():
            got = report["aggregates"][est][fam]
            compare(f"{est}.{fam}.pooled",
                    cell(pairs, list(fam_clean[fam].values()), fam_labels.get(fam, {})),
                    got["pooled"], errors)
            mean = {}
            for metric in ("auroc", "best_f1", "urr", "hcc", "hallucination_rate"):
                vals = [c[metric] for c in fam_cells[fam] if c.get(metric) is not None]
                if vals:
                    mean[metric] = float(np.mean(vals))
            compare(f"{est}.{fam}.mean", mean, got["mean"], errors)

    for e in errors:
        print("MISMATCH", e)
    print(f"oracle: {len(errors)} mismatches")
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main())
