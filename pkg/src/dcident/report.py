"""Comparison tables and figures for the cost-report command."""

import csv
import io
import json
import os
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import params as P  # noqa: E402
from .cost import CostModel, expected_cost, signature_expected_cost, veron_expected_cost  # noqa: E402
from .keys import key_sizes  # noqa: E402

COLUMNS = ["scheme", "rounds", "total_bits", "prover_bits", "digests_per_round", "published_bits", "gap_pct"]


def comparison(params, model=CostModel(), rounds=None):
    """Rows of (label, CostReport, published figure or None) for the standard comparison."""
    rounds = rounds or params.id_rounds
    veron_r = P.veron_rounds(16)
    published = params is P.P81
    cw = CostModel(model.hash_bits, model.seed_bits, model.count_challenges, True)
    sig_model = CostModel(model.hash_bits, model.seed_bits, False, model.cw_encoding)
    sig_cw = CostModel(model.hash_bits, model.seed_bits, False, True)
    rows = [
        ("Veron", veron_expected_cost(params, veron_r, model),
         P.REFERENCE_TABLE["Veron"]["communication"] if published else None),
        ("Veron compressed", veron_expected_cost(params, veron_r, model, compressed=True), None),
        ("New, uncompressed", expected_cost(params, rounds, model, compressed=False), None),
        ("New protocol", expected_cost(params, rounds, model),
         P.REFERENCE_TABLE["New protocol"]["communication"] if published else None),
        ("New protocol, CW", expected_cost(params, rounds, cw), P.PUBLISHED_AUTH_CW_BITS if published else None),
        ("Signature", signature_expected_cost(params, 5 * rounds, sig_model),
         P.PUBLISHED_SIGNATURE_BITS if published else None),
        ("Signature, CW", signature_expected_cost(params, 5 * rounds, sig_cw),
         P.PUBLISHED_SIGNATURE_CW_BITS if published else None),
    ]
    return rows


def rows_as_records(rows):
    out = []
    for label, rep, published in rows:
        gap = None if published is None else 100.0 * (rep.total - published) / published
        out.append({"scheme": label, "rounds": rep.rounds, "total_bits": round(rep.total, 1),
                    "prover_bits": round(rep.prover_bits, 1),
                    "digests_per_round": round(rep.digests_per_round, 3),
                    "published_bits": published, "gap_pct": None if gap is None else round(gap, 2)})
    return out


def parameter_summary(params):
    p = params
    prob = P.cheat_probability(p.k, p.i)
    return {
        "params": p.name, "n": p.n, "k": p.k, "w": p.w, "i": p.i,
        "cheat_probability": "%d/%d" % (prob.numerator, prob.denominator),
        "rounds_2^-16": P.rounds_for(16, p.k, p.i),
        "rounds_2^-80": P.rounds_for(80, p.k, p.i),
        "sig_rounds": p.sig_rounds,
        "veron_rounds_2^-16": P.veron_rounds(16),
        "soundness_failure_log2": round(P.soundness_bound(p.n, p.k, p.w, p.i), 2),
        "gv_distance": P.gv_distance(p.n, p.k),
        "key_bits": key_sizes(p),
    }


def render_table(params, rows):
    lines = ["parameters: %s (n=%d, k=%d, w=%d, i=%d)" % (params.name, params.n, params.k, params.w, params.i)]
    lines.append("%-20s %6s %11s %11s %9s %11s %8s" % ("scheme", "rounds", "total", "prover",
                                                      "dig/rnd", "published", "gap%"))
    for rec in rows_as_records(rows):
        lines.append("%-20s %6d %11.1f %11.1f %9.2f %11s %8s" % (
            rec["scheme"], rec["rounds"], rec["total_bits"], rec["prover_bits"], rec["digests_per_round"],
            "-" if rec["published_bits"] is None else rec["published_bits"],
            "-" if rec["gap_pct"] is None else "%+.2f" % rec["gap_pct"]))
    summary = parameter_summary(params)
    lines.append("")
    lines.append("cheating probability per round: %s; rounds for 2^-16: %d; for 2^-80: %d (signature uses %d)"
                 % (summary["cheat_probability"], summary["rounds_2^-16"], summary["rounds_2^-80"],
                    summary["sig_rounds"]))
    lines.append("extraction failure term (expression as printed): 2^%.2f" % summary["soundness_failure_log2"])
    lines.append("GV distance %d, secret weight %d" % (summary["gv_distance"], params.w))
    ks = summary["key_bits"]
    lines.append("key bits: matrix %d, public id %d, secret %d raw (e, m) / %d compact (e only)"
                 % (ks["matrix"], ks["public_id"], ks["secret_raw"], ks["secret_compact"]))
    return "\n".join(lines)


def render_csv(rows):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in rows_as_records(rows):
        writer.writerow(rec)
    return buf.getvalue()


def render_json(params, rows):
    return json.dumps({"summary": parameter_summary(params), "rows": rows_as_records(rows),
                       "breakdown": [rep.as_dict() for _, rep, _ in rows]}, indent=2)


def _category(name):
    if "revealed" in name:
        return "revealed digests"
    if "commit" in name or "master" in name:
        return "commitments"
    if name in ("shifts", "bits", "challenges"):
        return "challenges"
    return "answers"


CATEGORIES = ("commitments", "challenges", "revealed digests", "answers")


def plot_breakdown(rows, path):
    """Stacked bars of counted bits by category, one bar per scheme."""
    fig, ax = plt.subplots(figsize=(9, 4.5))
    labels = [label for label, _, _ in rows]
    bottom = [0.0] * len(rows)
    for cat in CATEGORIES:
        vals = [sum(l.bits for l in rep.lines if l.counted and _category(l.name) == cat)
                for _, rep, _ in rows]
        ax.bar(labels, vals, bottom=bottom, label=cat)
        bottom = [b + v for b, v in zip(bottom, vals)]
    for x, (_, _, published) in enumerate(rows):
        if published is not None:
            ax.plot([x - 0.4, x + 0.4], [published, published], color="k", lw=1.5)
    ax.set_ylabel("bits")
    ax.set_title("Communication per session (black ticks: published figures)")
    ax.tick_params(axis="x", rotation=25)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_cheating(params, path, max_rounds=40):
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = list(range(1, max_rounds + 1))
    curves = [
        ("(k+i)/2k = %s" % P.cheat_probability(params.k, params.i), P.cheat_probability(params.k, params.i)),
        ("1/2", Fraction(1, 2)),
        ("2/3 (3-challenge)", Fraction(2, 3)),
    ]
    for label, p in curves:
        ax.plot(xs, [P.log2_fraction(p.numerator ** r, p.denominator ** r) for r in xs], label=label)
    ax.axhline(-16, color="grey", ls="--", lw=1)
    ax.axvline(params.id_rounds, color="grey", ls=":", lw=1)
    ax.set_xlabel("rounds")
    ax.set_ylabel("log2 cheating probability")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_figures(params, rows, directory):
    os.makedirs(directory, exist_ok=True)
    paths = [os.path.join(directory, "cost_breakdown_%s.png" % params.name),
             os.path.join(directory, "cheating_%s.png" % params.name)]
    plot_breakdown(rows, paths[0])
    plot_cheating(params, paths[1])
    return paths
