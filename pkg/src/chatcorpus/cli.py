"""Command-line entry point: ``chatcorpus <command> ...``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from chatcorpus import activity, cascades, classify, graphs, ingest, membership, misinfo, stats, trends
from chatcorpus.config import RunConfig, RunConfigError, parse_period
from chatcorpus.model import Corpus
from chatcorpus.reports import read_csv, write_csv, write_jsonl
from chatcorpus.synthgen import ConfigError, GenConfig, generate

log = logging.getLogger("chatcorpus")

VERSION = "0.1.0"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _header(args, command: str) -> str | None:
    if args.no_header:
        return None
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return json.dumps({"_header": {"tool": "chatcorpus", "version": VERSION,
                                   "command": command, "created": stamp}}, sort_keys=True)


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if getattr(args, "tz_offset", None) is not None:
        cfg.tz_offset = args.tz_offset
    return cfg


def _out(args, cfg: RunConfig) -> Path:
    out = args.out or cfg.out
    if out is None:
        raise UsageError("--out is required (or set \"out\" in the config)")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _corpus_dir(path: Path) -> Path:
    if (path / "corpus" / "messages.jsonl").exists():
        return path / "corpus"
    return path


def _load_corpus(args, cfg: RunConfig) -> Corpus:
    inputs = args.input or cfg.inputs
    if not inputs:
        raise UsageError("--input is required")
    d = _corpus_dir(Path(inputs[0]))
    for name in ("messages.jsonl", "groups.json"):
        if not (d / name).exists():
            raise DataError(f"{d / name}: not found (expected a corpus written by 'ingest')")
    try:
        return ingest.read_corpus(d)
    except (ingest.RecordError, KeyError, ValueError) as exc:
        raise DataError(f"{d}: {exc}") from None


# ---- commands -------------------------------------------------------------

def cmd_synth(args) -> None:
    gen = GenConfig()
    if args.config:
        path = Path(args.config)
        try:
            gen = GenConfig.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if args.seed is not None:
        gen.seed = args.seed
    if args.out is None:
        raise UsageError("--out is required")
    output = generate(gen)
    paths = output.write(args.out)
    print(f"wrote {len(paths)} files to {args.out}")


def cmd_ingest(args) -> int:
    cfg = _config(args)
    out = _out(args, cfg)
    inputs = args.input or cfg.inputs
    if not inputs:
        raise UsageError("--input is required")
    for p in inputs:
        if not Path(p).exists():
            raise DataError(f"{p}: file not found")
    records, rejects = ingest.read_logs(inputs)
    reject_path = out / "rejects.csv"
    ingest.write_rejects(rejects, reject_path)
    if rejects and not args.allow_rejects:
        r = rejects[0]
        raise DataError(f"{r.file}:{r.line_no}: {r.reason} ({len(rejects)} rejected; see {reject_path})")
    corpus, dedup_report = ingest.dedup(records)
    th = cfg.thresholds
    corpus, merge_report = ingest.resolve_group_variants(corpus, th["merge_cosine"], th["merge_overlap"])
    ingest.write_corpus(corpus, out / "corpus")
    write_csv([{"group_uid": g, "read": n, "removed": r} for g, (n, r) in dedup_report.per_group.items()],
              out / "dedup_report.csv", ["group_uid", "read", "removed"])
    write_csv([{"absorbed_uid": m.absorbed_uid, "surviving_uid": m.surviving_uid, "cosine": m.cosine,
                "identical_fraction": m.identical_fraction} for m in merge_report.merges],
              out / "merge_report.csv", ["absorbed_uid", "surviving_uid", "cosine", "identical_fraction"])
    summary = {"total_read": dedup_report.total_read, "removed": dedup_report.removed,
               "true_duplicates_kept": dedup_report.true_duplicates_kept, "rejects": len(rejects),
               "merges": len(merge_report.merges), "groups": len(corpus.groups),
               "messages": len(corpus.messages)}
    write_jsonl([summary], out / "ingest_summary.jsonl", _header(args, "ingest"))
    print(f"{summary['messages']} messages in {summary['groups']} groups "
          f"({summary['removed']} copies removed, {summary['merges']} merges)")
    return 0


def cmd_metrics(args) -> None:
    cfg = _config(args)
    out = _out(args, cfg)
    corpus = _load_corpus(args, cfg)
    tz = cfg.tz_offset
    write_csv(membership.membership_table(corpus), out / "membership.csv",
              ["group_uid", "size", "p_CO", "p_VE", "p_other", "entropy", "simpson"])
    degrees = membership.co_membership_degrees(corpus)
    write_csv([{"user": str(u), "groups": t, "to_CO": c, "to_VE": v}
               for u, (t, c, v) in sorted(degrees.items(), key=lambda kv: kv[0].e164)],
              out / "co_membership.csv", ["user", "groups", "to_CO", "to_VE"])
    write_csv(activity.group_concentration_table(corpus, tz), out / "activity.csv",
              ["group_uid", "activity", "hh", "top5", "gini"])
    write_csv(activity.length_stats(corpus), out / "lengths.csv",
              ["kind", "forwarded", "metric", "n", "mean", "p10", "p25", "p50", "p75", "p90"])
    for kind in ("image", "video"):
        write_csv(activity.reshare_analysis(corpus, kind, tz), out / f"reshares_{kind}.csv",
                  ["media_hash", "kind", "duration_s", "n_shares", "span_hours", "first_group",
                   "size", "entropy", "degree", "activity", "hh", "gini"])
    write_csv(activity.repeated_text_shares(corpus), out / "repeated_texts.csv", ["text", "n_shares"])
    print(f"metrics for {len(corpus.groups)} groups written to {out}")


def _graph_outputs(g: graphs.SimpleGraph, prefix: str, out: Path) -> dict:
    write_csv([{"node_a": str(a), "node_b": str(b)} for a, b in g.edges()],
              out / f"{prefix}_edges.csv", ["node_a", "node_b"])
    rows = graphs.node_metrics(g)
    for r in rows:
        r["node"] = str(r["node"])
    write_csv(rows, out / f"{prefix}_nodes.csv", ["node", "degree", "component_id", "avg_path", "clustering"])
    if rows:
        classes = graphs.percentile_classes({r["node"]: r["degree"] for r in rows})
        write_csv([{"node": r["node"], "degree": r["degree"], "degree_class": classes[r["node"]]} for r in rows],
                  out / f"{prefix}_degree_classes.csv", ["node", "degree", "degree_class"])
    comps = graphs.connected_components(g)
    return {"graph": prefix, "nodes": len(g), "edges": len(g.edges()),
            "components": [len(c) for c in comps], "diameter": graphs.diameter(g),
            "degree_distribution": {str(k): v for k, v in graphs.degree_distribution(g).items()}}


def cmd_graph(args) -> None:
    cfg = _config(args)
    out = _out(args, cfg)
    corpus = _load_corpus(args, cfg)
    summaries = [_graph_outputs(graphs.build_group_graph(corpus), "group", out)]
    if not args.skip_users:
        summaries.append(_graph_outputs(graphs.build_user_graph(corpus), "user", out))
    write_jsonl(summaries, out / "graph_summary.jsonl", _header(args, "graph"))
    print(f"graph reports written to {out}")


def cmd_cascades(args) -> None:
    cfg = _config(args)
    out = _out(args, cfg)
    corpus = _load_corpus(args, cfg)
    found, unresolved = cascades.resolve_replies(corpus)
    write_csv(cascades.cascade_table(found), out / "cascades.csv",
              ["root_id", "group_uid", "size", "virality_ours", "virality_goel", "diameter", "duration_min"])
    vir = cascades.message_virality(found)
    counts = cascades.reply_counts(corpus)
    rows = []
    for m in corpus.messages:
        root, v = vir.get(m.id, (None, None))
        rows.append({"message_id": m.id, "group_uid": m.group_uid, "root_id": root, "virality": v,
                     "replies": counts.get(m.id, 0), "competing": cascades.competing_count(corpus, m)})
    write_csv(rows, out / "message_virality.csv",
              ["message_id", "group_uid", "root_id", "virality", "replies", "competing"])
    write_csv([{"group_uid": uid, "virality": cascades.group_virality(corpus, uid, found)}
               for uid in sorted(corpus.groups)], out / "group_virality.csv", ["group_uid", "virality"])
    write_csv(cascades.reply_hour_profile(corpus, cfg.tz_offset), out / "reply_hours.csv",
              ["hour", "messages", "replies", "replies_per_message"])
    write_jsonl([{"cascades": len(found), "unresolved_replies": unresolved}],
                out / "cascades_summary.jsonl", _header(args, "cascades"))
    print(f"{len(found)} cascades, {unresolved} unresolved replies")


def _labeled_corpus(path) -> misinfo.LabeledCorpus:
    if path is None:
        raise UsageError("--labeled is required")
    if not Path(path).exists():
        raise DataError(f"{path}: file not found")
    return misinfo.LabeledCorpus.read(path)


def cmd_misinfo_score(args) -> None:
    cfg = _config(args)
    out = _out(args, cfg)
    corpus = _load_corpus(args, cfg)
    labeled = _labeled_corpus(args.labeled)
    th = args.threshold if args.threshold is not None else cfg.thresholds["candidate"]
    cands = misinfo.score_candidates(corpus, labeled, th)
    misinfo.write_candidates(cands, out / "candidates.csv")
    print(f"{len(cands)} candidates at cosine >= {th}")


def _decisions_from_truth(path: Path, cands) -> dict[str, str]:
    truth = {r["message_id"] for r in read_csv(path)}
    return {c.message_id: "true_positive" if c.message_id in truth else "false_positive" for c in cands}


def cmd_misinfo_merge(args) -> None:
    cfg = _config(args)
    out = _out(args, cfg)
    corpus = _load_corpus(args, cfg)
    labeled = _labeled_corpus(args.labeled)
    cands = misinfo.read_candidates(args.candidates)
    if args.decisions:
        decisions = misinfo.read_decisions(args.decisions)
    elif args.truth:
        decisions = _decisions_from_truth(Path(args.truth), cands)
    else:
        raise UsageError("give --decisions or --truth")
    tps, reviewed = misinfo.apply_decisions(cands, decisions)
    label_of_item = {it.corpus_id: it.label for it in labeled.items}
    labels = misinfo.known_matches(corpus, labeled)
    for c in reviewed:
        if c.message_id in tps:
            labels[c.message_id] = label_of_item[c.best_match_corpus_id]
    write_csv([{"message_id": c.message_id, "max_similarity": c.max_similarity, "decision": c.decision}
               for c in reviewed], out / "reviewed.csv", ["message_id", "max_similarity", "decision"])
    th = args.threshold if args.threshold is not None else cfg.thresholds["variant"]
    cluster_rows, member_rows = [], []
    index = misinfo.scoring_index(corpus, labeled)
    next_id = 0
    for label in misinfo.LABELS:
        msgs = [m for m in corpus.messages if labels.get(m.id) == label]
        for cl in misinfo.merge_variants(msgs, th, index):
            cid = next_id + cl.cluster_id
            cluster_rows.append({"cluster_id": cid, "label": label, "n_shares": cl.n_shares,
                                 "n_users": cl.n_users, "n_groups": cl.n_groups,
                                 "shares_per_user": cl.shares_per_user,
                                 "shares_per_group": cl.shares_per_group,
                                 "canonical_text": cl.canonical_text})
            member_rows += [{"message_id": mid, "label": label, "cluster_id": cid} for mid in cl.message_ids]
        next_id = len(cluster_rows)
    write_csv(cluster_rows, out / "clusters.csv",
              ["cluster_id", "label", "n_shares", "n_users", "n_groups", "shares_per_user",
               "shares_per_group", "canonical_text"])
    member_rows.sort(key=lambda r: r["message_id"])
    write_csv(member_rows, out / "labeled_messages.csv", ["message_id", "label", "cluster_id"])
    print(f"{len(member_rows)} labeled messages in {len(cluster_rows)} clusters")


def _read_labels(path) -> dict[str, str]:
    if path is None:
        raise UsageError("--labels is required")
    rows = read_csv(path)
    for i, r in enumerate(rows, 2):
        if "message_id" not in r or "label" not in r:
            raise DataError(f"{path}:{i}: needs message_id and label columns")
        if r["label"] not in misinfo.LABELS:
            raise DataError(f"{path}:{i}: unknown label {r['label']!r}")
    return {r["message_id"]: r["label"] for r in rows}


def cmd_misinfo_prevalence(args) -> None:
    cfg = _config(args)
    out = _out(args, cfg)
    corpus = _load_corpus(args, cfg)
    labels = _read_labels(args.labels)
    for label in misinfo.LABELS:
        ids = {k for k, v in labels.items() if v == label}
        groups_rows, user_rows = misinfo.prevalence(corpus, ids, label)
        write_csv(groups_rows, out / f"prevalence_groups_{label}.csv",
                  ["group_uid", "label", "meaningful", "labeled", "message_prevalence", "members",
                   "sharers", "user_prevalence"])
        write_csv(user_rows, out / f"prevalence_users_{label}.csv",
                  ["user", "label", "meaningful", "frequency", "prevalence"])
    print(f"prevalence reports written to {out}")


EVAL_HEADER = ["run", "classifier", "stage", "tp", "fp", "fn", "tn", "recall", "precision"]


def _label_value(v: str, path, line: int) -> int:
    v = v.strip().lower()
    if v in ("1", "scam", "true"):
        return 1
    if v in ("0", "not_scam", "false"):
        return 0
    raise DataError(f"{path}:{line}: bad label value {v!r}")


def cmd_classify(args) -> None:
    cfg = _config(args)
    out = _out(args, cfg)
    if args.predictions:
        rows = read_csv(args.predictions)
        preds, labels = [], []
        for i, r in enumerate(rows, 2):
            if "prediction" not in r or "label" not in r:
                raise DataError(f"{args.predictions}:{i}: needs prediction and label columns")
            preds.append(_label_value(r["prediction"], args.predictions, i))
            labels.append(_label_value(r["label"], args.predictions, i))
        rep = classify.evaluate(preds, labels)
        write_csv([{"run": 0, "classifier": "injected", "stage": "test", **rep.as_row()}],
                  out / "evaluation.csv", EVAL_HEADER)
        print(f"recall {rep.recall}, precision {rep.precision}")
        return
    corpus = _load_corpus(args, cfg)
    labels = _read_labels(args.labels)
    specs = cfg.classifiers
    if args.run:
        path = Path(args.run)
        try:
            d = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{exc.lineno}: {exc.msg}") from None
        try:
            specs = [classify.RunSpec.from_dict(x) for x in (d if isinstance(d, list) else [d])]
        except (TypeError, ValueError) as exc:
            raise DataError(f"{path}: {exc}") from None
    scam_ids = {k for k, v in labels.items() if v == "scam"}
    ds = classify.build_dataset(corpus, scam_ids)
    rows = []
    for i, spec in enumerate(specs):
        folds, final = classify.run(spec, ds)
        for j, rep in enumerate(folds, 1):
            rows.append({"run": i, "classifier": spec.classifier, "stage": f"fold{j}", **rep.as_row()})
        rows.append({"run": i, "classifier": spec.classifier, "stage": "test", **final.as_row()})
        print(f"run {i} {spec.classifier}: recall {final.recall}, precision {final.precision}")
    write_csv(rows, out / "evaluation.csv", EVAL_HEADER)


def cmd_trends(args) -> None:
    cfg = _config(args)
    out = _out(args, cfg)
    corpus = _load_corpus(args, cfg)
    tz = cfg.tz_offset
    stems = args.stems.split(",") if args.stems else cfg.stems
    for gran in trends.GRANULARITIES:
        series = trends.keyword_daily_share(corpus, stems, gran, cfg.min_words, tz)
        write_csv(series.rows(), out / f"keyword_{gran}.csv", ["date", "value", "numerator", "denominator"])
    summary = []
    for day_class in ("weekday", "weekend"):
        for bucket in (30, 60):
            prof = trends.hourly_profile(corpus, None, day_class, bucket, tz)
            write_csv(prof.rows(), out / f"profile_{day_class}_{bucket}.csv", ["bucket_start", "proportion"])
        summary.append({"day_class": day_class, "messages": prof.total,
                        "nocturnal_share": prof.nocturnal_share})
    periods = dict(cfg.periods)
    if args.period_a:
        periods["a"] = parse_period(args.period_a)
    if args.period_b:
        periods["b"] = parse_period(args.period_b)
    if periods:
        if set(periods) != {"a", "b"}:
            raise UsageError("give both periods a and b")
        rows = []
        for metric in trends.PERIOD_METRICS:
            for fwd in (None, False):
                try:
                    cmp = trends.period_compare(corpus, periods["a"], periods["b"], metric, tz, fwd, stems)
                except stats.DegenerateDataError as exc:
                    log.info("skipping %s: %s", metric, exc)
                    continue
                rows.append({**cmp.as_row(), "forwarded": "any" if fwd is None else "no"})
        write_csv(rows, out / "periods.csv",
                  ["metric", "forwarded", "mean_a", "mean_b", "n_a", "n_b", "t", "dof", "p"])
    rows = []
    for metric in trends.TREND_METRICS:
        try:
            fit = trends.falsification_trend(corpus, metric, tz)
        except (stats.DegenerateDataError, stats.RankDeficiencyError) as exc:
            log.info("skipping %s: %s", metric, exc)
            continue
        for r in fit.table():
            rows.append({"metric": metric, **r, "n": fit.n, "dof": fit.dof, "r_squared": fit.r_squared})
    write_csv(rows, out / "falsification.csv", ["metric", "term", "coef", "se", "t", "p", "n", "dof", "r_squared"])
    write_csv(trends.user_day_activity(corpus, tz), out / "user_days.csv", ["user", "date", "messages"])
    write_jsonl(summary, out / "trends_summary.jsonl", _header(args, "trends"))
    print(f"trend reports written to {out}")


def _numeric_columns(path, names: list[str]) -> dict[str, list[float]]:
    if not Path(path).exists():
        raise DataError(f"{path}: file not found")
    rows = read_csv(path)
    cols: dict[str, list[float]] = {n: [] for n in names}
    for n in names:
        if rows and n not in rows[0]:
            raise DataError(f"{path}: no column {n!r}")
    for i, r in enumerate(rows, 2):
        for n in names:
            v = (r.get(n) or "").strip()
            if v == "":
                continue
            try:
                cols[n].append(float(v))
            except ValueError:
                raise DataError(f"{path}:{i}: column {n} has non-numeric value {v!r}") from None
    return cols


def _emit(rows: list[dict], header: list[str], out) -> None:
    if out:
        write_csv(rows, out, header)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["" if r.get(h) is None else r.get(h) for h in header])


def cmd_stats(args) -> None:
    if args.test == "ols":
        yname, terms, _ = stats.parse_formula(args.formula)
        cols = _numeric_columns(args.input, [yname, *terms])
        lengths = {len(v) for v in cols.values()}
        if len(lengths) != 1:
            raise DataError(f"{args.input}: formula columns have blanks in different rows")
        fit = stats.ols_formula(cols, args.formula)
        table = [{**r, "n": fit.n, "dof": fit.dof, "r_squared": fit.r_squared} for r in fit.table()]
        _emit(table, ["term", "coef", "se", "t", "p", "n", "dof", "r_squared"], args.out)
    elif args.test == "ttest":
        cols = _numeric_columns(args.input, [args.a, args.b])
        t, dof, p = stats.welch_t(cols[args.a], cols[args.b])
        _emit([{"t": t, "dof": dof, "p": p}], ["t", "dof", "p"], args.out)
    elif args.test == "anova":
        names = args.columns.split(",")
        cols = _numeric_columns(args.input, names)
        f, d1, d2, p = stats.anova_oneway([cols[n] for n in names])
        _emit([{"F": f, "dof1": d1, "dof2": d2, "p": p}], ["F", "dof1", "dof2", "p"], args.out)
    else:
        cols = _numeric_columns(args.input, [args.x, args.y])
        r, p = stats.pearson(cols[args.x], cols[args.y])
        _emit([{"r": r, "p": p}], ["r", "p"], args.out)


# ---- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", nargs="+", help="input files or corpus directory")
    common.add_argument("--out", help="output directory")
    common.add_argument("--tz-offset", type=float, default=None, help="local UTC offset in hours (default -5)")
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--no-header", action="store_true", help="omit the provenance header line in summaries")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized steps")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="chatcorpus", description="Chat-corpus analytics pipeline.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("ingest", parents=[common], help="read, deduplicate and merge raw logs")
    s.add_argument("--allow-rejects", action="store_true", help="continue past malformed lines")
    s.set_defaults(func=cmd_ingest)

    for name, fn, text in (("metrics", cmd_metrics, "membership and activity reports"),
                           ("cascades", cmd_cascades, "reply cascades and virality")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.set_defaults(func=fn)

    s = sub.add_parser("graph", parents=[common], help="group and user co-membership graphs")
    s.add_argument("--skip-users", action="store_true", help="only build the group graph")
    s.set_defaults(func=cmd_graph)

    m = sub.add_parser("misinfo", help="misinformation labeling")
    msub = m.add_subparsers(dest="step", required=True, parser_class=_Parser)
    s = msub.add_parser("score", parents=[common], help="rank messages against a labeled corpus")
    s.add_argument("--labeled", help="labeled corpus (line-delimited)")
    s.add_argument("--threshold", type=float, default=None)
    s.set_defaults(func=cmd_misinfo_score)
    s = msub.add_parser("merge", parents=[common], help="apply review decisions and cluster variants")
    s.add_argument("--labeled", help="labeled corpus (line-delimited)")
    s.add_argument("--candidates", required=True)
    s.add_argument("--decisions", help="CSV message_id,decision")
    s.add_argument("--truth", help="CSV with message_id column; listed candidates count as true positives")
    s.add_argument("--threshold", type=float, default=None)
    s.set_defaults(func=cmd_misinfo_merge)
    s = msub.add_parser("prevalence", parents=[common], help="per-group and per-user prevalence")
    s.add_argument("--labels", help="CSV message_id,label")
    s.set_defaults(func=cmd_misinfo_prevalence)

    s = sub.add_parser("classify", parents=[common], help="train and evaluate scam classifiers")
    s.add_argument("--labels", help="CSV message_id,label")
    s.add_argument("--run", help="JSON run spec (object or list)")
    s.add_argument("--predictions", help="CSV prediction,label to evaluate directly")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("trends", parents=[common], help="keyword series, profiles, period comparisons")
    s.add_argument("--stems", help="comma-separated stems matched by prefix")
    s.add_argument("--period-a", help="START:END inclusive ISO dates")
    s.add_argument("--period-b", help="START:END inclusive ISO dates")
    s.set_defaults(func=cmd_trends)

    st = sub.add_parser("stats", help="ad-hoc statistics over a CSV")
    ssub = st.add_subparsers(dest="test", required=True, parser_class=_Parser)
    s = ssub.add_parser("ols", parents=[common])
    s.add_argument("--formula", required=True, help="y ~ x1 + x2")
    s = ssub.add_parser("ttest", parents=[common])
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s = ssub.add_parser("anova", parents=[common])
    s.add_argument("--columns", required=True, help="comma-separated sample columns")
    s = ssub.add_parser("pearson", parents=[common])
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    for a in ssub.choices.values():
        a.set_defaults(func=cmd_stats)
    return p


DATA_ERRORS = (DataError, ConfigError, RunConfigError, ingest.RecordError, misinfo.LabelingError,
               stats.DegenerateDataError, stats.RankDeficiencyError, FileNotFoundError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"chatcorpus: error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "stats" and not args.input:
        print("chatcorpus: error: --input is required", file=sys.stderr)
        return 1
    if args.command == "stats":
        args.input = args.input[0]
    try:
        args.func(args)
    except UsageError as exc:
        print(f"chatcorpus: error: {exc}", file=sys.stderr)
        return 1
    except DATA_ERRORS as exc:
        print(f"chatcorpus: data error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError) as exc:
        print(f"chatcorpus: data error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
