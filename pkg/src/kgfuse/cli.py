"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
malformed inputs, bad values), 3 numeric failure (NaN/Inf surfaced).
"""

import argparse
import json
import math
import sys

from .embeddings import init_random, load_pretrained, tokenize_mention
from .errors import DataError, NumericError, ParseError
from .explorer import (
    CandidateTriple,
    WindowTagger,
    load_corpus,
    load_schema,
    load_tagger,
    save_tagger,
)
from .fusion import FusionConfig, align_relations, run_collaboration
from .graph import load_triples
from .kge import ConvTripleScorer, grad_check, gradcheck_setup, load_model, save_model
from .metrics import evaluate_pools, load_pools, make_pools, prf1, save_pools
from .sampling import BenchmarkPairs


class _Parser(argparse.ArgumentParser):
    """argparse flavour whose usage failures exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _emit(doc):
    print(json.dumps(doc, sort_keys=True, indent=2))


def _load_kg(path):
    return load_triples(path)


def _load_candidates(path):
    """4-column TSV: head, trigger mention, trigger type, tail."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ParseError(path, lineno,
                                 f"expected 4 tab-separated fields, got {len(parts)}")
            try:
                out.append(CandidateTriple(parts[0].strip(), parts[1].strip(),
                                           parts[2].strip(), parts[3].strip(),
                                           lineno))
            except (DataError, ValueError) as exc:
                raise ParseError(path, lineno, str(exc)) from exc
    return out


def _table_for(args, kg, extra_mentions=()):
    """Pretrained table when --emb was given, otherwise a seeded one."""
    if getattr(args, "emb", None):
        return load_pretrained(args.emb, args.dim, oov_seed=args.seed)
    tokens = set()
    for t in kg.iter_triples():
        for m in (t.head, t.relation, t.tail):
            tokens.update(tokenize_mention(m))
    for m in extra_mentions:
        tokens.update(tokenize_mention(m))
    return init_random(sorted(tokens), args.dim, args.seed)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_fuse(args):
    prior = _load_kg(args.kg)
    schema = load_schema(args.schema)
    corpus = load_corpus(args.corpus, schema)
    config = FusionConfig(
        mention_weight=args.gamma,
        alignment_threshold=args.epsilon,
        top_k=args.top_k,
        rounds=args.rounds,
        benchmark_k=args.k_benchmarks,
        neg_budget=args.neg_budget,
        seed=args.seed,
    )
    kge = ConvTripleScorer(dim=args.dim, n_kernels=args.kernels,
                           kernel_width=args.kernel_width,
                           learning_rate=args.lr, epochs=args.epochs,
                           seed=args.seed)
    explorer = WindowTagger(schema=schema, alpha=args.alpha,
                            learning_rate=args.lr, epochs=args.epochs,
                            seed=args.seed)
    table = None
    if args.emb:
        table = load_pretrained(args.emb, args.dim, oov_seed=args.seed)
    report = run_collaboration(prior, corpus, schema, config, kge=kge,
                               explorer=explorer, table=table,
                               out_dir=args.out)
    _emit({
        "rounds": len(report.rounds),
        "kg_size": len(report.final_kg),
        "out": args.out,
    })
    return 0


def _cmd_train_kge(args):
    kg = _load_kg(args.kg)
    scorer = ConvTripleScorer(dim=args.dim, n_kernels=args.kernels,
                              kernel_width=args.kernel_width,
                              learning_rate=args.lr, epochs=args.epochs,
                              batch_size=args.batch_size,
                              optimizer=args.optimizer, seed=args.seed)
    table = _table_for(args, kg)
    scorer.fit(kg, table=table)
    if not math.isfinite(scorer.final_loss_):
        raise NumericError(f"training diverged: loss {scorer.final_loss_}")
    save_model(scorer.model_, args.out)
    _emit({"final_loss": scorer.final_loss_, "model": args.out})
    return 0


def _cmd_eval_kgf(args):
    model = load_model(args.model)
    kg = _load_kg(args.kg)
    try:
        positives, pools = load_pools(args.pools)
    except FileNotFoundError:
        positives, pools = make_pools(kg, pool_size=args.pool_size,
                                      seed=args.seed)
        save_pools(positives, pools, args.pools)
    result = evaluate_pools(model, positives, pools)
    doc = {
        "mrr": result.mrr(normalize=not args.unnormalized),
        "hits": {str(n): result.hit_at_n(n) for n in (10, 20, 30)},
    }
    if not all(math.isfinite(v) for v in [doc["mrr"], *doc["hits"].values()]):
        raise NumericError("non-finite metric value")
    _emit(doc)
    return 0


def _cmd_train_jee(args):
    schema = load_schema(args.schema)
    corpus = load_corpus(args.corpus, schema)
    pairs = None
    if args.pairs:
        with open(args.pairs, encoding="utf-8") as fh:
            doc = json.load(fh)
        pairs = BenchmarkPairs(
            positives=[tuple(p) for p in doc.get("positives", [])],
            negatives=[tuple(p) for p in doc.get("negatives", [])],
        )
    tagger = WindowTagger(schema=schema, alpha=args.alpha,
                          learning_rate=args.lr, epochs=args.epochs,
                          hidden=args.hidden, seed=args.seed)
    mentions = [tok for s in corpus for tok in s.tokens]
    if args.emb:
        table = load_pretrained(args.emb, args.dim, oov_seed=args.seed)
    else:
        table = init_random(sorted({t.lower() for t in mentions}),
                            args.dim, args.seed)
    tagger.fit(corpus, table, pairs=pairs)
    if not math.isfinite(tagger.final_loss_):
        raise NumericError(f"training diverged: loss {tagger.final_loss_}")
    save_tagger(tagger, args.out)
    _emit({"final_loss": tagger.final_loss_, "model": args.out})
    return 0


def _cmd_eval_jee(args):
    tagger = load_tagger(args.model)
    corpus = load_corpus(args.corpus, tagger.schema)
    predicted = tagger.predict(corpus)
    precision, recall, f1 = prf1(
        [s.predicted_tags for s in predicted],
        [s.gold_tags for s in corpus],
        mode=args.mode,
    )
    _emit({"precision": precision, "recall": recall, "f1": f1})
    return 0


def _cmd_align(args):
    kg = _load_kg(args.kg)
    candidates = _load_candidates(args.candidates)
    mentions = [m for c in candidates
                for m in (c.head, c.trigger_mention, c.tail)]
    table = _table_for(args, kg, extra_mentions=mentions)
    amap = align_relations(candidates, kg, table, gamma=args.gamma,
                           threshold=args.epsilon)
    _emit(amap.as_records())
    return 0


def _cmd_gradcheck(args):
    model, positives, negatives = gradcheck_setup(
        dim=args.dim, n_kernels=args.kernels, kernel_width=args.kernel_width,
        batch=args.batch, seed=args.seed)
    err = grad_check(model, positives, negatives, eps=args.eps)
    if not math.isfinite(err):
        raise NumericError(f"gradient check produced {err}")
    print(f"{err:.3e}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------

def _add_common_model_flags(p, dim=32, lr=0.1, epochs=20, seed=0):
    p.add_argument("--dim", type=int, default=dim, help="embedding width")
    p.add_argument("--lr", type=float, default=lr, help="learning rate")
    p.add_argument("--epochs", type=int, default=epochs)
    p.add_argument("--seed", type=int, default=seed)


def build_parser():
    parser = _Parser(prog="kgfuse",
                     description="Fuse corpus-extracted triples into a knowledge graph.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("fuse", help="run the full collaborative fusion loop")
    p.add_argument("--kg", required=True, help="prior KG triple file (TSV)")
    p.add_argument("--corpus", required=True, help="gold-tagged corpus file")
    p.add_argument("--schema", required=True, help="entity/trigger type file")
    p.add_argument("--emb", help="optional pretrained embedding file")
    p.add_argument("--rounds", type=int, default=3)
    p.add_argument("--top-k", type=int, default=5,
                   help="triples merged per round")
    p.add_argument("--k-benchmarks", type=int, default=10,
                   help="benchmark pairs sampled per side")
    p.add_argument("--neg-budget", type=int, default=50)
    p.add_argument("--alpha", type=float, default=0.5,
                   help="benchmark supervision weight in [0, 1]")
    p.add_argument("--gamma", type=float, default=0.5,
                   help="mention-similarity weight of the alignment score")
    p.add_argument("--epsilon", type=float, default=0.0,
                   help="minimum alignment score")
    p.add_argument("--margin", type=float, default=1.0,
                   help="margin of the translational ranking loss "
                        "(not used by the convolutional supervisor)")
    p.add_argument("--kernels", type=int, default=4)
    p.add_argument("--kernel-width", type=int, default=3)
    _add_common_model_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("train-kge", help="train the convolutional triple scorer")
    p.add_argument("--kg", required=True)
    p.add_argument("--emb")
    p.add_argument("--kernels", type=int, default=4)
    p.add_argument("--kernel-width", type=int, default=3)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--optimizer", choices=("sgd", "adam"), default="sgd")
    _add_common_model_flags(p)
    p.add_argument("--out", required=True, help="model checkpoint path (.npz)")
    p.set_defaults(func=_cmd_train_kge)

    p = sub.add_parser("eval-kgf", help="pool-based link-prediction metrics")
    p.add_argument("--model", required=True)
    p.add_argument("--kg", required=True)
    p.add_argument("--pools", required=True,
                   help="pool file; created with --pool-size if missing")
    p.add_argument("--pool-size", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unnormalized", action="store_true",
                   help="report the raw reciprocal-rank sum")
    p.set_defaults(func=_cmd_eval_kgf)

    p = sub.add_parser("train-jee", help="train the sentence tagger")
    p.add_argument("--corpus", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--emb")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--hidden", type=int, default=16)
    p.add_argument("--pairs", help="benchmark pair JSON for alpha > 0")
    _add_common_model_flags(p, epochs=30)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_jee)

    p = sub.add_parser("eval-jee", help="tagging precision/recall/F1")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--mode", choices=("span", "token"), default="span")
    p.set_defaults(func=_cmd_eval_jee)

    p = sub.add_parser("align", help="align candidate relations to the KG")
    p.add_argument("--kg", required=True)
    p.add_argument("--candidates", required=True,
                   help="TSV: head, trigger mention, trigger type, tail")
    p.add_argument("--emb")
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("gradcheck",
                       help="finite-difference check of the likelihood gradients")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--kernels", type=int, default=4)
    p.add_argument("--kernel-width", type=int, default=3)
    p.add_argument("--batch", type=int, default=8)
    p.set_defaults(func=_cmd_gradcheck)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"kgfuse: numeric failure: {exc}", file=sys.stderr)
        return 3
    except (DataError, ValueError, OSError) as exc:
        print(f"kgfuse: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
